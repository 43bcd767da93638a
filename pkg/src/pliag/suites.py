"""Bundled verification suites run by ``pliag verify``.

Each suite returns a list of ``(name, passed, value)`` checks on small
deterministic instances.
"""

import numpy as np

from . import diagnostics as dg
from . import kernels as kn
from . import problems as pb
from .errors import ConditionViolated
from .solver import named_method, run

SUITES = ("kernels", "descent", "sublinear", "linear", "holder", "recursion", "appendixB")


def demo_lasso(seed=0):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((5, 5))
    b = rng.standard_normal(5)
    lam = 0.5
    return pb.make_lasso(A, b, lam, radius=2.0 * (b @ b) / (2 * lam) + 1.0, seed=seed)


def demo_quartic(box=1.5):
    return pb.make_quartic_problem(np.eye(2), np.zeros((1, 2)), np.eye(2), [0.0], [0.0, 0.0],
                                   box=([-box, -box], [box, box]), x0=[1.0, -0.5])


def demo_poisson(seed=0):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.1, 1.0, (6, 3))
    b = rng.uniform(1.0, 3.0, 6)
    return pb.make_poisson_elastic_net(a, b, box=([0.05] * 3, [5.0] * 3))


def _check(name, passed, value):
    return (name, bool(passed), float(value))


def suite_kernels():
    rng = np.random.default_rng(0)
    out = []
    for kernel, lo, hi in ((kn.euclidean(3), -3, 3), (kn.burg(3), 0.1, 5),
                           (kn.quartic(3), -3, 3)):
        x, y, z = (rng.uniform(lo, hi, (2000, 3)) for _ in range(3))
        res = kn.three_point_residual(kernel, x, y, z)
        scale = np.maximum(1.0, np.abs(kernel.bregman(x, z)))
        out.append(_check(f"three_point_{kernel.name}", np.max(res / scale) <= 1e-10,
                          np.max(res / scale)))
        dmin = np.min(kernel.bregman(x, y))
        out.append(_check(f"nonnegative_{kernel.name}", dmin >= 0, dmin))
    out.append(_check("ell_identity", kn.euclidean(2).ell(7) == 7.0, kn.euclidean(2).ell(7)))
    return out


def _certified_runs():
    lasso = demo_lasso()
    quartic = demo_quartic()
    runs = []
    for tau in (0, 3, 5):
        runs.append(("lasso_sublinear", tau, lasso,
                     run(named_method("piag" if tau else "pg", lasso, tau=tau, K=2000))))
    for tau in (0, 3):
        runs.append(("lasso_linear", tau, lasso,
                     run(named_method("piag" if tau else "pg", lasso, tau=tau, K=1000,
                                      step="linear"))))
        runs.append(("quartic_linear", tau, quartic,
                     run(named_method("ne_piag" if tau else "nolips", quartic, tau=tau,
                                      K=1000, step="linear"))))
    return runs


def suite_descent():
    out = []
    for name, tau, problem, trace in _certified_runs():
        worst = max(np.max(dg.descent_lemma_residuals(trace)),
                    np.max(dg.descent_lemma_residuals(trace, problem.solutions[0])))
        out.append(_check(f"{name}_tau{tau}", worst <= dg.DESCENT_TOL, worst))
    return out


def suite_sublinear():
    out = []
    lasso = demo_lasso()
    for tau in (0, 3, 5):
        cert = dg.certify_sublinear(run(named_method("piag" if tau else "pg", lasso,
                                                     tau=tau, K=2000)))
        out.append(_check(f"lasso_tau{tau}", cert.passed, cert.max_violation))
    poisson = demo_poisson()
    cert = dg.certify_sublinear(run(named_method("ne_piag", poisson, tau=2, K=500)))
    out.append(_check("poisson_ne_piag_tau2", cert.passed, cert.max_violation))
    return out


def suite_linear():
    out = []
    lasso, quartic = demo_lasso(), demo_quartic()
    for tau in (0, 3):
        for name, problem, tag in (("lasso", lasso, "piag" if tau else "pg"),
                                   ("quartic", quartic, "ne_piag" if tau else "nolips")):
            cert = dg.certify_linear(run(named_method(tag, problem, tau=tau, K=1000,
                                                      step="linear")))
            out.append(_check(f"{name}_tau{tau}", cert.passed, cert.max_violation))
    return out


def suite_holder():
    out = []
    toy = pb.make_holder_toy(0.1)
    for tau in (0, 2):
        cert = dg.certify_holder(run(named_method("piag" if tau else "pg", toy, tau=tau,
                                                  K=1000, step="piag_holder")))
        out.append(_check(f"holder_toy_tau{tau}", cert.passed, cert.max_violation))
    return out


def suite_recursion():
    out = []
    inst = dg.RecursionInstance(a=0.5, b=1.0, c=0.1, k0=1)
    res = dg.recursion_oracle_42(inst, trials=1000, horizon=200, seed=0)
    out.append(_check("recursion_delayed", res.passed, res.worst_ratio))
    inst = dg.RecursionInstance(a=0.5, b=1.0, c=0.1, k0=1, d=0.5, theta=0.5)
    res = dg.recursion_oracle_51(inst, trials=1000, horizon=200, seed=0)
    out.append(_check("recursion_holder", res.passed, res.worst_ratio))
    try:
        dg.recursion_oracle_42(dg.RecursionInstance(a=0.5, b=1.0, c=1.0, k0=1))
        raised = False
    except ConditionViolated:
        raised = True
    out.append(_check("condition_violated_detected", raised, 3.0))
    return out


def suite_appendixB():
    out = []
    sampler = kn.uniform_pairs(-5.0, 5.0, 2)
    ratio = kn.symmetry_ratio_min(kn.quartic(2), sampler, 100000, rng=0)
    out.append(_check("symmetry_quartic_1_1", ratio >= 0.2 - 1e-9, ratio))
    ratio = kn.symmetry_ratio_min(kn.quartic(2, beta=2.0, gamma=1.0), sampler, 100000, rng=0)
    out.append(_check("symmetry_quartic_2_1", ratio >= 0.1 - 1e-9, ratio))
    quartic = demo_quartic()
    mu = quartic.params["mu_relative"]
    margin = dg.sufficient_condition_check(quartic, quartic.kernel, "relative", sampler,
                                           10000, mu=mu, rng=0)
    out.append(_check("relative_strong_convexity", margin >= -1e-9, margin))
    margin = dg.sufficient_condition_check(quartic, quartic.kernel, "C2", sampler, 10000,
                                           mu=mu / 5.0, rng=0)
    out.append(_check("C2_with_symmetry_factor", margin >= -1e-9, margin))
    mu_hat = dg.bdg_estimate(quartic, quartic.kernel, quartic.solutions,
                             lambda n, r: r.uniform(-5, 5, (n, 2)), 4000, rng=0)
    out.append(_check("bregman_growth_estimate", mu_hat >= 0.29, mu_hat))
    margin = pb.relative_smoothness_margin(quartic.components[0], quartic.kernel, sampler,
                                           10000, rng=0)
    out.append(_check("relative_smoothness_quartic", margin >= -1e-9, margin))
    return out


def run_suite(name):
    if name not in SUITES:
        raise KeyError(name)
    return globals()[f"suite_{name}"]()
