"""Lyapunov functionals, rate certificates, growth estimators and recursion oracles.

Every certificate is a pure function of a recorded trace. Violations are
measured relative to the bound, ``(observed - bound) / max(1, |bound|)``.
"""

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .errors import (ConditionViolated, DegenerateSample, IndexOutOfTrace,
                     InitialDistanceTooLarge, InvalidInstance, MissingGrowth,
                     MissingModuli, UnknownSolutionSet)
from .stepsizes import condition_value, holder_eta, rate_linear

CERT_TOL = 1e-9
MONOTONE_TOL = 1e-10
DESCENT_TOL = 1e-8
SAFETY = 0.9
DEGENERATE = 1e-14


def _rel_violation(observed, bound):
    observed = np.asarray(observed, dtype=float)
    bound = np.asarray(bound, dtype=float)
    return (observed - bound) / np.maximum(1.0, np.abs(bound))


def _require_solutions(X):
    if X is None:
        raise UnknownSolutionSet("solution set is not known")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 0:
        raise UnknownSolutionSet("solution set is empty")
    return X


def _ell_value(ell, tau):
    if ell is None:
        return float(tau + 1)
    if hasattr(ell, "ell"):
        return ell.ell(tau + 1)
    if callable(ell):
        return ell(tau + 1)
    return float(ell)


def min_bregman_to_set(kernel, X, y):
    """``min_{z in X} D_w(z, y)`` for one point or a batch ``y``."""
    X = _require_solutions(X)
    y = np.asarray(y, dtype=float)
    vals = np.stack([kernel.bregman(z, y) for z in X])
    return np.min(vals, axis=0)


def distance_to_set(X, y):
    X = _require_solutions(X)
    y = np.atleast_2d(np.asarray(y, dtype=float))
    d = np.linalg.norm(y[:, None, :] - X[None, :, :], axis=-1)
    return np.min(d, axis=1)


def _points(sampler_or_points, n, rng):
    if callable(sampler_or_points):
        if n is None or n < 1:
            raise ValueError("need n >= 1 samples")
        return np.asarray(sampler_or_points(n, np.random.default_rng(rng)), dtype=float)
    return np.atleast_2d(np.asarray(sampler_or_points, dtype=float))


def _objective_values(problem, pts):
    out = np.empty(len(pts))
    for i, y in enumerate(pts):
        out[i] = problem.objective(y) if problem.kernel.in_domain(y) else np.inf
    return out


# -- growth estimators --------------------------------------------------------

def _growth_ratios(problem, X, pts, den_fn):
    gap = _objective_values(problem, pts) - problem.optimal_value
    den = den_fn(pts)
    keep = (den >= DEGENERATE) & np.isfinite(gap)
    ratios = np.full(len(pts), np.inf)
    ratios[keep] = gap[keep] / den[keep]
    return ratios


def _min_ratio(problem, X, pts, den_fn, polish, project):
    """Smallest sampled growth ratio, optionally refined by Nelder-Mead.

    The ``polish`` worst samples are used as starting points; ``project``
    maps trial points back into the region where growth is claimed.
    """
    ratios = _growth_ratios(problem, X, pts, den_fn)
    if not np.any(np.isfinite(ratios)):
        raise DegenerateSample("every sample was too close to the solution set")
    best = float(np.min(ratios))
    if polish:
        project = project or (lambda y: y)

        def ratio(y):
            return float(_growth_ratios(problem, X, project(y)[None, :], den_fn)[0])

        for i in np.argsort(ratios)[:polish]:
            res = minimize(ratio, pts[i], method="Nelder-Mead",
                           options=dict(maxiter=400 * pts.shape[1], xatol=1e-9, fatol=1e-12))
            best = min(best, float(res.fun))
    return best


def quadratic_growth_estimate(problem, X, sampler_or_points, n=None, rng=None,
                              polish=0, project=None):
    """``0.9 * min (Phi(y) - Phi*) / (d^2(y, X) / 2)`` over the samples."""
    X = _require_solutions(X)
    pts = _points(sampler_or_points, n, rng)
    ratio = _min_ratio(problem, X, pts, lambda p: 0.5 * distance_to_set(X, p) ** 2,
                       polish, project)
    return SAFETY * ratio


def bdg_estimate(problem, kernel, X, sampler_or_points, n=None, rng=None,
                 polish=0, project=None):
    """Bregman-distance growth constant: ``0.9 * min (Phi(y) - Phi*) / min_z D_w(z, y)``."""
    X = _require_solutions(X)
    pts = _points(sampler_or_points, n, rng)
    pts = pts[np.array([kernel.in_domain(p) for p in pts], dtype=bool)]
    if not len(pts):
        raise DegenerateSample("no sample inside the kernel domain")

    def den(p):
        inside = np.array([kernel.in_domain(q) for q in p], dtype=bool)
        out = np.zeros(len(p))
        if np.any(inside):
            out[inside] = min_bregman_to_set(kernel, X, p[inside])
        return out
    return SAFETY * _min_ratio(problem, X, pts, den, polish, project)


def bregman_growth_margin(problem, X, points, mu):
    """Smallest sampled ``Phi(y) - Phi* - mu min_z D_w(z, y)``."""
    X = _require_solutions(X)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    gap = _objective_values(problem, pts) - problem.optimal_value
    den = min_bregman_to_set(problem.kernel, X, pts)
    slack = gap - mu * den
    slack = slack[np.isfinite(slack)]
    return float(np.min(slack))


def sufficient_condition_check(problem, kernel, mode, sampler, n, mu=None, rng=None):
    """Smallest sampled slack of one of the two sufficient conditions for Bregman growth.

    ``C2`` samples pairs ``(x, y)`` from ``sampler(n, rng)`` and evaluates
    ``F(y) - F(x) - <grad F(x), y - x> - mu D_w(x, y)``. ``mu`` defaults to
    the problem's declared growth constant.

    ``relative`` is the same with ``D_w(y, x)`` in place of ``D_w(x, y)``
    (strong convexity relative to ``w``); the two forms differ by the
    symmetry coefficient of ``w``.

    ``C1`` samples points ``y = sampler(n, rng)[0]`` and returns the worse of
    the quadratic-growth slack and the slack of ``D_w(x*, y) <= L_w/2 ||x* - y||^2``.
    """
    rng = np.random.default_rng(rng)
    if mode in ("C2", "relative"):
        if mu is None:
            if problem.growth is None:
                raise MissingGrowth("C2 needs mu or a growth record")
            mu = problem.growth.mu
        xs, ys = sampler(n, rng)
        worst = np.inf
        for x, y in zip(xs, ys):
            dist = kernel.bregman(x, y) if mode == "C2" else kernel.bregman(y, x)
            slack = (problem.smooth_value(y) - problem.smooth_value(x)
                     - problem.grad_F(x) @ (y - x) - mu * dist)
            worst = min(worst, float(slack))
        return worst
    if mode == "C1":
        if problem.growth is None or problem.growth.mode != "quadratic":
            raise MissingGrowth("C1 needs a quadratic growth record")
        moduli = kernel.effective_moduli()
        if moduli is None:
            raise MissingModuli("C1 needs the gradient-Lipschitz modulus of w")
        L_w = moduli[1]
        X = _require_solutions(problem.solutions)
        ys = sampler(n, rng)[0]
        gap = _objective_values(problem, ys) - problem.optimal_value
        dist = distance_to_set(X, ys)
        qg = gap - 0.5 * problem.growth.mu * dist**2
        nearest = X[np.argmin(np.linalg.norm(ys[:, None, :] - X[None], axis=-1), axis=1)]
        lip = 0.5 * L_w * np.sum((nearest - ys) ** 2, axis=1) - kernel.bregman(nearest, ys)
        both = np.concatenate([qg[np.isfinite(qg)], lip])
        return float(np.min(both))
    raise ValueError(f"unknown mode {mode!r}")


# -- Lyapunov functionals -------------------------------------------------------

def lyapunov_T(trace, k, x_ref, L=None, tau=None, ell=None):
    """``Phi(x_k) - Phi(x) + L ell(tau+1) sum_{i=1}^tau i D_w(x_{k-tau+i}, x_{k-tau+i-1})``."""
    K = len(trace.phi) - 1
    if k < 0 or k > K:
        raise IndexOutOfTrace(f"k={k} outside 0..{K}")
    L = trace.L if L is None else L
    tau = trace.tau if tau is None else tau
    ell_val = trace.ell_tau if ell is None else _ell_value(ell, tau)
    phi_ref = trace.problem.objective(x_ref)
    total = 0.0
    for i in range(1, tau + 1):
        j = k - tau + i - 1
        if j >= 0:
            total += i * trace.bregman_steps[j]
    return trace.phi[k] - phi_ref + L * ell_val * total


def lyapunov_gamma(trace, k, alpha, X, phi_star, kernel=None):
    """``Phi(x_k) - Phi* + min_{z in X} D_w(z, x_k) / alpha``."""
    X = _require_solutions(X)
    K = len(trace.phi) - 1
    if k < 0 or k > K:
        raise IndexOutOfTrace(f"k={k} outside 0..{K}")
    kernel = trace.problem.kernel if kernel is None else kernel
    dist = float(min_bregman_to_set(kernel, X, trace.iterates[k]))
    return trace.phi[k] - phi_star + dist / alpha


def gamma_value(problem, x, alpha, X=None, phi_star=None):
    """``Gamma_alpha(x)`` for a single point, without a trace."""
    X = problem.solutions if X is None else X
    phi_star = problem.optimal_value if phi_star is None else phi_star
    X = _require_solutions(X)
    return problem.objective(x) - phi_star + float(min_bregman_to_set(problem.kernel, X, x)) / alpha


def descent_increment(trace, k, L=None, tau=None, ell=None):
    """``Delta_k = L ell(tau+1) sum_{j=k-tau}^k D_w(x_{j+1}, x_j)``."""
    L = trace.L if L is None else L
    tau = trace.tau if tau is None else tau
    ell_val = trace.ell_tau if ell is None else _ell_value(ell, tau)
    lo = max(k - tau, 0)
    return L * ell_val * float(np.sum(trace.bregman_steps[lo:k + 1]))


def descent_lemma_residuals(trace, x="iterate", alpha=None):
    """Per-step relative slack of the delayed descent inequality.

    ``x`` is a fixed comparison point or ``"iterate"`` for ``x = x_k``.
    Positive entries are violations.
    """
    alpha = trace.alpha if alpha is None else alpha
    kernel = trace.problem.kernel
    K = len(trace.phi) - 1
    out = np.empty(K)
    fixed = not (isinstance(x, str) and x == "iterate")
    if fixed:
        phi_x = trace.problem.objective(x)
    for k in range(K):
        xk = trace.iterates[k]
        xk1 = trace.iterates[k + 1]
        if fixed:
            pt, phi_pt = x, phi_x
        else:
            pt, phi_pt = xk, trace.phi[k]
        rhs = (phi_pt + (kernel.bregman(pt, xk) - kernel.bregman(pt, xk1)
                         - trace.bregman_steps[k]) / alpha
               + descent_increment(trace, k))
        out[k] = _rel_violation(trace.phi[k + 1], rhs)
    return out


# -- certificates ------------------------------------------------------------------

@dataclass
class Certificate:
    kind: str
    K: int
    alpha: float
    mu: Optional[float]
    bound: np.ndarray
    observed: np.ndarray
    max_violation: float
    passed: bool
    tolerance: float = CERT_TOL
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_json(self):
        per_k = [dict(k=int(k), bound=float(b), observed=float(o))
                 for k, (b, o) in enumerate(zip(self.bound, self.observed))]
        return {"kind": self.kind, "K": int(self.K), "alpha": float(self.alpha),
                "mu": None if self.mu is None else float(self.mu),
                "max_violation": float(self.max_violation), "pass": bool(self.passed),
                "checks": {k: float(v) for k, v in self.checks.items()},
                "notes": list(self.notes), "per_k": per_k}

    def dumps(self):
        return json.dumps(self.to_json(), indent=1, sort_keys=True, allow_nan=True)


def _mark(trace, cert):
    # a run stopped by the divergence guard cannot certify anything
    if getattr(trace, "divergence", None) is not None:
        cert.passed = False
        cert.notes.append(f"run diverged at iteration {trace.divergence}")
    return cert


def certify_sublinear(trace, x_ref=None, alpha=None, L=None, tau=None, ell=None):
    """Check ``T_k(x) <= D_w(x, x_0)/(alpha k)`` for ``1 <= k <= K`` and ``T_k`` nonincreasing.

    ``x_ref`` defaults to the first stored solution, else the last iterate.
    ``bound[0]`` is reported as infinity.
    """
    problem = trace.problem
    if x_ref is None:
        x_ref = problem.solutions[0] if problem.solutions is not None else trace.iterates[-1]
    alpha = trace.alpha if alpha is None else alpha
    K = len(trace.phi) - 1
    T = np.array([lyapunov_T(trace, k, x_ref, L, tau, ell) for k in range(K + 1)])
    d0 = float(problem.kernel.bregman(x_ref, trace.iterates[0]))
    ks = np.arange(K + 1)
    bound = np.full(K + 1, np.inf)
    bound[1:] = d0 / (alpha * ks[1:])
    viol = _rel_violation(T[1:], bound[1:]) if K else np.zeros(0)
    rate_viol = float(np.max(viol)) if K else -np.inf
    mono = (T[1:] - T[:-1]) / np.maximum(1.0, np.abs(T[:-1])) if K else np.zeros(0)
    mono_viol = float(np.max(mono)) if K else -np.inf
    passed = rate_viol <= CERT_TOL and mono_viol <= MONOTONE_TOL
    notes = []
    if problem.kernel.name == "burg":
        notes.append("Burg moduli are box-restricted")
    return _mark(trace, Certificate("sublinear", K, alpha, None, bound, T, max(rate_viol, mono_viol),
                       bool(passed), checks=dict(rate=rate_viol, monotone=mono_viol),
                       notes=notes))


def certify_linear(trace, alpha=None, mu=None, X=None, phi_star=None):
    """Check the Lyapunov, function-value and distance forms of the linear rate."""
    problem = trace.problem
    alpha = trace.alpha if alpha is None else alpha
    if mu is None:
        if problem.growth is None:
            raise MissingGrowth("linear certificate needs a growth constant")
        mu = problem.growth.mu
    X = _require_solutions(problem.solutions if X is None else X)
    phi_star = problem.optimal_value if phi_star is None else phi_star
    K = len(trace.phi) - 1
    r = rate_linear(alpha, mu)
    ks = np.arange(K + 1)
    dist = min_bregman_to_set(problem.kernel, X, trace.iterates)
    gap = np.asarray(trace.phi) - phi_star
    gamma = gap + dist / alpha
    g0 = gamma[0]
    decay = r ** ks
    b01 = decay * g0
    b03 = alpha * g0 * r ** (ks + 1)
    v01 = float(np.max(_rel_violation(gamma, b01)))
    v02 = float(np.max(_rel_violation(gap, b01)))
    v03 = float(np.max(_rel_violation(dist, b03)))
    worst = max(v01, v02, v03)
    notes = []
    if problem.kernel.name == "burg":
        notes.append("growth constant for Burg entropy is a sampled estimate")
    return _mark(trace, Certificate("linear_gamma", K, alpha, mu, b01, gamma, worst,
                       bool(worst <= CERT_TOL),
                       checks=dict(gamma=v01, function_value=v02, distance=v03),
                       notes=notes))


def certify_holder(trace, alpha=None, mu=None, theta=None, X=None):
    """Check ``d^2(x_k, X) <= (1/(1+alpha mu))^(k/eta) d^2(x_0, X)``."""
    problem = trace.problem
    alpha = trace.alpha if alpha is None else alpha
    if mu is None or theta is None:
        if problem.growth is None or problem.growth.mode != "holder":
            raise MissingGrowth("Hölder certificate needs mu and theta")
        mu = problem.growth.mu if mu is None else mu
        theta = problem.growth.theta if theta is None else theta
    X = _require_solutions(problem.solutions if X is None else X)
    d2 = distance_to_set(X, trace.iterates) ** 2
    if d2[0] > 1.0:
        raise InitialDistanceTooLarge("the Hölder bound needs d(x_0, X) <= 1")
    K = len(d2) - 1
    eta = holder_eta(alpha, mu, theta)
    r = rate_linear(alpha, mu)
    bound = r ** (np.arange(K + 1) / eta) * d2[0]
    viol = float(np.max(_rel_violation(d2, bound)))
    return _mark(trace, Certificate("holder_distance", K, alpha, mu, bound, d2, viol,
                       bool(viol <= CERT_TOL), checks=dict(distance=viol, eta=eta)))


def log_slope(values):
    """Least-squares slope of ``log(values)`` against the index (positive entries only)."""
    v = np.asarray(values, dtype=float)
    k = np.arange(v.size)
    keep = v > 0
    if np.count_nonzero(keep) < 2:
        raise DegenerateSample("need two positive values to fit a slope")
    return float(np.polyfit(k[keep], np.log(v[keep]), 1)[0])


# -- recursion oracles ---------------------------------------------------------------

@dataclass(frozen=True)
class RecursionInstance:
    """Parameters of ``d V_{k+1}^theta + a V_{k+1} <= a V_k - b w_k + c sum_{j=k-k0}^k w_j``.

    ``d = 0`` and ``theta = 1`` give the plain delayed recursion.
    """
    a: float
    b: float
    c: float
    k0: int
    d: float = 0.0
    theta: float = 1.0
    V0: float = 1.0

    @property
    def rho(self):
        return (1.0 - self.a) * self.theta + self.a

    @property
    def eta(self):
        # with a = 1/(1 + alpha mu) this is the exponent of the Hölder rate
        return self.rho

    def condition(self):
        return condition_value(self.a, self.c, self.k0)

    def condition_holds(self):
        return self.condition() <= self.b * (1 + 1e-12)


@dataclass
class OracleResult:
    passed: bool
    worst_ratio: float
    violations: int
    trials: int
    horizon: int


def _draw_w(rng, trials, V, stored, inst):
    """Randomized ``w_k``: zero, uniform, or the extreme value that drives the next ``V`` to zero."""
    a, b, c = inst.a, inst.b, inst.c
    base = a * V + c * stored.sum(axis=1)
    if b > c:
        w_max = base / (b - c)
    else:
        w_max = np.maximum(V, inst.V0) * rng.uniform(0, 2, trials)
    u = rng.uniform(0, 1, trials)
    pick = rng.uniform(0, 1, trials)
    u = np.where(pick < 0.3, 1.0, np.where(pick < 0.4, 0.0, u))
    return u * w_max


def _simulate(inst, trials, horizon, seed, solve_next):
    rng = np.random.default_rng(seed)
    V = np.full(trials, float(inst.V0))
    # w_{k-k0}, ..., w_{k-1}; zero for negative indices
    stored = np.zeros((trials, inst.k0))
    history = [V.copy()]
    for _ in range(horizon):
        w = _draw_w(rng, trials, V, stored, inst)
        window = stored.sum(axis=1) + w
        rhs = np.maximum(inst.a * V - inst.b * w + inst.c * window, 0.0)
        V = solve_next(rhs)
        history.append(V.copy())
        if inst.k0:
            stored = np.concatenate([stored[:, 1:], w[:, None]], axis=1)
    return np.array(history)


def recursion_oracle_42(inst, trials=1000, horizon=200, seed=0):
    """Simulate tight delayed recursions and check ``V_k <= a^k V_0``."""
    if not (0 < inst.a <= 1) or inst.b < 0 or inst.c < 0 or inst.k0 < 0:
        raise InvalidInstance("need a in (0, 1], b, c >= 0, k0 >= 0")
    if not inst.condition_holds():
        raise ConditionViolated(f"condition value {inst.condition()} exceeds b = {inst.b}")
    hist = _simulate(inst, trials, horizon, seed, lambda rhs: rhs)
    ks = np.arange(horizon + 1)
    bound = inst.a ** ks * inst.V0
    return _judge(hist, bound, trials, horizon)


def _solve_holder(inst):
    a, d, theta = inst.a, inst.d, inst.theta

    def solve_next(rhs):
        # d V^theta + a V = rhs, increasing in V >= 0
        hi = rhs / a
        if d > 0:
            hi = np.minimum(hi, (rhs / d) ** (1.0 / theta))
        lo = np.zeros_like(rhs)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            big = d * mid**theta + a * mid > rhs
            hi = np.where(big, mid, hi)
            lo = np.where(big, lo, mid)
        return hi
    return solve_next


def recursion_oracle_51(inst, trials=1000, horizon=200, seed=0):
    """Simulate the Hölder-type recursion and check ``V_k^rho <= a^k V_0`` for ``k >= 1``.

    At ``k = 0`` the inequality reads ``V_0^rho <= V_0``, which fails for
    ``V_0 < 1`` and ``rho < 1``; the check therefore starts at ``k = 1``.
    """
    if abs(inst.a + inst.d - 1.0) > 1e-12:
        raise InvalidInstance("need a + d = 1")
    if inst.V0 > 1.0:
        raise InvalidInstance("need V0 <= 1")
    if not (0 < inst.a <= 1) or not (0 < inst.theta <= 1) or inst.b < 0 or inst.c < 0:
        raise InvalidInstance("need a, theta in (0, 1] and b, c >= 0")
    if not inst.condition_holds():
        raise ConditionViolated(f"condition value {inst.condition()} exceeds b = {inst.b}")
    hist = _simulate(inst, trials, horizon, seed, _solve_holder(inst))
    ks = np.arange(1, horizon + 1)
    bound = inst.a ** ks * inst.V0
    return _judge(hist[1:] ** inst.rho, bound, trials, horizon)


def _judge(hist, bound, trials, horizon):
    bound = bound[:, None]
    ok = hist <= bound * (1 + CERT_TOL)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bound > 0, hist / bound, np.where(hist > 0, np.inf, 0.0))
    violations = int(np.count_nonzero(~ok))
    return OracleResult(violations == 0, float(np.max(ratio)), violations, trials, horizon)
