"""Exact solvers for the per-iteration subproblem

    argmin_x  h(x) + sum_{i in I} f_i(x) + <s, x> + (1/alpha) D_w(x, x_k).

Solvers are looked up by ``(kernel name, regularizer kind, kept class)``
where the kept class is ``none``, ``quadratic`` or ``smooth``. Linear kept
components are folded into ``s`` first. Unregistered combinations raise
:class:`UnsupportedCombination` rather than being approximated.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import (BracketFailure, DegenerateBeta, NonConvergence,
                     UnsupportedCombination, UnsupportedKeptComponent)
from .problems import project_l1_ball, shrink

BETA_EPS = 1e-15
NEWTON_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SubproblemInstance:
    kernel: object
    regularizer: object
    kept: Tuple = ()
    s: np.ndarray = None
    anchor: np.ndarray = None
    alpha: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("step must be positive")


# -- one-dimensional closed forms ---------------------------------------------

def elastic_net_coordinate_update(lam, mu, gamma, beta, x):
    """Positive root of ``4 lam beta x u^2 + B u - x = 0``, ``B = lam x (mu+gamma) + 1 - 2 lam beta x^2``.

    This is the minimizer over ``u > 0`` of
    ``(mu+gamma) u + beta u^2 + (u/x - log(u/x))/lam + beta (u-x)^2``.
    The root is written as ``2x / (B + sqrt(B^2 + 16 lam beta x^2))`` which
    is free of cancellation for either sign of ``B``. Works elementwise.
    """
    lam, mu, gamma, beta, x = np.broadcast_arrays(*map(np.asarray, (lam, mu, gamma, beta, x)))
    if np.any(beta <= BETA_EPS):
        raise DegenerateBeta("beta must be positive; use burg_l1_update for beta = 0")
    B = lam * x * (mu + gamma) + 1.0 - 2.0 * lam * beta * x * x
    out = 2.0 * x / (B + np.sqrt(B * B + 16.0 * lam * beta * x * x))
    return out if out.ndim else float(out)


def burg_l1_update(lam, mu, gamma, x):
    """``beta = 0`` limit: ``x / (1 + lam x (mu + gamma))``; None where the denominator is not positive."""
    den = 1.0 + lam * x * (mu + gamma)
    if np.any(den <= 0):
        return None
    return x / den


def _burg_root(x, alpha, m, P, c):
    """Positive root of ``(alpha x P + 2 c x) u^2 + (alpha x m + 1 - 2 c x^2) u - x = 0``.

    Stationarity of ``(m u + P u^2 / 2) + (1/alpha) D(u, x)`` for Burg's
    entropy plus ``c u^2``. Returns None where no positive minimizer exists.
    """
    A2 = x * (alpha * P + 2.0 * c)
    B = alpha * x * m + 1.0 - 2.0 * c * x * x
    disc = np.sqrt(B * B + 4.0 * A2 * x)
    den = B + disc
    if np.any(den <= 0):
        return None
    return 2.0 * x / den


def quartic_radius(norm_v, beta=1.0, gamma=1.0):
    """Unique nonnegative root of ``beta r^3 + gamma r = norm_v``.

    Newton started from an upper bound decreases monotonically to the root
    because the cubic is convex on ``r >= 0``.
    """
    if norm_v == 0.0:
        return 0.0
    r = min(norm_v / gamma, np.cbrt(norm_v / beta))
    for _ in range(200):
        f = beta * r**3 + gamma * r - norm_v
        r_new = r - f / (3.0 * beta * r * r + gamma)
        if not r_new < r:
            break
        r = r_new
    return float(r)


def quartic_kernel_update(s, x_k, alpha, beta=1.0, gamma=1.0):
    """Mirror step ``grad w(x+) = grad w(x_k) - alpha s`` for the quartic kernel."""
    x_k = np.asarray(x_k, dtype=float)
    v = (beta * (x_k @ x_k) + gamma) * x_k - alpha * np.asarray(s, dtype=float)
    r = quartic_radius(float(np.linalg.norm(v)), beta, gamma)
    return v / (beta * r * r + gamma)


# -- prox-type closed forms -----------------------------------------------------

def _kept_class(kept):
    if not kept:
        return "none"
    if all(c.kind in ("quadratic", "linear") for c in kept):
        return "quadratic"
    return "smooth"


def _fold_linear(inst):
    s = np.array(inst.s, dtype=float)
    rest = []
    for comp in inst.kept:
        if comp.kind == "linear":
            s = s + comp.q
        else:
            rest.append(comp)
    return s, tuple(rest)


def _kept_quadratic(kept, d):
    P = np.zeros((d, d))
    q = np.zeros(d)
    for comp in kept:
        P = P + comp.P
        q = q + comp.q
    return P, q


def _diagonal(P):
    D = np.diag(P).copy()
    if np.any(P - np.diag(D)):
        return None
    return D


def _apply_separable_h(reg, num, den):
    """Minimize ``den/2 u^2 - num u + h(u)`` coordinatewise (``den > 0``)."""
    kind = reg.kind
    if kind == "zero":
        return num / den
    if kind in ("l1", "abs"):
        return shrink(num, reg.weight) / den
    if kind == "l1_plus_positivity":
        return np.maximum(num - reg.weight, 0.0) / den
    return np.clip(num / den, reg.lower, reg.upper)


def _euclidean_none(inst, s, kept):
    reg = inst.regularizer
    alpha = inst.alpha
    v = inst.anchor - alpha * s
    if reg.kind == "zero":
        return v
    if reg.is_l1 and reg.radius is not None:
        # prox of lam||.||_1 + ball indicator: soft-threshold, then project
        return project_l1_ball(shrink(v, alpha * reg.weight), reg.radius)
    return _apply_separable_h(reg, v / alpha, 1.0 / alpha)


def _euclidean_quadratic(inst, s, kept):
    reg = inst.regularizer
    d = inst.anchor.size
    P, q = _kept_quadratic(kept, d)
    rhs = inst.anchor / inst.alpha - s - q
    if reg.kind == "zero":
        return np.linalg.solve(P + np.eye(d) / inst.alpha, rhs)
    D = _diagonal(P)
    if D is None or (reg.is_l1 and reg.radius is not None):
        raise UnsupportedKeptComponent(
            "nonseparable kept quadratic with a nonzero regularizer")
    return _apply_separable_h(reg, rhs, D + 1.0 / inst.alpha)


def _burg_linear_weight(reg):
    # on the open orthant |u| = u, so every l1-type term is linear
    if reg.is_l1 and reg.radius is not None:
        raise UnsupportedCombination("l1-ball constraint with Burg's entropy")
    if reg.kind in ("l1", "abs", "l1_plus_positivity"):
        return reg.weight
    return 0.0


def _burg_separable(inst, s, kept):
    reg = inst.regularizer
    x = inst.anchor
    d = x.size
    if kept:
        P, q = _kept_quadratic(kept, d)
        D = _diagonal(P)
        if D is None:
            raise UnsupportedKeptComponent("Burg update needs a diagonal kept quadratic")
    else:
        D, q = np.zeros(d), np.zeros(d)
    m = s + q + _burg_linear_weight(reg)
    u = _burg_root(x, inst.alpha, m, D, inst.kernel.quad)
    if u is None:
        if kept:
            raise NonConvergence("Burg subproblem has no interior minimizer")
        return generic_separable_update(inst)
    if reg.kind == "indicator_box":
        u = np.clip(u, reg.lower, reg.upper)
    return u


def _quartic_none(inst, s, kept):
    k = inst.kernel
    return quartic_kernel_update(s, inst.anchor, inst.alpha, k.beta, k.gamma)


# -- damped Newton for smooth kept components -----------------------------------

def _newton_kept(inst, s, kept):
    kernel = inst.kernel
    if any(c.hess is None for c in kept):
        raise UnsupportedKeptComponent("smooth kept component without a Hessian")
    reg = inst.regularizer
    if kernel.name == "burg":
        s = s + _burg_linear_weight(reg)
    elif reg.kind != "zero":
        raise UnsupportedCombination("smooth kept component with a nonzero regularizer")
    alpha = inst.alpha
    xk = inst.anchor
    gk = kernel.grad(xk)

    def phi(x):
        return sum(c.value(x) for c in kept) + s @ x + kernel.bregman(x, xk) / alpha

    def grad(x):
        g = s + (kernel.grad(x) - gk) / alpha
        for c in kept:
            g = g + c.grad(x)
        return g

    def hess(x):
        H = kernel.hess(x) / alpha
        for c in kept:
            H = H + c.hess(x)
        return H

    x = xk.copy()
    for _ in range(100):
        g = grad(x)
        scale = max(1.0, float(np.max(np.abs(gk))) / alpha)
        if np.max(np.abs(g)) <= NEWTON_TOL * scale:
            return x
        step = np.linalg.solve(hess(x), g)
        f0 = phi(x)
        t = 1.0
        for _ in range(60):
            y = x - t * step
            if kernel.in_domain(y) and phi(y) <= f0 - 1e-4 * t * (g @ step) + 1e-14 * abs(f0):
                break
            t *= 0.5
        x = y
    res = float(np.max(np.abs(grad(x))))
    if res <= 1e-9:
        return x
    raise NonConvergence("Newton iteration did not converge", residual=res)


# -- bisection fallback ---------------------------------------------------------

def _h_domain(reg, d):
    lo = np.full(d, -np.inf)
    hi = np.full(d, np.inf)
    if reg.kind == "l1_plus_positivity":
        lo[:] = 0.0
    elif reg.kind == "indicator_box":
        lo = np.broadcast_to(reg.lower, (d,)).astype(float)
        hi = np.broadcast_to(reg.upper, (d,)).astype(float)
    return lo, hi


def _h_derivatives(reg, u):
    """Right and left derivatives of ``h`` at ``u`` inside its domain."""
    if reg.kind in ("zero", "indicator_box"):
        z = np.zeros_like(u)
        return z, z
    lam = reg.weight
    if reg.kind == "l1_plus_positivity":
        full = np.full_like(u, lam)
        return full, np.where(u > 0, lam, -np.inf)
    right = np.where(u >= 0, lam, -lam)
    left = np.where(u > 0, lam, -lam)
    return right, left


def generic_separable_update(inst):
    """Coordinatewise bisection on the monotone right derivative of the 1-D objectives."""
    kernel, reg = inst.kernel, inst.regularizer
    if inst.kept:
        raise UnsupportedCombination("bisection fallback needs an empty kept set")
    if not kernel.separable or not reg.separable:
        raise UnsupportedCombination("bisection fallback needs separable w and h")
    x = np.asarray(inst.anchor, dtype=float)
    s = np.asarray(inst.s, dtype=float)
    alpha = inst.alpha
    d = x.size
    gx = kernel.grad(x)

    def wprime(u):
        if kernel.name == "euclidean":
            return u
        with np.errstate(divide="ignore"):
            return -1.0 / u + 2.0 * kernel.quad * u

    def right(u):
        return s + _h_derivatives(reg, u)[0] + (wprime(u) - gx) / alpha

    def left(u):
        return s + _h_derivatives(reg, u)[1] + (wprime(u) - gx) / alpha

    lo_dom, hi_dom = _h_domain(reg, d)
    if kernel.name == "burg":
        lo_dom = np.maximum(lo_dom, 0.0)
    result = np.full(d, np.nan)

    # closed bounds of dom h hold the minimizer when the one-sided
    # derivative there points outward (0 is open for Burg)
    closed_lo = np.isfinite(lo_dom) & ((kernel.name != "burg") | (lo_dom > 0))
    probe_lo = np.where(closed_lo, lo_dom, x)
    at_lo = closed_lo & (right(probe_lo) >= 0)
    result[at_lo] = lo_dom[at_lo]
    closed_hi = np.isfinite(hi_dom)
    probe_hi = np.where(closed_hi, hi_dom, x)
    at_hi = closed_hi & ~at_lo & (left(probe_hi) <= 0)
    result[at_hi] = hi_dom[at_hi]
    todo = np.isnan(result)

    # bracket [a, b] with right(a) < 0 <= right(b)
    start = np.clip(x, lo_dom, hi_dom)
    a = start.copy()
    b = start.copy()
    width = np.maximum(1.0, np.abs(start))
    for it in range(200):
        need = todo & (right(a) >= 0)
        if not np.any(need):
            break
        if kernel.name == "burg":
            a = np.where(need, np.maximum(0.5 * a, lo_dom), a)
        else:
            a = np.where(need, np.maximum(a - width * 2.0**it, lo_dom), a)
    else:
        bad = int(np.nonzero(todo & (right(a) >= 0))[0][0])
        raise BracketFailure("no lower bracket found", coordinate=bad)
    for it in range(200):
        need = todo & (right(b) < 0)
        if not np.any(need):
            break
        b = np.where(need, np.minimum(b + width * 2.0**it, hi_dom), b)
    else:
        bad = int(np.nonzero(todo & (right(b) < 0))[0][0])
        raise BracketFailure("no upper bracket found", coordinate=bad)

    # bisect down to adjacent floats
    for _ in range(2100):
        mid = 0.5 * (a + b)
        active = todo & (mid > a) & (mid < b)
        if not np.any(active):
            break
        up = right(mid) >= 0
        b = np.where(active & up, mid, b)
        a = np.where(active & ~up, mid, a)
    u = b.copy()
    # snap to the kink of |u| when it satisfies the optimality condition
    if reg.is_l1:
        zero = np.zeros(d)
        kink = todo & (a <= 0) & (b >= 0) & (left(zero) <= 0) & (right(zero) >= 0)
        u[kink] = 0.0
    result[todo] = u[todo]
    return result


# -- registry -------------------------------------------------------------------

_SEPARABLE_KINDS = ("zero", "l1", "abs", "l1_plus_positivity", "indicator_box")
_REGISTRY = {}
for _kind in _SEPARABLE_KINDS:
    _REGISTRY[("euclidean", _kind, "none")] = _euclidean_none
    _REGISTRY[("euclidean", _kind, "quadratic")] = _euclidean_quadratic
    _REGISTRY[("burg", _kind, "none")] = _burg_separable
    _REGISTRY[("burg", _kind, "quadratic")] = _burg_separable
for _kind in ("zero", "l1", "abs", "l1_plus_positivity"):
    _REGISTRY[("burg", _kind, "smooth")] = _newton_kept
_REGISTRY[("euclidean", "zero", "smooth")] = _newton_kept
_REGISTRY[("quartic", "zero", "none")] = _quartic_none
_REGISTRY[("quartic", "zero", "quadratic")] = _newton_kept
_REGISTRY[("quartic", "zero", "smooth")] = _newton_kept


def solve(inst):
    """Unique minimizer of the subproblem, in the interior of ``dom w``."""
    inst.kernel.check_domain(inst.anchor)
    s, kept = _fold_linear(inst)
    key = (inst.kernel.name, inst.regularizer.kind, _kept_class(kept))
    solver = _REGISTRY.get(key)
    if solver is None:
        raise UnsupportedCombination(f"no subproblem solver for {key}")
    x = solver(inst, s, kept)
    inst.kernel.check_domain(x)
    return x


def kept_component_update(inst):
    """Subproblem with a nonempty kept set (incremental proximal step)."""
    if not inst.kept:
        raise ValueError("kept set is empty")
    for comp in inst.kept:
        if comp.kind not in ("quadratic", "linear") and comp.hess is None:
            raise UnsupportedKeptComponent(f"cannot keep component {comp.index} exactly")
    return solve(inst)


# -- optimality residual ----------------------------------------------------------

def optimality_residual(inst, x):
    """``min_v ||sum grad f_i(x) + s + v + (grad w(x) - grad w(x_k))/alpha||_inf`` over ``v`` in ``dh(x)``."""
    kernel, reg = inst.kernel, inst.regularizer
    x = np.asarray(x, dtype=float)
    r = np.asarray(inst.s, dtype=float) + (kernel.grad(x) - kernel.grad(inst.anchor)) / inst.alpha
    for comp in inst.kept:
        r = r + comp.grad(x)
    kind = reg.kind
    if kind == "zero":
        v = np.zeros_like(x)
    elif reg.is_l1:
        lam = reg.weight
        nz = x != 0
        t = lam
        if reg.radius is not None and np.sum(np.abs(x)) >= reg.radius * (1 - 1e-12) and np.any(nz):
            # active ball: dh = (lam + nu) d||x||_1 with nu >= 0
            t = max(lam, float(np.mean(-r[nz] * np.sign(x[nz]))))
        v = np.where(nz, t * np.sign(x), np.clip(-r, -t, t))
    elif kind == "l1_plus_positivity":
        v = np.where(x > 0, reg.weight, np.minimum(-r, reg.weight))
    else:
        lo = np.broadcast_to(reg.lower, x.shape)
        hi = np.broadcast_to(reg.upper, x.shape)
        v = np.zeros_like(x)
        v = np.where(x <= lo, np.minimum(-r, 0.0), v)
        v = np.where(x >= hi, np.maximum(-r, 0.0), v)
        v = np.where((x <= lo) & (x >= hi), -r, v)
    return float(np.max(np.abs(r + v)))
