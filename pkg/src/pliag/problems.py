"""Component oracles, regularizers and the bundled problem instances."""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize

from . import kernels as kn
from .errors import (DomainViolation, InvalidData, InvalidRadius,
                     SingularInput)

REGULARIZER_KINDS = ("zero", "l1", "l1_plus_positivity", "indicator_box", "abs")


# -- regularizers -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Regularizer:
    """Nonsmooth convex term ``h``.

    ``l1`` and ``abs`` are ``weight * ||x||_1``, optionally restricted to the
    l1 ball of ``radius``. ``l1_plus_positivity`` adds the constraint
    ``x >= 0``; ``indicator_box`` is the indicator of ``[lower, upper]``.
    """
    kind: str
    weight: float = 1.0
    radius: Optional[float] = None
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in REGULARIZER_KINDS:
            raise ValueError(f"unknown regularizer kind {self.kind!r}")
        if self.weight < 0:
            raise ValueError("regularizer weight must be nonnegative")

    @property
    def is_l1(self):
        return self.kind in ("l1", "abs")

    @property
    def separable(self):
        return not (self.is_l1 and self.radius is not None)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return 0.0
        if self.is_l1:
            norm1 = float(np.sum(np.abs(x)))
            if self.radius is not None and norm1 > self.radius * (1 + 1e-12):
                return np.inf
            return self.weight * norm1
        if self.kind == "l1_plus_positivity":
            if np.any(x < 0):
                return np.inf
            return self.weight * float(np.sum(x))
        lo, hi = self.lower, self.upper
        if np.any(x < lo) or np.any(x > hi):
            return np.inf
        return 0.0


def zero_reg():
    return Regularizer("zero", weight=0.0)


def l1_reg(weight, radius=None):
    return Regularizer("l1", weight=float(weight), radius=radius)


def abs_reg(weight=1.0):
    return Regularizer("abs", weight=float(weight))


def l1_positive_reg(weight):
    return Regularizer("l1_plus_positivity", weight=float(weight))


def box_reg(lower, upper):
    return Regularizer("indicator_box", weight=0.0,
                       lower=np.asarray(lower, dtype=float),
                       upper=np.asarray(upper, dtype=float))


# -- components -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ComponentOracle:
    """One smooth convex summand ``f_n`` with its relative-smoothness constant.

    ``kind`` is ``"quadratic"`` when ``f(x) = 1/2 x'Px + q'x + c`` (``P``,
    ``q``, ``c`` are then stored), ``"linear"`` for ``P = 0`` and
    ``"smooth"`` otherwise.
    """
    index: int
    value: Callable
    grad: Callable
    L: float
    hess: Optional[Callable] = None
    kind: str = "smooth"
    P: Optional[np.ndarray] = None
    q: Optional[np.ndarray] = None
    c: float = 0.0
    name: str = ""


def quadratic_component(index, P, q, c, L, name=""):
    P = np.atleast_2d(np.asarray(P, dtype=float))
    q = np.asarray(q, dtype=float).reshape(-1)

    def value(x):
        return 0.5 * x @ P @ x + q @ x + c

    def grad(x):
        return P @ x + q

    def hess(x):
        return P

    kind = "linear" if not np.any(P) else "quadratic"
    return ComponentOracle(index, value, grad, float(L), hess=hess, kind=kind,
                           P=P, q=q, c=float(c), name=name)


# -- problem ----------------------------------------------------------------

@dataclass(frozen=True)
class Growth:
    """Declared growth condition of ``Phi`` around the solution set.

    ``quadratic``: ``Phi - Phi* >= mu/2 d^2``; ``bregman``:
    ``Phi - Phi* >= mu min_z D_w(z, .)``; ``holder``:
    ``Phi - Phi* >= mu/2 d^(2 theta)``.
    """
    mode: str
    mu: float
    theta: float = 1.0
    note: str = ""


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    name: str
    components: tuple
    regularizer: Regularizer
    kernel: kn.LegendreKernel
    solutions: Optional[np.ndarray] = None
    optimal_value: Optional[float] = None
    growth: Optional[Growth] = None
    x0: Optional[np.ndarray] = None
    params: dict = field(default_factory=dict)

    @property
    def N(self):
        return len(self.components)

    @property
    def dim(self):
        return self.kernel.dim

    @property
    def Ls(self):
        return np.array([c.L for c in self.components])

    @property
    def L_sum(self):
        return float(np.sum(self.Ls))

    def smooth_value(self, x):
        total = 0.0
        for comp in self.components:
            total += comp.value(x)
        return total

    def grad_F(self, x):
        # ascending-index reduction, same order as the gradient table
        g = np.zeros(self.dim)
        for comp in self.components:
            g = g + comp.grad(x)
        return g

    def objective(self, x):
        x = np.asarray(x, dtype=float)
        self.kernel.check_domain(x)
        h = self.regularizer.value(x)
        if h == np.inf:
            return np.inf
        return self.smooth_value(x) + h


def objective(problem, x):
    return problem.objective(x)


# -- linear algebra helpers ---------------------------------------------------

def operator_norm(M, tol=1e-10, max_iter=100000, seed=0):
    """Spectral norm by power iteration on ``M'M``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if not np.any(M):
        return 0.0
    v = np.random.default_rng(seed).standard_normal(M.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iter):
        u = M.T @ (M @ v)
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return 0.0
        v = u / nu
        new = np.sqrt(nu)
        if abs(new - sigma) <= tol * new:
            return float(new)
        sigma = new
    return float(sigma)


def smallest_singular_value(M):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] < M.shape[1]:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[-1])


def load_matrix(path):
    """Dense header-free CSV, one row per line."""
    return np.loadtxt(path, delimiter=",", ndmin=2)


def load_vector(path):
    return np.loadtxt(path, delimiter=",", ndmin=1).reshape(-1)


# -- shrink -------------------------------------------------------------------

def shrink(s, mu):
    s = np.asarray(s, dtype=float)
    return np.sign(s) * np.maximum(np.abs(s) - mu, 0.0)


def soft_threshold(v, t):
    return shrink(v, t)


def project_l1_ball(v, radius):
    """Euclidean projection onto ``{x : ||x||_1 <= radius}``."""
    v = np.asarray(v, dtype=float)
    if np.sum(np.abs(v)) <= radius:
        return v.copy()
    u = np.sort(np.abs(v))[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, u.size + 1)
    rho = np.nonzero(u * ks > css - radius)[0][-1]
    theta = (css[rho] - radius) / (rho + 1.0)
    return shrink(v, theta)


# -- lasso --------------------------------------------------------------------

def _lasso_kkt_solution(A, b, lam, iters=20000):
    """High-accuracy lasso minimizer: FISTA followed by a support solve.

    Returns ``(x, unique)``.
    """
    d = A.shape[1]
    Lf = operator_norm(A) ** 2
    if Lf == 0.0:
        return np.zeros(d), True
    step = 1.0 / Lf
    x = np.zeros(d)
    y = x.copy()
    t = 1.0
    for _ in range(iters):
        x_new = shrink(y - step * (A.T @ (A @ y - b)), step * lam)
        if np.max(np.abs(x_new - x)) <= 1e-15 * max(1.0, np.max(np.abs(x_new))):
            x = x_new
            break
        t_new = 0.5 * (1 + np.sqrt(1 + 4 * t * t))
        y = x_new + ((t - 1) / t_new) * (x_new - x)
        x, t = x_new, t_new

    support = np.abs(x) > 1e-9 * max(1.0, np.max(np.abs(x)))
    unique = True
    if np.any(support):
        AS = A[:, support]
        sigma = np.sign(x[support])
        G = AS.T @ AS
        if np.linalg.matrix_rank(G) < G.shape[0]:
            unique = False
        else:
            xs = np.linalg.solve(G, AS.T @ b - lam * sigma)
            if np.all(np.sign(xs) == sigma):
                x = np.zeros(d)
                x[support] = xs
    else:
        x = np.zeros(d)
    corr = np.abs(A.T @ (b - A @ x))
    off = ~support
    if np.any(off) and np.max(corr[off]) >= lam * (1 - 1e-9):
        unique = False
    return x, unique


def make_lasso(A, b, lam, radius, growth_samples=4000, seed=0):
    """``1/2 ||Ax - b||^2 + lam ||x||_1`` over the l1 ball of ``radius``.

    Rows of ``A`` become the components. The quadratic-growth constant is
    estimated by sampling (safety factor 0.9).
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    if A.shape[0] != b.size:
        raise InvalidData("A and b sizes do not match")
    if lam <= 0:
        raise InvalidData("lambda must be positive")
    if not radius > (b @ b) / (2 * lam):
        raise InvalidRadius(f"radius must exceed ||b||^2/(2 lam) = {(b @ b) / (2 * lam)}")
    m, d = A.shape
    comps = []
    for i in range(m):
        a = A[i]
        comps.append(quadratic_component(i, np.outer(a, a), -b[i] * a, 0.5 * b[i] ** 2,
                                         L=float(a @ a), name=f"row{i}"))
    reg = l1_reg(lam, radius=float(radius))
    kernel = kn.euclidean(d)
    x_star, unique = _lasso_kkt_solution(A, b, lam)
    provisional = ProblemSpec("lasso", tuple(comps), reg, kernel, x0=np.zeros(d),
                              params=dict(A=A, b=b, lam=lam, radius=radius))
    phi_star = provisional.objective(x_star)
    solutions = x_star[None, :] if unique else None
    growth = None
    if solutions is not None:
        from .diagnostics import quadratic_growth_estimate
        pts = _growth_points_l1(x_star, radius, d, growth_samples, seed)
        problem = _replace(provisional, solutions=solutions, optimal_value=phi_star)
        mu_hat = quadratic_growth_estimate(problem, solutions, pts, polish=10,
                                           project=lambda y: project_l1_ball(y, radius))
        growth = Growth("quadratic", mu_hat, note="sampled estimate on the l1 ball")
    return _replace(provisional, solutions=solutions, optimal_value=phi_star,
                    growth=growth)


def _growth_points_l1(center, radius, d, n, seed):
    """Points of the l1 ball: half at log-spaced distances from ``center``, half spread over the ball."""
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((n, d))
    # a quarter of the directions are sparse so that zero coordinates stay put
    mask = rng.random((n, d)) < 0.5
    dirs[: n // 4] *= mask[: n // 4]
    norms = np.linalg.norm(dirs, axis=1)
    dirs = dirs[norms > 0] / norms[norms > 0, None]
    scales = np.exp(rng.uniform(np.log(1e-4), np.log(2 * radius), dirs.shape[0]))
    near = center + scales[:, None] * dirs
    spread = rng.standard_normal((n, d))
    spread *= radius * rng.uniform(0, 1, (n, 1)) / np.sum(np.abs(spread), axis=1, keepdims=True)
    pts = np.concatenate([near[: n // 2], spread[: n - n // 2]])
    return pts[np.sum(np.abs(pts), axis=1) <= radius]


def _radial_points(center, r_max, n, rng):
    """Points at log-uniform distances in ``[1e-4, r_max]`` from ``center``."""
    dirs = rng.standard_normal((n, center.size))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = np.exp(rng.uniform(np.log(1e-4), np.log(r_max), n))
    return center + radii[:, None] * dirs


def _replace(problem, **changes):
    from dataclasses import replace
    return replace(problem, **changes)


# -- Poisson / elastic net ----------------------------------------------------

def _poisson_component(index, a, b_i):
    def value(x):
        ax = a @ x
        return ax - b_i * np.log(ax)

    def grad(x):
        ax = a @ x
        return (1.0 - b_i / ax) * a

    def hess(x):
        ax = a @ x
        return (b_i / ax**2) * np.outer(a, a)

    return ComponentOracle(index, value, grad, float(b_i), hess=hess,
                           kind="smooth", name=f"poisson{index}")


def _newton_positive(grad, hess, x, tol=1e-13, max_iter=200):
    """Damped Newton on the open positive orthant; ``ok`` is False without a unique interior minimizer."""
    for _ in range(max_iter):
        g = grad(x)
        if np.max(np.abs(g)) <= tol * max(1.0, np.max(np.abs(x))):
            return x, True
        H = hess(x)
        if np.linalg.matrix_rank(H) < H.shape[0]:
            return x, False
        step = np.linalg.solve(H, g)
        t = 1.0
        while np.any(x - t * step <= 0):
            t *= 0.5
        x = x - t * step
    return x, False


def make_poisson_elastic_net(a, b, beta=0.0, mu_l1=0.0, box=None, x0=None):
    """Poisson likelihood plus ``beta ||x||^2 + mu_l1 ||x||_1`` on ``x >= 0``.

    Rows of ``a`` are the nonnegative measurement vectors. With ``beta > 0``
    the quadratic becomes an extra component of index ``m`` and the kernel
    is Burg's entropy plus ``(beta/L) ||x||^2``, ``L = sum(b)``.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.shape[0] != b.size:
        raise InvalidData("a and b sizes do not match")
    if np.any(a < 0) or np.any(~np.any(a != 0, axis=1)):
        raise InvalidData("measurement vectors must be nonnegative and nonzero")
    if np.any(b <= 0):
        raise InvalidData("counts b_i must be positive")
    if beta < 0 or mu_l1 < 0:
        raise InvalidData("beta and mu_l1 must be nonnegative")
    m, n = a.shape
    L = float(np.sum(b))
    comps = [_poisson_component(i, a[i], b[i]) for i in range(m)]
    if beta > 0:
        comps.append(quadratic_component(m, 2.0 * beta * np.eye(n), np.zeros(n), 0.0,
                                         L=L, name="ridge"))
    kernel = kn.burg(n, box=box, quad=beta / L if beta > 0 else 0.0)
    reg = l1_positive_reg(mu_l1)
    if x0 is None:
        x0 = np.ones(n)
    problem = ProblemSpec("poisson_elastic_net", tuple(comps), reg, kernel,
                          x0=np.asarray(x0, dtype=float),
                          params=dict(a=a, b=b, beta=beta, mu_l1=mu_l1, L=L))

    def grad(x):
        return problem.grad_F(x) + mu_l1

    def hess(x):
        H = np.zeros((n, n))
        for comp in comps:
            H += comp.hess(x)
        return H

    x_star, ok = _newton_positive(grad, hess, np.ones(n))
    if ok:
        return _replace(problem, solutions=x_star[None, :],
                        optimal_value=problem.objective(x_star))
    # minimizer on the boundary of the orthant: no interior solution to store
    return problem


# -- quartic (relatively strongly convex) -------------------------------------

def make_quartic_problem(E, A, C, b, d, box=None, split=False, x0=None,
                         growth_samples=4000, seed=0):
    """``1/4 ||Ex||^4 + 1/4 ||Ax - b||_4^4 + 1/2 ||Cx - d||^2`` with the quartic kernel.

    ``split=True`` exposes the three terms as separate components (needed
    by incremental proximal schemes, which keep one of them).
    """
    E = np.atleast_2d(np.asarray(E, dtype=float))
    A = np.atleast_2d(np.asarray(A, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    dvec = np.asarray(d, dtype=float).reshape(-1)
    n = E.shape[1]
    if A.shape[1] != n or C.shape[1] != n:
        raise InvalidData("E, A and C must have the same number of columns")
    if A.shape[0] != b.size or C.shape[0] != dvec.size:
        raise InvalidData("b and d must match the rows of A and C")
    sigma_E = smallest_singular_value(E)
    sigma_C = smallest_singular_value(C)
    if sigma_E <= 0 or sigma_C <= 0:
        raise SingularInput("E and C need positive smallest singular values")
    nE, nA, nC, nb = operator_norm(E), operator_norm(A), operator_norm(C), float(np.linalg.norm(b))
    L_E = 3 * nE**4
    L_A = 3 * nA**4 + 6 * nA**3 * nb + 3 * nA**2 * nb**2
    L_C = nC**2
    L = L_E + L_A + L_C
    mu_rel = min(sigma_E**4 / 3.0, sigma_C**2)
    EtE = E.T @ E

    def fE(x):
        r = E @ x
        return 0.25 * (r @ r) ** 2

    def gE(x):
        r = E @ x
        return (r @ r) * (E.T @ r)

    def hE(x):
        r = E @ x
        Er = E.T @ r
        return (r @ r) * EtE + 2.0 * np.outer(Er, Er)

    def fA(x):
        r = A @ x - b
        return 0.25 * np.sum(r**4)

    def gA(x):
        r = A @ x - b
        return A.T @ r**3

    def hA(x):
        r = A @ x - b
        return A.T @ (3.0 * r[:, None] ** 2 * A)

    def fC(x):
        r = C @ x - dvec
        return 0.5 * (r @ r)

    def gC(x):
        return C.T @ (C @ x - dvec)

    def hC(x):
        return C.T @ C

    if split:
        comps = (ComponentOracle(0, fE, gE, L_E, hess=hE, name="quartic_E"),
                 ComponentOracle(1, fA, gA, L_A, hess=hA, name="quartic_A"),
                 ComponentOracle(2, fC, gC, L_C, hess=hC, name="quadratic_C"))
    else:
        comps = (ComponentOracle(
            0, lambda x: fE(x) + fA(x) + fC(x), lambda x: gE(x) + gA(x) + gC(x), L,
            hess=lambda x: hE(x) + hA(x) + hC(x), name="quartic_F"),)
    kernel = kn.quartic(n, box=box)
    if x0 is None:
        x0 = np.ones(n)
    problem = ProblemSpec("quartic", comps, zero_reg(), kernel,
                          x0=np.asarray(x0, dtype=float),
                          params=dict(E=E, A=A, C=C, b=b, d=dvec, L=L,
                                      mu_relative=mu_rel, sigma_E=sigma_E,
                                      sigma_C=sigma_C))

    # F is strictly convex (sigma_C > 0): Newton from the origin
    x = np.zeros(n)
    for _ in range(200):
        g = gE(x) + gA(x) + gC(x)
        if np.max(np.abs(g)) <= 1e-14 * max(1.0, np.max(np.abs(x))):
            break
        H = hE(x) + hA(x) + hC(x)
        x = x - np.linalg.solve(H, g)
    solutions = x[None, :]
    phi_star = problem.objective(x)
    problem = _replace(problem, solutions=solutions, optimal_value=phi_star)

    # mu_rel is relative strong convexity measured with D_w(y, x*); the growth
    # condition needs D_w(x*, y). Keep mu_rel when sampling far and near
    # confirms it, then try the symmetry-scaled mu_rel/5, and otherwise use
    # a polished sampled estimate.
    from .diagnostics import bdg_estimate, bregman_growth_margin
    rng = np.random.default_rng(seed)
    scale = max(1.0, float(np.max(np.abs(x))), float(np.max(np.abs(x0))))
    pts = _radial_points(x, 1e3 * scale, growth_samples, rng)
    if bregman_growth_margin(problem, solutions, pts, mu_rel) >= -1e-9:
        growth = Growth("bregman", mu_rel, note="relative strong convexity constant, sample-checked")
    elif bregman_growth_margin(problem, solutions, pts, mu_rel / 5.0) >= -1e-9:
        growth = Growth("bregman", mu_rel / 5.0,
                        note="relative constant scaled by the symmetry lower bound 1/5")
    else:
        mu_hat = bdg_estimate(problem, kernel, solutions, pts, polish=10)
        growth = Growth("bregman", mu_hat, note="sampled estimate")
    return _replace(problem, growth=growth)


# -- compressed-sensing dual --------------------------------------------------

def make_dual_cs(A, b, alpha, mu, growth_samples=4000, seed=0):
    """``-b'x + alpha/2 ||shrink_mu(A'x)||^2`` split over the columns of ``A``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    if alpha <= 0 or mu <= 0:
        raise InvalidData("alpha and mu must be positive")
    d, m = A.shape
    if b.size != d:
        raise InvalidData("b must have as many entries as A has rows")
    comps = [quadratic_component(0, np.zeros((d, d)), -b, 0.0, L=0.0, name="linear")]
    for j in range(m):
        comps.append(_shrink_component(j + 1, A[:, j], alpha, mu))
    problem = ProblemSpec("dual_cs", tuple(comps), zero_reg(), kn.euclidean(d),
                          x0=np.zeros(d), params=dict(A=A, b=b, alpha=alpha, mu=mu))
    x_star, phi_star, unique = _dual_cs_solve(problem, A, b, alpha, mu)
    if x_star is None:
        if not np.any(A) and not np.any(b):
            return _replace(problem, optimal_value=0.0)
        return problem
    if not unique:
        return _replace(problem, optimal_value=phi_star)
    solutions = x_star[None, :]
    problem = _replace(problem, solutions=solutions, optimal_value=phi_star)
    from .diagnostics import quadratic_growth_estimate
    rng = np.random.default_rng(seed)
    scale = max(1.0, float(np.max(np.abs(x_star))))
    pts = _radial_points(x_star, 1e3 * scale, growth_samples, rng)
    mu_hat = quadratic_growth_estimate(problem, solutions, pts, polish=10)
    return _replace(problem, growth=Growth("quadratic", mu_hat, note="sampled estimate"))


def _shrink_component(index, a, alpha, mu):
    def value(x):
        s = shrink(a @ x, mu)
        return 0.5 * alpha * float(s * s)

    def grad(x):
        return alpha * float(shrink(a @ x, mu)) * a

    def hess(x):
        active = abs(a @ x) > mu
        return alpha * active * np.outer(a, a)

    return ComponentOracle(index, value, grad, float(alpha * (a @ a)), hess=hess,
                           kind="smooth", name=f"shrink{index}")


def _dual_cs_solve(problem, A, b, alpha, mu):
    """Minimize the dual objective: BFGS, then an exact Newton step on the final piece.

    Returns ``(x, value, unique)``; ``x`` is None when no minimizer was found.
    """
    d = A.shape[0]
    res = minimize(problem.smooth_value, np.zeros(d), jac=problem.grad_F, method="BFGS",
                   options=dict(gtol=1e-12, maxiter=10000))
    x = res.x
    if not np.all(np.isfinite(x)) or np.max(np.abs(problem.grad_F(x))) > 1e-6:
        return None, None, False
    for _ in range(20):
        active = np.abs(A.T @ x) > mu
        H = alpha * A[:, active] @ A[:, active].T
        if np.linalg.matrix_rank(H) < d:
            return x, problem.objective(x), False
        x_new = x - np.linalg.solve(H, problem.grad_F(x))
        same_piece = np.array_equal(np.abs(A.T @ x_new) > mu, active)
        x = x_new
        if same_piece:
            break
    return x, problem.objective(x), True


# -- Hölderian toy ------------------------------------------------------------

def make_holder_toy(eps, lipschitz=None):
    """``|x| + eps x^2`` in one dimension, sharp (theta = 1/2) at zero.

    ``lipschitz`` defaults to ``2 eps``; for ``eps = 0`` any positive bound is
    valid and ``1.0`` is used.
    """
    if eps < 0:
        raise InvalidData("eps must be nonnegative")
    if lipschitz is None:
        lipschitz = 2.0 * eps if eps > 0 else 1.0
    comp = quadratic_component(0, [[2.0 * eps]], [0.0], 0.0, L=lipschitz, name="eps_x2")
    return ProblemSpec("holder_toy", (comp,), abs_reg(1.0), kn.euclidean(1),
                       solutions=np.zeros((1, 1)), optimal_value=0.0,
                       growth=Growth("holder", 1.0, theta=0.5,
                                     note="valid on |x| <= 1"),
                       x0=np.array([0.9]), params=dict(eps=eps))


# -- relative smoothness ------------------------------------------------------

def relative_smoothness_margin(component, kernel, sampler, n, rng=None, L=None):
    """Smallest sampled slack of ``f(y) <= f(x) + <grad f(x), y - x> + L D_w(y, x)``."""
    if n < 1:
        raise ValueError("need at least one sample")
    L = component.L if L is None else L
    rng = np.random.default_rng(rng)
    xs, ys = sampler(n, rng)
    worst = np.inf
    for x, y in zip(xs, ys):
        if not (kernel.in_domain(x) and kernel.in_domain(y)):
            raise DomainViolation("sampler produced a point outside dom w")
        slack = (component.value(x) + component.grad(x) @ (y - x)
                 + L * kernel.bregman(y, x) - component.value(y))
        worst = min(worst, float(slack))
    return worst
