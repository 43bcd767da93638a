"""Legendre kernels and their Bregman distances.

Three kernels are supported:

``euclidean``
    ``w(x) = 1/2 ||x||^2`` on all of R^d.
``burg``
    ``w(x) = -sum(log x_j) + quad * ||x||^2`` on the open positive orthant.
    ``quad > 0`` is the augmented kernel used for the elastic-net model.
``quartic``
    ``w(x) = beta/4 ||x||^4 + gamma/2 ||x||^2`` on all of R^d.

All array functions accept a leading batch axis: ``x`` of shape ``(..., d)``
maps to values of shape ``(...)``.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import DegeneratePair, DomainViolation, MissingModuli

KERNEL_NAMES = ("euclidean", "burg", "quartic")

# strict positivity margin for the Burg domain test
EPS_DOM = 1e-12


@dataclass(frozen=True, eq=False)
class LegendreKernel:
    name: str
    dim: int
    beta: float = 1.0
    gamma: float = 1.0
    quad: float = 0.0
    moduli: Optional[Tuple[float, float]] = None
    box: Optional[Tuple[np.ndarray, np.ndarray]] = None
    eps_dom: float = EPS_DOM

    def __post_init__(self):
        if self.name not in KERNEL_NAMES:
            raise ValueError(f"unknown kernel {self.name!r}")
        if self.dim < 1:
            raise ValueError("kernel dimension must be positive")
        if self.name == "quartic" and (self.beta <= 0 or self.gamma <= 0):
            raise ValueError("quartic kernel needs beta > 0 and gamma > 0")
        if self.quad < 0:
            raise ValueError("quadratic augmentation must be nonnegative")
        if self.moduli is not None:
            mu_w, L_w = self.moduli
            if not (0 < mu_w <= L_w):
                raise ValueError("moduli must satisfy 0 < mu_w <= L_w")

    # -- domain -----------------------------------------------------------

    @property
    def separable(self):
        return self.name in ("euclidean", "burg")

    def in_domain(self, x):
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            return False
        if self.name == "burg":
            return bool(np.all(x > self.eps_dom))
        return True

    def check_domain(self, x):
        if not self.in_domain(x):
            raise DomainViolation(
                f"point outside the interior of dom w for kernel {self.name!r}")

    def in_box(self, x, rtol=1e-12):
        if self.box is None:
            return True
        lo, hi = self.box
        x = np.asarray(x, dtype=float)
        slack = rtol * np.maximum(1.0, np.abs(x))
        return bool(np.all(x >= lo - slack) and np.all(x <= hi + slack))

    # -- oracles ----------------------------------------------------------

    def value(self, x):
        x = np.asarray(x, dtype=float)
        self.check_domain(x)
        if self.name == "euclidean":
            return 0.5 * np.sum(x * x, axis=-1)
        if self.name == "burg":
            return -np.sum(np.log(x), axis=-1) + self.quad * np.sum(x * x, axis=-1)
        r2 = np.sum(x * x, axis=-1)
        return 0.25 * self.beta * r2 * r2 + 0.5 * self.gamma * r2

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        self.check_domain(x)
        if self.name == "euclidean":
            return x.copy()
        if self.name == "burg":
            return -1.0 / x + 2.0 * self.quad * x
        r2 = np.sum(x * x, axis=-1, keepdims=True)
        return (self.beta * r2 + self.gamma) * x

    def hess(self, x):
        """Hessian matrix at a single point ``x`` of shape ``(d,)``."""
        x = np.asarray(x, dtype=float)
        self.check_domain(x)
        d = x.shape[-1]
        if self.name == "euclidean":
            return np.eye(d)
        if self.name == "burg":
            return np.diag(1.0 / x**2 + 2.0 * self.quad)
        r2 = x @ x
        return (self.beta * r2 + self.gamma) * np.eye(d) + 2.0 * self.beta * np.outer(x, x)

    def bregman(self, y, x):
        """``D_w(y, x) = w(y) - w(x) - <grad w(x), y - x>``."""
        y = np.asarray(y, dtype=float)
        x = np.asarray(x, dtype=float)
        self.check_domain(y)
        self.check_domain(x)
        diff = y - x
        sq = np.sum(diff * diff, axis=-1)
        if self.name == "euclidean":
            return 0.5 * sq
        if self.name == "burg":
            t = diff / x
            # t - log1p(t) avoids cancellation for y close to x
            return np.sum(t - np.log1p(t), axis=-1) + self.quad * sq
        # closed form of the quartic part, written without cancellation
        gap = np.sum(diff * (y + x), axis=-1)
        r2x = np.sum(x * x, axis=-1)
        quartic = 0.25 * gap * gap + 0.5 * sq * r2x
        return self.beta * quartic + 0.5 * self.gamma * sq

    # -- delay amplification ----------------------------------------------

    def effective_moduli(self):
        """``(mu_w, L_w)``, explicit or derived from the declared box."""
        if self.moduli is not None:
            return self.moduli
        if self.name == "euclidean":
            return (1.0, 1.0)
        if self.box is None:
            return None
        lo, hi = self.box
        if self.name == "burg":
            return (1.0 / np.max(hi) ** 2 + 2.0 * self.quad,
                    1.0 / np.min(lo) ** 2 + 2.0 * self.quad)
        rmax2 = float(np.sum(np.maximum(lo**2, hi**2)))
        return (self.gamma, self.gamma + 3.0 * self.beta * rmax2)

    def ell(self, k):
        """Amplification function bounding a k-step Bregman chain.

        ``ell(1) = 1`` always; the Euclidean kernel uses the identity and
        any other kernel uses ``k * L_w / mu_w`` from its moduli.
        """
        if k < 1:
            raise ValueError("ell is defined for k >= 1")
        if k == 1:
            return 1.0
        if self.name == "euclidean" and self.moduli is None:
            return float(k)
        moduli = self.effective_moduli()
        if moduli is None:
            raise MissingModuli(
                f"kernel {self.name!r} needs moduli or a box to evaluate ell({k})")
        mu_w, L_w = moduli
        return k * L_w / mu_w


# -- constructors -----------------------------------------------------------

def _box(lower, upper, dim):
    lo = np.broadcast_to(np.asarray(lower, dtype=float), (dim,)).copy()
    hi = np.broadcast_to(np.asarray(upper, dtype=float), (dim,)).copy()
    if np.any(lo > hi):
        raise ValueError("box lower bound exceeds upper bound")
    return lo, hi


def euclidean(dim):
    return LegendreKernel("euclidean", dim)


def burg(dim, box=None, quad=0.0, moduli=None):
    if box is not None:
        box = _box(box[0], box[1], dim)
        if np.any(box[0] <= 0):
            raise ValueError("Burg box must lie in the positive orthant")
    return LegendreKernel("burg", dim, quad=quad, box=box, moduli=moduli)


def quartic(dim, beta=1.0, gamma=1.0, box=None, moduli=None):
    if box is not None:
        box = _box(box[0], box[1], dim)
    return LegendreKernel("quartic", dim, beta=beta, gamma=gamma, box=box,
                          moduli=moduli)


def from_config(record):
    """Build a kernel from ``{name, dimension, beta, gamma, box_lower, box_upper}``."""
    name = record["name"]
    dim = int(record["dimension"])
    box = None
    if record.get("box_lower") is not None or record.get("box_upper") is not None:
        box = (record["box_lower"], record["box_upper"])
    if name == "euclidean":
        return euclidean(dim)
    if name == "burg":
        return burg(dim, box=box, quad=float(record.get("quad", 0.0)))
    if name == "quartic":
        return quartic(dim, beta=float(record.get("beta", 1.0)),
                       gamma=float(record.get("gamma", 1.0)), box=box)
    raise ValueError(f"unknown kernel {name!r}")


# -- functional interface ---------------------------------------------------

def eval_kernel(kernel, x):
    return kernel.value(x)


def grad_kernel(kernel, x):
    return kernel.grad(x)


def bregman(kernel, y, x):
    return kernel.bregman(y, x)


def ell(kernel, k):
    return kernel.ell(k)


def three_point_residual(kernel, x, y, z):
    """Absolute defect of the three-point identity at ``(x, y, z)``."""
    lhs = kernel.bregman(x, z) - kernel.bregman(x, y) - kernel.bregman(y, z)
    rhs = np.sum((kernel.grad(y) - kernel.grad(z)) * (np.asarray(x) - np.asarray(y)),
                 axis=-1)
    return np.abs(lhs - rhs)


def symmetry_ratio_min(kernel, sampler, n, rng=None):
    """Smallest sampled value of ``D_w(x, y) / D_w(y, x)``.

    ``sampler(n, rng)`` must return two arrays of shape ``(n, d)``. The
    result is an upper estimate of the symmetry coefficient.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(rng)
    xs, ys = sampler(n, rng)
    if np.any(np.all(xs == ys, axis=-1)):
        raise DegeneratePair("sampler produced coinciding points")
    num = kernel.bregman(xs, ys)
    den = kernel.bregman(ys, xs)
    return float(np.min(num / den))


def uniform_pairs(lower, upper, dim):
    """Pair sampler drawing both points uniformly from ``[lower, upper]^dim``."""
    def sampler(n, rng):
        xs = rng.uniform(lower, upper, size=(n, dim))
        ys = rng.uniform(lower, upper, size=(n, dim))
        return xs, ys
    return sampler
