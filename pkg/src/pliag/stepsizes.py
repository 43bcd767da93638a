"""Step-size policies and the theoretical rate factors they certify."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

STEP_MODES = ("sublinear", "linear", "piag_holder", "manual")


def _identity_ell(k):
    return float(k)


def _as_ell(ell):
    if ell is None:
        return _identity_ell
    if hasattr(ell, "ell"):
        return ell.ell
    return ell


def _root_minus_one(x, p):
    """``(1 + x)^(1/p) - 1`` without cancellation, polished by one Newton step."""
    r = np.expm1(np.log1p(x) / p)
    # Newton on g(r) = (1 + r)^p - (1 + x)
    g = np.expm1(p * np.log1p(r)) - x
    return float(r - g / (p * (1.0 + r) ** (p - 1)))


def sublinear_step(L, tau, ell=None):
    """Largest constant step with a sublinear guarantee: ``2 / (L ell(tau+1) (tau+1)(tau+2))``."""
    if L <= 0 or tau < 0:
        raise ValueError("need L > 0 and tau >= 0")
    ell = _as_ell(ell)
    return 2.0 / (L * ell(tau + 1) * (tau + 1) * (tau + 2))


def linear_step(L, mu, tau, ell=None):
    """``alpha0 = [(1 + (mu/L)/ell(tau+1))^(1/(tau+1)) - 1] / mu``."""
    if L <= 0 or mu <= 0 or tau < 0:
        raise ValueError("need L, mu > 0 and tau >= 0")
    ell = _as_ell(ell)
    x = (mu / L) / ell(tau + 1)
    return _root_minus_one(x, tau + 1) / mu


def piag_holder_step(L, mu, tau):
    """``alpha0 = [(1 + mu/((tau+1) L))^(1/(tau+1)) - 1] / mu`` for Euclidean PIAG."""
    if L <= 0 or mu <= 0 or tau < 0:
        raise ValueError("need L, mu > 0 and tau >= 0")
    return _root_minus_one(mu / ((tau + 1) * L), tau + 1) / mu


def rate_linear(alpha, mu):
    if alpha <= 0 or mu < 0:
        raise ValueError("need alpha > 0 and mu >= 0")
    return 1.0 / (1.0 + alpha * mu)


def rate_gap_result04(Q, tau, ell=None):
    """``1 - rate_bound_result04``, exact even when the factor rounds to 1."""
    ell = _as_ell(ell)
    return 1.0 / ((ell(tau + 1) * Q + 1.0) * (tau + 1))


def rate_gap_best(Q, tau):
    return 1.0 / (49.0 * Q * (tau + 1))


def rate_bound_result04(Q, tau, ell=None):
    """Per-iteration factor ``1 - 1/((ell(tau+1) Q + 1)(tau+1))`` at ``alpha = alpha0``."""
    return 1.0 - rate_gap_result04(Q, tau, ell)


def rate_bound_best(Q, tau):
    """The sharper Euclidean PIAG factor ``1 - 1/(49 Q (tau+1))``."""
    return 1.0 - rate_gap_best(Q, tau)


def holder_eta(alpha, mu, theta):
    if alpha <= 0 or mu <= 0 or not (0 < theta <= 1):
        raise ValueError("need alpha, mu > 0 and theta in (0, 1]")
    am = alpha * mu
    return (am * theta + 1.0) / (1.0 + am)


def condition_value(a, c, k0):
    """Left side of the recursion condition, ``c * sum_{i=0}^{k0} a^(-i)``.

    Equal to ``(c/(1-a)) (1 - a^(k0+1)) / a^k0`` for ``a < 1`` and stays
    finite at ``a = 1``.
    """
    if not (0 < a <= 1) or c < 0 or k0 < 0:
        raise ValueError("need a in (0, 1], c >= 0, k0 >= 0")
    return c * float(np.sum(a ** -np.arange(k0 + 1, dtype=float)))


def condition_holds(a, b, c, k0, rtol=1e-12):
    return condition_value(a, c, k0) <= b * (1 + rtol)


@dataclass(frozen=True)
class StepPolicy:
    """Chooses the constant step from ``(L, mu, tau, ell)``.

    ``manual`` returns ``alpha`` unchanged; the other modes return the
    largest step their rate guarantee allows.
    """
    mode: str = "sublinear"
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.mode not in STEP_MODES:
            raise ValueError(f"unknown step mode {self.mode!r}")
        if self.mode == "manual" and not (self.alpha is not None and self.alpha > 0):
            raise ValueError("manual step needs alpha > 0")

    def alpha_for(self, L, tau, ell=None, mu=None):
        if self.mode == "manual":
            return float(self.alpha)
        if self.mode == "sublinear":
            return sublinear_step(L, tau, ell)
        if mu is None:
            raise ValueError(f"step mode {self.mode!r} needs a growth constant")
        if self.mode == "linear":
            return linear_step(L, mu, tau, ell)
        return piag_holder_step(L, mu, tau)
