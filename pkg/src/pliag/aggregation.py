"""Delay schedules, the stored-gradient table and component selection policies."""

from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainViolation, Uninitialized

DELAY_KINDS = ("zero", "constant", "cyclic", "uniform_random")
SELECTION_KINDS = ("full_aggregate", "iap_cyclic", "iap_fixed", "custom")


@dataclass(frozen=True)
class DelaySchedule:
    """Bounded delays ``tau_k^n in {0, ..., tau}``.

    ``constant`` always returns ``tau``; ``cyclic`` refreshes component ``n``
    every ``tau + 1`` iterations in round-robin order; ``uniform_random``
    draws each delay from a counter-based generator keyed by ``(seed, k)``.
    Delays are clipped to ``k``: the iterate ``x_{k - tau}`` with a negative
    index is ``x_0`` either way.
    """
    kind: str = "zero"
    tau: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in DELAY_KINDS:
            raise ValueError(f"unknown delay kind {self.kind!r}")
        if self.tau < 0:
            raise ValueError("delay bound must be nonnegative")
        if self.kind == "zero" and self.tau != 0:
            raise ValueError("zero schedule must have tau = 0")

    def delays_at(self, k, N):
        if k < 0:
            raise ValueError("iteration index must be nonnegative")
        if self.kind == "zero" or self.tau == 0:
            raw = np.zeros(N, dtype=int)
        elif self.kind == "constant":
            raw = np.full(N, self.tau, dtype=int)
        elif self.kind == "cyclic":
            raw = (k - np.arange(N)) % (self.tau + 1)
        else:
            gen = np.random.Generator(np.random.Philox(key=self.seed, counter=k))
            raw = gen.integers(0, self.tau + 1, size=N)
        return np.minimum(raw, k).astype(int)


def delays_at(schedule, k, N):
    return schedule.delays_at(k, N)


@dataclass(frozen=True)
class SelectionPolicy:
    """Per-iteration split of the components into kept ``I_k`` and linearized ``J_k``."""
    kind: str = "full_aggregate"
    index: Optional[int] = None
    custom: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in SELECTION_KINDS:
            raise ValueError(f"unknown selection policy {self.kind!r}")
        if self.kind == "iap_fixed" and self.index is None:
            raise ValueError("iap_fixed needs an index")
        if self.kind == "custom" and self.custom is None:
            raise ValueError("custom policy needs a callable")

    def partition(self, k, N):
        """Return ``(I, J)`` as sorted tuples of 0-based indices."""
        if self.kind == "full_aggregate":
            kept = ()
        elif self.kind == "iap_cyclic":
            kept = (k % N,)
        elif self.kind == "iap_fixed":
            kept = (self.index,)
        else:
            kept = tuple(sorted(set(self.custom(k, N))))
        if any(i < 0 or i >= N for i in kept):
            raise ValueError("kept index out of range")
        linear = tuple(j for j in range(N) if j not in kept)
        if not linear:
            raise ValueError("J_k must be nonempty")
        return kept, linear

    def keeps_components(self, N):
        if self.kind == "full_aggregate":
            return False
        if self.kind == "custom":
            return any(self.partition(k, N)[0] for k in range(N))
        return True

    def aggregated_L(self, Ls):
        """``max_k sum_{j in J_k} L_j`` over one selection period."""
        Ls = np.asarray(Ls, dtype=float)
        N = Ls.size
        total = float(np.sum(Ls))
        if self.kind == "full_aggregate":
            return total
        if self.kind == "iap_cyclic":
            return max(sum(Ls[j] for j in self.partition(k, N)[1]) for k in range(N))
        if self.kind == "iap_fixed":
            return sum(Ls[j] for j in self.partition(0, N)[1])
        return max(sum(Ls[j] for j in self.partition(k, N)[1]) for k in range(max(N, 16)))


class IterateHistory:
    """The last ``tau + 1`` iterates, pre-filled so that ``x_j = x_0`` for ``j < 0``."""

    def __init__(self, x0, tau):
        self.tau = tau
        self.k = 0
        self._window = deque([np.array(x0, dtype=float)] * (tau + 1), maxlen=tau + 1)

    def push(self, x):
        self._window.append(np.array(x, dtype=float))
        self.k += 1

    def get(self, j):
        if j > self.k or j < self.k - self.tau:
            raise IndexError(f"iterate {j} outside the retained window at k={self.k}")
        return self._window[self.tau - (self.k - j)]


class GradientTable:
    """Stored component gradients ``grad f_n(x_{e_n})`` with evaluation iterations ``e_n``."""

    def __init__(self, N, dim):
        self.N = N
        self.dim = dim
        self.grads = np.zeros((N, dim))
        self.evals = np.full(N, -1, dtype=int)
        self._known = np.zeros(N, dtype=bool)

    def store(self, n, grad, at):
        self.grads[n] = grad
        self.evals[n] = at
        self._known[n] = True

    def aggregate(self, J):
        s = np.zeros(self.dim)
        for j in sorted(J):
            if not self._known[j]:
                raise Uninitialized(f"component {j} has no stored gradient")
            s = s + self.grads[j]
        return s

    def staleness(self, k, J):
        if not J:
            return 0
        return int(max(k - max(self.evals[j], 0) for j in J))


def aggregate(table, J):
    return table.aggregate(J)


def refresh(table, problem, history, k, delays, J):
    """Store ``grad f_j(x_{k - tau_k^j})`` for every ``j`` in ``J``."""
    for j in sorted(J):
        at = max(k - int(delays[j]), 0)
        if table._known[j] and table.evals[j] == at:
            continue
        x = history.get(at)
        if not problem.kernel.in_domain(x):
            raise DomainViolation(f"iterate {at} left the domain of w")
        table.store(j, problem.components[j].grad(x), at)
    return table
