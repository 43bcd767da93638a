"""The incremental aggregated Bregman proximal iteration and its named special cases."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .aggregation import (DelaySchedule, GradientTable, IterateHistory,
                          SelectionPolicy, refresh)
from .errors import (ConfigError, DivergenceGuard, IncompatibleTag, MissingGrowth,
                     MissingModuli)
from .stepsizes import StepPolicy
from .subproblems import SubproblemInstance, solve

METHOD_TAGS = ("pg", "nolips", "iag", "iap", "piag", "ne_piag", "ne_iap")


@dataclass
class SolverConfig:
    """Everything a run needs. ``alpha`` is the constant step actually used.

    When the selection policy ever keeps components the step must satisfy
    ``alpha <= 1/(c L_J)`` with ``L_J`` the largest linearized constant and
    ``c = ell(2)`` for ``tau > 0`` (``c = 1`` otherwise); this is checked here.
    """
    problem: object
    selection: SelectionPolicy
    schedule: DelaySchedule
    alpha: float
    iterations: int
    x0: Optional[np.ndarray] = None
    divergence_factor: float = 1e3
    step_mode: str = "manual"
    tag: str = "custom"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError("step must be positive")
        if self.iterations < 0:
            raise ConfigError("iteration budget must be nonnegative")
        x0 = self.problem.x0 if self.x0 is None else self.x0
        if x0 is None:
            raise ConfigError("no initial point")
        self.x0 = np.array(x0, dtype=float).reshape(-1)
        if self.x0.size != self.problem.dim:
            raise ConfigError("initial point has the wrong dimension")
        if not self.problem.kernel.in_domain(self.x0):
            raise ConfigError("initial point is outside the interior of dom w")
        N = self.problem.N
        if self.selection.keeps_components(N):
            bound = self.wellposed_bound()
            if self.alpha > bound * (1 + 1e-12):
                raise ConfigError(f"step {self.alpha} exceeds the well-posedness bound {bound}")

    @property
    def tau(self):
        return self.schedule.tau

    @property
    def L(self):
        """``max_k sum_{j in J_k} L_j``."""
        return self.selection.aggregated_L(self.problem.Ls)

    def wellposed_bound(self):
        LJ = self.L
        if LJ == 0:
            return np.inf
        c = self.problem.kernel.ell(2) if self.tau > 0 else 1.0
        return 1.0 / (c * LJ)


@dataclass
class Trace:
    problem: object
    iterates: np.ndarray
    phi: np.ndarray
    bregman_steps: np.ndarray
    delays: np.ndarray
    kept: list
    alpha: float
    L: float
    tau: int
    ell_tau: float
    divergence: Optional[int] = None
    box_violations: int = 0
    notes: list = field(default_factory=list)

    @property
    def K(self):
        return len(self.phi) - 1

    def delay_max(self):
        """Largest delay among the linearized components at each step."""
        out = np.zeros(len(self.kept), dtype=int)
        for k, kept in enumerate(self.kept):
            lin = [j for j in range(self.delays.shape[1]) if j not in kept]
            out[k] = int(np.max(self.delays[k, lin])) if lin else 0
        return out


def run(config, strict=False):
    """Iterate the scheme for ``config.iterations`` steps and record the trace.

    A step whose objective value leaves ``divergence_factor * max(1, |Phi(x_0)|)``
    (or becomes non-finite) ends the run; the index is stored in
    ``trace.divergence``. With ``strict=True`` this raises :class:`DivergenceGuard`.
    """
    problem = config.problem
    kernel, reg = problem.kernel, problem.regularizer
    N, d = problem.N, problem.dim
    K, alpha, tau = config.iterations, config.alpha, config.tau
    x = config.x0.copy()
    phi0 = problem.objective(x)
    if not np.isfinite(phi0):
        raise ConfigError("objective is infinite at the initial point")
    limit = config.divergence_factor * max(1.0, abs(phi0))
    try:
        ell_tau = kernel.ell(tau + 1)
    except MissingModuli:
        ell_tau = np.nan

    history = IterateHistory(x, tau)
    table = GradientTable(N, d)
    iterates = [x.copy()]
    phi = [phi0]
    steps, delays, kept_sets = [], [], []
    divergence = None
    box_violations = 0
    for k in range(K):
        dk = config.schedule.delays_at(k, N)
        kept, lin = config.selection.partition(k, N)
        refresh(table, problem, history, k, dk, lin)
        inst = SubproblemInstance(kernel, reg, tuple(problem.components[i] for i in kept),
                                  table.aggregate(lin), x, alpha)
        x_new = solve(inst)
        steps.append(float(kernel.bregman(x_new, x)))
        delays.append(dk)
        kept_sets.append(kept)
        x = x_new
        history.push(x)
        iterates.append(x.copy())
        val = problem.objective(x)
        phi.append(val)
        if not kernel.in_box(x):
            box_violations += 1
        if not np.isfinite(val) or abs(val) > limit:
            divergence = k + 1
            if strict:
                raise DivergenceGuard(f"objective {val} at iteration {k + 1} exceeds {limit}")
            break

    trace = Trace(problem, np.array(iterates), np.array(phi), np.array(steps),
                  np.array(delays, dtype=int).reshape(-1, N), kept_sets, alpha,
                  config.L, tau, ell_tau, divergence, box_violations)
    if np.isnan(ell_tau):
        trace.notes.append("kernel has no moduli; Lyapunov terms are undefined")
    if box_violations:
        trace.notes.append(f"{box_violations} iterates left the kernel box")
    return trace


# -- named special cases -------------------------------------------------------------

def named_method(tag, problem, tau=0, K=100, delay_kind="constant", seed=0,
                 step="sublinear", alpha=None, x0=None, mu=None):
    """Configuration reproducing one of the classical schemes.

    ``pg`` and ``nolips`` force ``tau = 0``; ``iag`` and ``iap`` need the
    Euclidean kernel and ``h = 0``; ``piag`` needs the Euclidean kernel;
    the ``ne_*`` variants need a non-Euclidean kernel. ``iap`` and ``ne_iap``
    keep component ``k mod N`` exactly.
    """
    if tag not in METHOD_TAGS:
        raise IncompatibleTag(f"unknown method {tag!r}")
    euclid = problem.kernel.name == "euclidean"
    h_zero = problem.regularizer.kind == "zero"
    if tag in ("pg", "iag", "iap", "piag") and not euclid:
        raise IncompatibleTag(f"{tag} needs the Euclidean kernel")
    if tag in ("ne_piag", "ne_iap") and euclid:
        raise IncompatibleTag(f"{tag} needs a non-Euclidean kernel")
    if tag in ("iag", "iap", "ne_iap") and not h_zero:
        raise IncompatibleTag(f"{tag} needs h = 0")
    if tag in ("iap", "ne_iap") and problem.N < 2:
        raise IncompatibleTag(f"{tag} needs at least two components")
    if tag in ("pg", "nolips"):
        tau = 0
    if tau < 0:
        raise ConfigError("tau must be nonnegative")
    if tau == 0:
        schedule = DelaySchedule("zero", 0, seed)
    else:
        schedule = DelaySchedule("constant" if delay_kind == "zero" else delay_kind, tau, seed)
    selection = (SelectionPolicy("iap_cyclic") if tag in ("iap", "ne_iap")
                 else SelectionPolicy("full_aggregate"))

    if step == "manual":
        policy = StepPolicy("manual", alpha)
    else:
        policy = StepPolicy(step)
    L = selection.aggregated_L(problem.Ls)
    if policy.mode != "manual" and L <= 0:
        raise ConfigError("theoretical steps need a positive smoothness constant")
    if policy.mode in ("linear", "piag_holder") and mu is None:
        if problem.growth is None:
            raise MissingGrowth(f"step mode {step!r} needs a growth constant")
        mu = problem.growth.mu
    alpha = policy.alpha_for(L, tau, problem.kernel, mu)
    return SolverConfig(problem, selection, schedule, alpha, K, x0=x0,
                        step_mode=policy.mode, tag=tag)
