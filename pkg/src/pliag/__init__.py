"""Incremental aggregated Bregman proximal gradient methods with rate certificates."""

from . import aggregation, diagnostics, kernels, problems, stepsizes, subproblems
from .aggregation import DelaySchedule, GradientTable, SelectionPolicy
from .diagnostics import (Certificate, RecursionInstance, certify_holder,
                          certify_linear, certify_sublinear)
from .kernels import LegendreKernel
from .problems import (ProblemSpec, make_dual_cs, make_holder_toy, make_lasso,
                       make_poisson_elastic_net, make_quartic_problem)
from .solver import SolverConfig, Trace, named_method, run
from .stepsizes import StepPolicy

__version__ = "0.1.0"
