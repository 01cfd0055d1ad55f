"""Expected collection time for the generalized coupon collector problem.

Each run the collector is offered ``d`` distinct coupon types out of ``n``
and keeps one copy of the type it holds fewest of; the question is how many
runs are needed until every type is held ``m`` times.
"""

from .bounds import BoundsReport, asymptotic_estimate, bounds_report, f_lemma, lower_bound, upper_bound
from .closed_forms import QuadratureSettings, expected_runs_d1, expected_runs_d1_m1, expected_runs_m1
from .combinatorics import BinomialTable, CompositionCodec, binomial, binomial_ratio, harmonic
from .errors import (
    CapacityError,
    ConvergenceError,
    CouponLabError,
    InputError,
    InvalidTransitionError,
    SimulationError,
)
from .exact_solver import SolveResult, solve, solve_exact_rational, solve_profile
from .simulator import Policy, SimulationResult, compare_policies, simulate, simulate_once
from .state_space import Composition, TransitionDistribution, apply_advance, phi, transitions

__version__ = "0.1.0"

__all__ = [
    "BinomialTable",
    "BoundsReport",
    "CapacityError",
    "Composition",
    "CompositionCodec",
    "ConvergenceError",
    "CouponLabError",
    "InputError",
    "InvalidTransitionError",
    "Policy",
    "QuadratureSettings",
    "SimulationError",
    "SimulationResult",
    "SolveResult",
    "TransitionDistribution",
    "apply_advance",
    "asymptotic_estimate",
    "binomial",
    "binomial_ratio",
    "bounds_report",
    "compare_policies",
    "expected_runs_d1",
    "expected_runs_d1_m1",
    "expected_runs_m1",
    "f_lemma",
    "harmonic",
    "lower_bound",
    "phi",
    "simulate",
    "simulate_once",
    "solve",
    "solve_exact_rational",
    "solve_profile",
    "transitions",
    "upper_bound",
]
