"""Fixed-point iteration in (alpha, beta)-metric spaces.

Modules
-------
metric       distances, axiom checks and (alpha, beta) estimation
contraction  contraction kinds, constant fitting and derived rates
iterate      Picard iteration with a priori bounds
fredholm     Nystrom solver for second-kind Fredholm equations
ode          Picard solver for initial value problems
cli          ``abfix`` command line front end
"""

from .contraction import ContractionSpec, check_condition, derived_rate, estimate_constants
from .iterate import FixedPointResult, StoppingRule, a_priori_bound, iterations_needed, picard
from .metric import AlphaBetaParams, MetricSpace, builtin_space, classify_space, verify_axioms

__version__ = "0.1.0"

__all__ = [
    "AlphaBetaParams", "ContractionSpec", "FixedPointResult", "MetricSpace", "StoppingRule",
    "a_priori_bound", "builtin_space", "check_condition", "classify_space", "derived_rate",
    "estimate_constants", "iterations_needed", "picard", "verify_axioms",
]
