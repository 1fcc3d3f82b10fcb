"""Exception hierarchy shared by every abfix module."""


class AbfixError(Exception):
    """Base class for all errors raised by abfix."""


class DomainError(AbfixError, ValueError):
    """A domain descriptor is empty or malformed."""


class EvaluationError(AbfixError, ArithmeticError):
    """A distance, map, kernel or rhs returned an invalid value.

    ``witness`` holds the offending arguments so callers can report them.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ClosureError(AbfixError):
    """A self-map produced a point outside its domain."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ContractError(AbfixError, ValueError):
    """Constants violate the admissibility rules of their contraction kind."""


class InfeasibleError(AbfixError):
    """No admissible contraction constants fit the sampled pairs."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class SolverError(AbfixError):
    """Base for failures of an iterative solve."""


class DivergenceError(SolverError):
    """Residuals grew for too many consecutive steps."""

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class PreconditionError(SolverError):
    """A contraction precondition failed in strict mode."""

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor
