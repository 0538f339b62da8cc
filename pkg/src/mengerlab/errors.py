"""Exception hierarchy shared by all modules.

The CLI maps :class:`PreconditionError` to exit code 2 and
:class:`AccuracyError` to exit code 3.
"""


class MengerError(Exception):
    """Base class for all library errors."""


class PreconditionError(MengerError, ValueError):
    """An input violates an operation's precondition."""


class ParameterError(PreconditionError):
    pass


class UndersamplingError(PreconditionError):
    pass


class DegenerateCurveError(PreconditionError):
    pass


class DegenerateTripleError(PreconditionError):
    pass


class TopologyError(PreconditionError):
    """The curve is (numerically) not simple."""


class InsufficientDataError(PreconditionError):
    pass


class DomainError(PreconditionError):
    pass


class AccuracyError(MengerError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    ``estimate`` and ``error_bound`` carry the best available result.
    """

    def __init__(self, message, estimate=None, error_bound=None, best=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound
        self.best = best


class InternalConsistencyError(AccuracyError):
    pass


class StagnationError(AccuracyError):
    """Step size underflow in the descent loop; ``best`` holds the final state."""
