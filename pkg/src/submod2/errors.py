"""Exception types shared across the solver."""


class SolverError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SolverError):
    """Malformed input: bad dimensions, indices out of range, illegal parameters."""


class EnumerationCapExceeded(SolverError):
    """An exhaustive operation was asked to enumerate more points than its cap allows."""


class ConvergenceError(SolverError):
    """A numerical solve failed to reach its termination criterion."""


class GuaranteeUnavailable(SolverError):
    """The instance satisfies no precondition under which an approximation
    guarantee can be certified; the solver refuses rather than emit an
    uncertified answer."""


class RoundUpViolation(SolverError):
    """The componentwise-max rounding of the relaxed solution violated a
    constraint, i.e. the instance was declared round-up but is not."""


class InfeasibleSystem(SolverError):
    """A constraint system admits no feasible point (carried as an exception
    only where an operation cannot express infeasibility in its result)."""


class ChainViolation(SolverError):
    """A binary level assignment was not a prefix of ones for some element;
    signals a bug in a solver that should only produce closed sets."""
