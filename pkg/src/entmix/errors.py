"""Exception hierarchy shared by all modules."""


class EntmixError(ValueError):
    """Base class for every error raised by this package."""


class InvalidEnsemble(EntmixError):
    """Weights or states do not form a valid ensemble."""


class InvalidDensityMatrix(EntmixError):
    pass


class ZeroVector(EntmixError):
    pass


class NotReal(EntmixError):
    """A real-only operation received complex data."""


class NumericalFailure(EntmixError):
    pass


class DependentStates(EntmixError):
    """The ensemble states are (numerically) linearly dependent."""


# The reduction of rho*rho~ onto the r' spectrum needs a nonsingular Gram matrix.
DependentEnsemble = DependentStates


class WrongBranchCount(EntmixError):
    pass


class DegenerateNorm(EntmixError):
    pass


class TooLarge(EntmixError):
    """Requested construction would not fit in memory."""


class NonConvergence(EntmixError):
    pass


class ParallelStates(EntmixError):
    pass


class UsageError(EntmixError):
    """Bad command-line flags or configuration."""
