"""Exception types raised by the simulation routines."""


class LGWaitError(ValueError):
    """Base class for all domain errors in this package."""


class InvalidStateError(LGWaitError):
    """A state vector or density matrix failed validation."""


class CorrelatorRangeError(LGWaitError):
    """A correlation function value lies outside [-1, 1]."""


class SingularRatioError(LGWaitError, ZeroDivisionError):
    """The two-flip/no-flip ratio is undefined (omega*t at pi)."""


class UnusableReadoutError(LGWaitError, ZeroDivisionError):
    """The weak readout cannot be inverted, e.g. because lambda is 0."""


class ZeroProbabilityBranchError(LGWaitError):
    """Conditioning on a detector outcome that essentially never happens."""


class EfficiencyRangeError(LGWaitError):
    """Classical detector efficiency 4*lambda**2 exceeds one."""


class GridCoverageError(LGWaitError):
    """A time grid does not cover the requested interval."""


class NonFiniteError(LGWaitError, ArithmeticError):
    """Input or output contains NaN or infinity."""
