"""Exception taxonomy shared by every latgreen module.

Domain violations (bad arguments) and divergent parameter combinations are
``ValueError`` subclasses; quadrature/accuracy failures are ``RuntimeError``
subclasses carrying the best available estimate so callers can decide whether
to keep it.
"""


class LatticeGreenError(Exception):
    """Base class for all latgreen errors."""


class DomainError(LatticeGreenError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class DivergenceError(DomainError):
    """The requested quantity is infinite for these parameters.

    Raised e.g. for the massless lattice Green function when the dimension is
    too small for the integral to converge.
    """


class UnsupportedError(LatticeGreenError, ValueError):
    """The operation is valid mathematically but not provided (by design)."""


class ConfigError(LatticeGreenError, ValueError):
    """A configuration object violates one of its invariants."""


class AccuracyError(LatticeGreenError, RuntimeError):
    """A numerical routine could not meet its accuracy target.

    Attributes
    ----------
    best : object
        Best estimate obtained before giving up (may be None).
    est_error : float
        Estimated relative error of ``best``.
    """

    def __init__(self, message, best=None, est_error=float("nan")):
        super().__init__(message)
        self.best = best
        self.est_error = est_error
