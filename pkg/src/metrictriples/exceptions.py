"""Exception hierarchy shared by every module."""


class MetricTriplesError(Exception):
    """Base class for all package errors."""


class InvalidInputError(MetricTriplesError, ValueError):
    """Malformed or inconsistent input (bad sides, broken metric, parse failure)."""


class DomainError(InvalidInputError):
    """Input is well formed but lies outside the domain of the computation."""


class AmbiguityError(DomainError):
    """The requested geometric object is not unique (e.g. antipodal geodesics)."""


class SolverError(MetricTriplesError, RuntimeError):
    """An iterative solver failed to converge.

    Parameters
    ----------
    message : str
    diagnostics : dict, optional
        Solver state at failure (iterations, residual, last iterate, ...).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
