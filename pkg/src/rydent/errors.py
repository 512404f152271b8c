"""Exception hierarchy shared by all rydent modules."""


class RydentError(Exception):
    """Base class for every error raised by rydent."""


class InvalidArgumentError(RydentError, ValueError):
    """An argument violates a documented precondition."""


class ResourceLimitError(RydentError):
    """The requested system exceeds a storage or size cap."""

    def __init__(self, message: str, cap: int):
        super().__init__(message)
        self.cap = cap


class ConvergenceError(RydentError):
    """An iterative eigensolver did not reach its tolerance."""

    def __init__(self, message: str, best_residual: float):
        super().__init__(message)
        self.best_residual = best_residual


class IntegrationError(RydentError):
    """Time evolution lost accuracy (norm drift or step-doubling check)."""

    def __init__(self, message: str, drift: float):
        super().__init__(message)
        self.drift = drift


class DegenerateDataError(RydentError, ValueError):
    """A data transformation left nothing to work with (e.g. empty truncation)."""


class CountsParseError(RydentError, ValueError):
    """A serialized counts dictionary could not be parsed.

    ``location`` is a human readable pointer into the input (line/column
    or offending key).
    """

    def __init__(self, message: str, location: str = ""):
        full = f"{message} ({location})" if location else message
        super().__init__(full)
        self.location = location
