"""Exception hierarchy for wigner_lab."""


class WignerLabError(Exception):
    """Base class for all library errors."""


class InvalidDimensionError(WignerLabError, ValueError):
    pass


class InvalidStateError(WignerLabError, ValueError):
    pass


class NumericalValidityError(WignerLabError):
    """Raised when a result would be outside the model's region of validity."""


class TruncationError(NumericalValidityError):
    """Population leaked into the guard levels of the truncated Fock space."""


class IdentifiabilityError(NumericalValidityError):
    """The tomography design matrix does not determine the state."""


class StepSizeError(WignerLabError, ValueError):
    pass


class UndefinedOverlapError(WignerLabError, ValueError):
    pass


class UndefinedCorrelationError(WignerLabError, ValueError):
    pass


class ConfigError(WignerLabError):
    """Invalid experiment configuration."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
