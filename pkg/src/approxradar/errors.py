"""Exception types shared across the package."""


class ApproxRadarError(Exception):
    """Base class for all package errors."""


class ParameterError(ApproxRadarError, ValueError):
    """An argument is outside its valid domain."""


class UnsupportedModelError(ApproxRadarError):
    """A fixture-only operator model was used where a functional model is needed."""


class InvalidSizeError(ApproxRadarError, ValueError):
    """Transform length is not a supported power of two, or sizes disagree."""


class DegenerateInputError(ApproxRadarError, ValueError):
    """Input carries no usable information (all-zero grid, empty cost set, ...)."""


class ConfigError(ApproxRadarError, ValueError):
    """Config file could not be parsed or holds an invalid value."""

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
