"""Exception types shared across the package."""


class DeformDCFError(Exception):
    """Base class for all library errors."""


class DimensionError(DeformDCFError, ValueError):
    """Operands have incompatible layouts, shapes or channel counts."""


class DomainError(DeformDCFError, ValueError):
    """A value is outside the domain an operation is defined on."""


class FormatError(DeformDCFError, ValueError):
    """A binary or text file does not match its documented format."""


class ConfigurationError(DeformDCFError, ValueError):
    """Invalid configuration, unknown key, or missing data asset."""


class DegenerateGeometryError(DeformDCFError, ValueError):
    """A geometric estimate is undefined for the given point set."""


class NumericalError(DeformDCFError, RuntimeError):
    """A numerical routine produced NaN/Inf and was aborted."""


class SequenceError(DeformDCFError, RuntimeError):
    """A frame sequence could not be read."""


class ParseError(DeformDCFError, ValueError):
    """A text annotation file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
