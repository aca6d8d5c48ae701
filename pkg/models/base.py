"""
Error Base Module

Exception hierarchy shared by every package. This is separate to avoid
circular imports between models, services and nn.
"""


class SemgError(Exception):
    """Base class for all toolchain errors."""

    def __init__(self, message, path=None):
        super().__init__(message)
        self.message = message
        self.path = path

    def to_dict(self):
        """Structured form used by the CLI on failure."""
        payload = {'error': type(self).__name__, 'message': self.message}
        if self.path is not None:
            payload['file'] = str(self.path)
        row = getattr(self, 'row', None)
        if row is not None:
            payload['row'] = row
        return payload


class ValidationError(SemgError):
    """Raised when data violates a domain invariant."""
    pass


class FormatError(SemgError):
    """Raised when a file does not follow its documented format."""
    pass


class ParseError(FormatError):
    """Raised when a cell cannot be parsed; row is the 1-based file line."""

    def __init__(self, message, row=None, path=None):
        super().__init__(message, path=path)
        self.row = row


class DimensionError(SemgError):
    """Raised on tensor shape disagreement."""
    pass


class SizeError(SemgError):
    """Raised when an input is too short for the requested operation."""
    pass


class DesignError(SemgError):
    """Raised when a filter cannot be designed."""
    pass


class NumericError(SemgError):
    """Raised when a layer produces NaN or infinite values."""

    def __init__(self, message, layer=None):
        super().__init__(message)
        self.layer = layer


class ConfigError(SemgError):
    """Raised on invalid configuration values or combinations."""
    pass
