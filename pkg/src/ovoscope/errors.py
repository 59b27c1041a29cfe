"""Exception hierarchy shared by the pipeline stages."""


class OvoscopeError(Exception):
    """Base class for all errors raised by this package."""


class NetpbmError(OvoscopeError):
    """Raised when a Netpbm byte stream cannot be decoded."""


class UnknownMagicError(NetpbmError):
    pass


class MalformedHeaderError(NetpbmError):
    pass


class UnsupportedMaxvalError(NetpbmError):
    pass


class TruncatedDataError(NetpbmError):
    pass


class EmptyHistogramError(OvoscopeError):
    """Histogram with zero total mass (e.g. an empty crop)."""


class NoObjectError(OvoscopeError):
    """Segmentation found no pixel at or above the threshold."""


class DegenerateHistogramError(OvoscopeError):
    """Zero-variance histogram; skewness and kurtosis are undefined."""


class ConfigError(OvoscopeError, ValueError):
    """A configuration value is outside its documented range."""


class TrainingDataError(OvoscopeError, ValueError):
    """Training samples unusable (one class only, non-finite features, ...)."""
