"""Exception hierarchy shared by every module."""


class RsaError(Exception):
    """Base class for errors raised by rsalimits."""


class InvalidParameterError(RsaError, ValueError):
    pass


class MalformedTableError(InvalidParameterError):
    """A tabular kernel row is not a probability vector on its support."""


class InvalidConfigError(InvalidParameterError):
    pass


class NoHittingError(RsaError):
    """The fluid solution never reaches 1 inside the integration window."""


class DegenerateNormalizationError(RsaError):
    """1 - gamma(1) vanishes, so the hitting-time CLT normalization is undefined."""


class NegativeDiffusionError(RsaError):
    pass


class InsufficientSampleError(RsaError):
    pass


class EmptySampleError(RsaError, ValueError):
    pass
