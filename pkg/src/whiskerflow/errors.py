"""Exception and warning types shared across the package."""


class WhiskerflowError(Exception):
    """Base class for all package errors."""


class InvalidGeometryError(WhiskerflowError, ValueError):
    """A geometric constraint is violated (e.g. immersion deeper than the element)."""


class ConfigError(WhiskerflowError, ValueError):
    """A configuration document is malformed or inconsistent."""


class NonMonotoneDesignError(WhiskerflowError, ValueError):
    """The assembled sensor's response is not monotone in flow speed."""


class PoseCollisionError(WhiskerflowError, ValueError):
    """A magnet pose would cross the sensing-element plane."""


class PointInsideMagnetError(WhiskerflowError, ValueError):
    """A field query point lies inside the magnet body."""


class UnreachableReadingError(WhiskerflowError, ValueError):
    """A reading exceeds what the forward model can produce."""


class UndefinedOrientationError(WhiskerflowError, ValueError):
    """Orientation requested for an all-zero in-plane reading."""


class DegenerateSamplesError(WhiskerflowError, ValueError):
    """Calibration samples do not constrain the fit."""


class UnknownParameterError(WhiskerflowError, ValueError):
    """A sweep axis names a parameter that cannot be swept."""


class InsensitiveDesignError(WhiskerflowError, ValueError):
    """A design produces no quantized response over its working range."""


class EmptyOverlapError(WhiskerflowError, ValueError):
    """Two series to be scored share no samples."""


class AliasingWarning(UserWarning):
    """Shedding frequency exceeds the Nyquist limit of the sample rate."""
