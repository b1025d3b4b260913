"""Exception types shared across the package."""


class GaussmapError(Exception):
    """Base class for every error raised by gaussmap."""


class ShapeError(GaussmapError):
    """An input array has the wrong shape or dimensionality."""


class ConfigError(GaussmapError):
    """A configuration value is out of range or inconsistent with the data."""


class DataError(GaussmapError):
    """Input data is unusable: too few points, ragged rows, non-finite or
    degenerate values."""


class SchemaError(DataError):
    """A serialized model document does not match the expected schema."""


class NumericalError(GaussmapError):
    """A computation produced a non-finite result."""
