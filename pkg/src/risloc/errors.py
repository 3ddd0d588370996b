"""Exception types shared across the library."""


class ConfigurationError(ValueError):
    """A config value, dimension, or option is out of contract."""


class InvalidDirectionError(ValueError):
    """A direction cosine or physical angle lies outside its valid range."""


class EstimationError(RuntimeError):
    """Base class for failures inside the estimation pipeline."""


class InsufficientSoundingsError(EstimationError):
    """Fewer sounding blocks than the angle recovery needs."""


class DegenerateGeometryError(EstimationError):
    """The scenario nulls the link and leaves the gain unobservable."""
