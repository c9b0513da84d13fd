"""Shared exception types."""


class SkewerSimError(Exception):
    """Base class for package-specific failures."""


class PlacementInfeasibleError(SkewerSimError):
    """Rejection sampling could not place all requested items."""


class InvalidStartError(SkewerSimError):
    """A primitive was asked to start from an unreachable pose."""


class TargetLostError(SkewerSimError):
    """The servo loop lost (or never had) a food target in frame."""


class NoItemError(SkewerSimError):
    """A detection box contains no non-plate pixels."""


class ConfigError(SkewerSimError):
    """Invalid or inconsistent configuration input."""


class DimensionError(SkewerSimError):
    """Array shape does not match what a layer expects."""


class CheckpointError(SkewerSimError):
    """Model checkpoint missing or malformed."""
