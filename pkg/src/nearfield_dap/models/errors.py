"""Exceptions raised by the near-field DAP services."""


class DapError(ValueError):
    """Base class for all domain errors."""


class GeometryError(DapError):
    """Invalid array or link geometry."""


class SpectrumError(DapError):
    """The sinc-kernel eigenproblem has no spectrum for the given inputs."""


class PowerAllocationError(DapError):
    """Water-filling could not find a usable subchannel."""


class PartitionError(DapError):
    """Subarray partitioning is infeasible for the requested sizes."""


class ConfigError(DapError):
    """An experiment configuration value is missing or invalid."""


class FigureDataError(DapError):
    """Records cannot produce the requested figure data."""
