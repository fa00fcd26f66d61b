"""Data models for the near-field DAP toolkit."""

from nearfield_dap.models.errors import (
    ConfigError,
    DapError,
    FigureDataError,
    GeometryError,
    PartitionError,
    PowerAllocationError,
    SpectrumError,
)
from nearfield_dap.models.types import (
    AnalogPrecoder,
    ArchitectureSpec,
    ArrayGeometry,
    CapacityReport,
    ChannelMatrix,
    DapSolution,
    LinkGeometry,
    PowerAllocation,
    PowerModel,
    PrecoderTriple,
    PswfSpectrum,
    ResultRecord,
    SelectionMatrix,
    SubarrayPartition,
)

__all__ = [
    "AnalogPrecoder",
    "ArchitectureSpec",
    "ArrayGeometry",
    "CapacityReport",
    "ChannelMatrix",
    "ConfigError",
    "DapSolution",
    "DapError",
    "FigureDataError",
    "GeometryError",
    "LinkGeometry",
    "PartitionError",
    "PowerAllocation",
    "PowerAllocationError",
    "PowerModel",
    "PrecoderTriple",
    "PswfSpectrum",
    "ResultRecord",
    "SelectionMatrix",
    "SpectrumError",
    "SubarrayPartition",
]
