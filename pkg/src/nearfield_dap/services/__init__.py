"""Numerical services for the near-field DAP toolkit."""

from nearfield_dap.services.baselines import BaselinePrecoders
from nearfield_dap.services.capacity import CapacityAnalyzer
from nearfield_dap.services.channel import ChannelModel
from nearfield_dap.services.energy import EnergyModel
from nearfield_dap.services.figures import FigureData
from nearfield_dap.services.partitioning import SubarrayPartitioner
from nearfield_dap.services.precoding import DapPrecoder
from nearfield_dap.services.pswf import PswfSolver
from nearfield_dap.services.storage import ChannelStore
from nearfield_dap.services.sweep import SweepRunner, run_sweep

__all__ = [
    "BaselinePrecoders",
    "CapacityAnalyzer",
    "ChannelModel",
    "ChannelStore",
    "DapPrecoder",
    "EnergyModel",
    "FigureData",
    "PswfSolver",
    "SubarrayPartitioner",
    "SweepRunner",
    "run_sweep",
]
