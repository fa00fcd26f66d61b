"""Command tools for the near-field DAP toolkit."""

from nearfield_dap.tools.analysis import compute_capacity, compute_dof
from nearfield_dap.tools.experiments import build_figure, compare_architectures, sweep
from nearfield_dap.tools.precoding import precode

__all__ = [
    "build_figure",
    "compare_architectures",
    "compute_capacity",
    "compute_dof",
    "precode",
    "sweep",
]
