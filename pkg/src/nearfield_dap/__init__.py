"""Near-field DAP - XL-MIMO channel analysis and distance-aware hybrid precoding."""

__version__ = "1.0.0"
