"""Spectrum and capacity analysis tools.

These tools expose the PSWF spectrum of a link and its capacity over
distance, in the exact, PSWF-estimated and equal-power forms.
"""

import asyncio
import logging
from pathlib import Path
from typing import Any

from nearfield_dap.config import SweepConfig
from nearfield_dap.models.errors import DapError
from nearfield_dap.models.types import CapacityRow, SpectrumRow
from nearfield_dap.services.capacity import CapacityAnalyzer
from nearfield_dap.services.channel import ChannelModel
from nearfield_dap.services.figures import FigureData
from nearfield_dap.services.pswf import PswfSolver
from nearfield_dap.tools.output import write_result

logger = logging.getLogger(__name__)

SPECTRUM_COLUMNS = ("index", "eigenvalue")
CAPACITY_COLUMNS = ("r", "exact_bits", "pswf_estimate_bits", "equal_power_bits")


async def compute_dof(
    config: SweepConfig,
    distance: float | None = None,
    count: int | None = None,
    out: Path | None = None,
) -> dict[str, Any]:
    """Compute the PSWF spectrum and DoF estimate of a link.

    Args:
        config: Experiment configuration
        distance: Link distance (defaults to the first configured distance)
        count: Number of eigenvalues (defaults to config, then to the knee rule)
        out: Optional CSV path for the spectrum

    Returns:
        Dictionary with the bandwidth parameter, DoF estimate, half-power
        index and spectrum rows
    """
    r = distance if distance is not None else config.distances[0]
    try:
        link = config.link(r)
        spectrum = await asyncio.to_thread(
            PswfSolver.link_spectrum,
            link,
            count or config.spectrum_count,
            config.quadrature_order,
        )
    except DapError as e:
        logger.error(f"[Near-field DAP] DoF analysis failed: {e}")
        return {"error": str(e)}

    aperture = max(link.tx.aperture, link.rx.aperture)
    rows = [
        SpectrumRow(index=index, eigenvalue=float(value))
        for index, value in enumerate(spectrum.eigenvalues)
    ]
    result: dict[str, Any] = {
        "distance": r,
        "c_y": spectrum.c_y,
        "dof_estimate": PswfSolver.dof_estimate(link),
        "half_power_index": PswfSolver.crossing_index(spectrum.eigenvalues),
        "trace": spectrum.total_trace,
        "rayleigh_distance": (
            ChannelModel.rayleigh_distance(aperture, link.wavelength) if aperture > 0 else 0.0
        ),
        "columns": list(SPECTRUM_COLUMNS),
        "rows": rows,
    }
    return await write_result(result, rows, SPECTRUM_COLUMNS, out)


async def compute_capacity(
    config: SweepConfig,
    out: Path | None = None,
) -> dict[str, Any]:
    """Compute exact and estimated capacity at every configured distance.

    Uses the first configured SNR. The channel is rescaled to
    ``config.channel_power`` when set.

    Args:
        config: Experiment configuration
        out: Optional CSV path

    Returns:
        Dictionary with capacity rows, the optimal DoF and the distance
        where the DoF estimate reaches it
    """
    snr_db = config.snrs_db[0]
    noise_power = config.noise_power(snr_db)
    try:
        figure_rows = await asyncio.to_thread(FigureData.capacity_rows, config)
        link = config.link(config.distances[0])
        channel_power = (
            config.channel_power
            if config.channel_power is not None
            else float(config.num_tx * config.num_rx)
        )
        optimal = CapacityAnalyzer.optimal_dof(config.total_power, channel_power, noise_power)
        optimal_distance = CapacityAnalyzer.optimal_distance(
            link, config.total_power, channel_power, noise_power
        )
    except DapError as e:
        logger.error(f"[Near-field DAP] Capacity analysis failed: {e}")
        return {"error": str(e)}

    rows = [
        CapacityRow(
            r=row["r"],
            exact_bits=row["capacity_exact"],
            pswf_estimate_bits=row["capacity_pswf"],
            equal_power_bits=row["capacity_dof"],
        )
        for row in figure_rows
    ]
    peak = max(rows, key=lambda row: row["exact_bits"])
    result: dict[str, Any] = {
        "snr_db": snr_db,
        "channel_power": channel_power,
        "optimal_dof": optimal,
        "optimal_dof_approx": CapacityAnalyzer.optimal_dof_approx(
            config.total_power, channel_power, noise_power
        ),
        "optimal_distance": optimal_distance,
        "peak_distance": peak["r"],
        "peak_capacity_bits": peak["exact_bits"],
        "columns": list(CAPACITY_COLUMNS),
        "rows": rows,
    }
    return await write_result(result, rows, CAPACITY_COLUMNS, out)

