"""DAP precoding tool."""

import asyncio
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any

from nearfield_dap.config import SweepConfig
from nearfield_dap.models.errors import DapError
from nearfield_dap.models.types import ArchitectureSpec
from nearfield_dap.services.capacity import CapacityAnalyzer
from nearfield_dap.services.channel import ChannelModel
from nearfield_dap.services.energy import EnergyModel
from nearfield_dap.services.precoding import DapPrecoder
from nearfield_dap.services.storage import ChannelStore
from nearfield_dap.tools.output import write_result

logger = logging.getLogger(__name__)

STREAM_COLUMNS = ("stream", "subarray_size", "power")


async def precode(
    config: SweepConfig,
    distance: float | None = None,
    snr_db: float | None = None,
    streams: int | None = None,
    out: Path | None = None,
    channel_out: Path | None = None,
) -> dict[str, Any]:
    """Run the DAP pipeline on one link.

    Args:
        config: Experiment configuration
        distance: Link distance (defaults to the first configured distance)
        snr_db: SNR in dB (defaults to the first configured SNR)
        streams: Fixed stream count; chosen from the PSWF spectrum if None
        out: Optional CSV path for the per-stream table
        channel_out: Optional ``.npz`` path to store the channel matrix

    Returns:
        Dictionary with the stream count, subarray sizes, spectrum and
        energy efficiency, the capacity it is bounded by, constraint checks
        and per-stream rows
    """
    r = distance if distance is not None else config.distances[0]
    snr = snr_db if snr_db is not None else config.snrs_db[0]
    noise_power = config.noise_power(snr)

    try:
        link = config.link(r)
        solution = await asyncio.to_thread(
            DapPrecoder.solve_link,
            link,
            config.total_power,
            noise_power,
            config.bound_slack,
            streams,
            config.channel_power,
            config.quadrature_order,
        )
        channel = ChannelModel.near_field_channel(link)
        if config.channel_power is not None:
            channel = ChannelModel.normalize(channel, config.channel_power)
        capacity = CapacityAnalyzer.exact_capacity(channel, config.total_power, noise_power)
        arch = ArchitectureSpec("dap", solution.streams, link.num_tx)
        ee = EnergyModel.energy_efficiency(
            solution.se_bits, arch, EnergyModel.power_model(), config.total_power
        )
        bound = DapPrecoder.jensen_bound(channel, solution.triple, noise_power)
    except DapError as e:
        logger.error(f"[Near-field DAP] Precoding failed: {e}")
        return {"error": str(e)}

    if channel_out is not None:
        try:
            await asyncio.to_thread(ChannelStore(channel_out).save, channel)
        except OSError as e:
            logger.error(f"[Near-field DAP] Cannot write {channel_out}: {e}")
            return {"error": f"cannot write channel {channel_out}: {e}"}

    rows = [asdict(summary) for summary in solution.stream_summaries()]
    result: dict[str, Any] = {
        "distance": r,
        "snr_db": snr,
        "ns": solution.streams,
        "bound": solution.partition.bound,
        "subarray_sizes": solution.partition.sizes,
        "se_bits": solution.se_bits,
        "capacity_bits": capacity.capacity_bits,
        "jensen_bound_bits": bound,
        "ee_bits_per_watt": ee,
        "constraints": DapPrecoder.validate_triple(solution.triple, config.total_power),
        "channel_path": str(channel_out) if channel_out is not None else None,
        "columns": list(STREAM_COLUMNS),
        "rows": rows,
    }
    return await write_result(result, rows, STREAM_COLUMNS, out)
