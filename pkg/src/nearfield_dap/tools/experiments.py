"""Architecture comparison, sweep and figure tools.

These tools evaluate the precoding architectures of a configuration and
write the resulting tables.
"""

import asyncio
import logging
from pathlib import Path
from typing import Any

from nearfield_dap.config import CSV_SCHEMA_VERSION, SweepConfig
from nearfield_dap.models.errors import DapError
from nearfield_dap.models.types import CompareRow
from nearfield_dap.services.figures import FIGURE_COLUMNS, FigureData
from nearfield_dap.services.sweep import SweepRunner, run_sweep
from nearfield_dap.tools.output import write_result

logger = logging.getLogger(__name__)

COMPARE_COLUMNS = ("architecture", "rf_chains", "r", "snr_db", "se_bits", "ee_bits_per_watt")


async def compare_architectures(
    config: SweepConfig,
    distance: float | None = None,
    snr_db: float | None = None,
    out: Path | None = None,
) -> dict[str, Any]:
    """Compare every configured architecture on one link.

    Args:
        config: Experiment configuration
        distance: Link distance (defaults to the first configured distance)
        snr_db: SNR in dB (defaults to the first configured SNR)
        out: Optional CSV path

    Returns:
        Dictionary with one row per architecture
    """
    r = distance if distance is not None else config.distances[0]
    snr = snr_db if snr_db is not None else config.snrs_db[0]
    try:
        point = config.with_overrides(distances=[r], snrs_db=[snr])
    except DapError as e:
        return {"error": str(e)}

    records = await SweepRunner(point).run()
    failed = [record for record in records if record.status == "failed"]
    if failed:
        reasons = "; ".join(f"{record.architecture}: {record.reason}" for record in failed)
        logger.error(f"[Near-field DAP] Comparison failed: {reasons}")
        return {"error": reasons}

    rows = [
        CompareRow(
            architecture=record.architecture,
            rf_chains=record.rf_chains or record.ns_chosen,
            r=record.distance,
            snr_db=record.snr_db,
            se_bits=record.se_bits,
            ee_bits_per_watt=record.ee,
        )
        for record in records
    ]
    best_se = max(rows, key=lambda row: row["se_bits"])
    best_ee = max(rows, key=lambda row: row["ee_bits_per_watt"])
    result: dict[str, Any] = {
        "distance": r,
        "snr_db": snr,
        "best_se_architecture": best_se["architecture"],
        "best_ee_architecture": best_ee["architecture"],
        "columns": list(COMPARE_COLUMNS),
        "rows": rows,
    }
    return await write_result(result, rows, COMPARE_COLUMNS, out)


async def sweep(config: SweepConfig) -> dict[str, Any]:
    """Run the full sweep of a configuration and write its CSV.

    Returns:
        Dictionary with point counts and the output path
    """
    try:
        records = await run_sweep(config)
    except OSError as e:
        logger.error(f"[Near-field DAP] Cannot write {config.output_path}: {e}")
        return {"error": f"cannot write output {config.output_path}: {e}"}

    failed = [record for record in records if record.status == "failed"]
    return {
        "points": len(records),
        "failed": len(failed),
        "output_path": str(config.output_path),
        "schema_version": CSV_SCHEMA_VERSION,
    }


async def build_figure(config: SweepConfig, figure_id: str) -> dict[str, Any]:
    """Compute and write the data of one figure to ``config.output_path``.

    Args:
        config: Experiment configuration, usually a figure preset
        figure_id: One of fig2, fig3, fig5, fig6, fig7, fig8

    Returns:
        Dictionary with the figure id, row count and output path
    """
    try:
        rows = await FigureData.build_rows(config, figure_id)
        path = await asyncio.to_thread(
            FigureData.emit_figure_data, rows, figure_id, config.output_path
        )
    except DapError as e:
        logger.error(f"[Near-field DAP] Figure {figure_id} failed: {e}")
        return {"error": str(e)}
    except OSError as e:
        logger.error(f"[Near-field DAP] Cannot write {config.output_path}: {e}")
        return {"error": f"cannot write output {config.output_path}: {e}"}

    return {
        "figure": figure_id,
        "rows": len(rows),
        "columns": list(FIGURE_COLUMNS[figure_id]),
        "output_path": str(path),
        "schema_version": CSV_SCHEMA_VERSION,
    }
