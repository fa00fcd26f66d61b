"""Figure data tables.

Every figure is a CSV file with a fixed column schema. The singular-value
and capacity figures are computed directly from the link; the comparison
figures are projections of sweep records.
"""

import asyncio
import logging
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any, cast

import polars as pl
from scipy import linalg

from nearfield_dap.config import FIGURE_IDS, SweepConfig
from nearfield_dap.models.errors import FigureDataError
from nearfield_dap.models.types import ResultRecord
from nearfield_dap.services.capacity import CapacityAnalyzer
from nearfield_dap.services.channel import ChannelModel
from nearfield_dap.services.pswf import PswfSolver
from nearfield_dap.services.sweep import SweepRunner

logger = logging.getLogger(__name__)

FIGURE_COLUMNS: dict[str, tuple[str, ...]] = {
    "fig2": ("distance", "index", "sv_calculated", "sv_estimated"),
    "fig3": ("r", "capacity_exact", "capacity_pswf", "capacity_dof"),
    "fig5": ("r", "architecture", "rf_chains", "se_bits"),
    "fig6": ("snr_db", "architecture", "rf_chains", "se_bits"),
    "fig7": ("r", "architecture", "rf_chains", "ee_bits_per_watt"),
    "fig8": ("snr_db", "architecture", "ns", "se_bits", "ee_bits_per_watt"),
}


class FigureData:
    """Builders and writer for figure CSV files."""

    @staticmethod
    def singular_value_rows(config: SweepConfig) -> list[dict[str, Any]]:
        """Return squared singular values next to PSWF eigenvalues per distance.

        Squared singular values are rescaled to the total trace of the
        sinc kernel, so both staircases carry the same power.
        """
        rows: list[dict[str, Any]] = []
        for distance in config.distances:
            link = config.link(distance)
            channel = ChannelModel.near_field_channel(link)
            spectrum = PswfSolver.link_spectrum(
                link, count=config.spectrum_count, quadrature_order=config.quadrature_order
            )
            squared = linalg.svd(channel.entries, compute_uv=False) ** 2
            scale = spectrum.total_trace / channel.power
            for index, eigenvalue in enumerate(spectrum.eigenvalues):
                rows.append({
                    "distance": distance,
                    "index": index,
                    "sv_calculated": float(squared[index] * scale),
                    "sv_estimated": float(eigenvalue),
                })
        return rows

    @staticmethod
    def capacity_rows(config: SweepConfig) -> list[dict[str, Any]]:
        """Return exact, PSWF and equal-power capacities over distance.

        Uses the first configured SNR.
        """
        snr_db = config.snrs_db[0]
        noise_power = config.noise_power(snr_db)
        rows: list[dict[str, Any]] = []
        for distance in config.distances:
            link = config.link(distance)
            channel = ChannelModel.near_field_channel(link)
            if config.channel_power is not None:
                channel = ChannelModel.normalize(channel, config.channel_power)
            spectrum = PswfSolver.link_spectrum(
                link, count=config.spectrum_count, quadrature_order=config.quadrature_order
            )
            exact = CapacityAnalyzer.exact_capacity(channel, config.total_power, noise_power)
            estimate = CapacityAnalyzer.pswf_capacity_estimate(
                spectrum, channel.power, config.total_power, noise_power
            )
            rows.append({
                "r": distance,
                "capacity_exact": exact.capacity_bits,
                "capacity_pswf": estimate.capacity_bits,
                "capacity_dof": CapacityAnalyzer.equal_power_capacity_approx(
                    link, channel.power, config.total_power, noise_power
                ),
            })
        return rows

    @staticmethod
    def record_rows(records: Sequence[ResultRecord]) -> list[dict[str, Any]]:
        """Project successful sweep records, adding the ``r`` and ``ns`` aliases."""
        rows: list[dict[str, Any]] = []
        for record in records:
            if record.status != "ok":
                continue
            row: dict[str, Any] = dict(record.as_row())
            row["r"] = record.distance
            row["ns"] = record.ns_chosen
            rows.append(row)
        return rows

    @staticmethod
    def frame(rows: Sequence[Mapping[str, Any]], columns: Sequence[str]) -> pl.DataFrame:
        """Return the rows as a DataFrame restricted to the given columns, in order."""
        return pl.DataFrame(
            [{column: row[column] for column in columns} for row in rows],
            schema=list(columns),
        )

    @staticmethod
    def write_rows(
        rows: Sequence[Mapping[str, Any]], columns: Sequence[str], path: Path
    ) -> Path:
        """Write rows as CSV with a header, creating the parent directory."""
        path.parent.mkdir(parents=True, exist_ok=True)
        FigureData.frame(rows, columns).write_csv(path)
        return path

    @staticmethod
    def to_csv(rows: Sequence[Mapping[str, Any]], columns: Sequence[str]) -> str:
        """Render rows as CSV text."""
        return FigureData.frame(rows, columns).write_csv()

    @staticmethod
    def emit_figure_data(
        records: Sequence[ResultRecord] | Sequence[Mapping[str, Any]],
        figure_id: str,
        path: Path,
    ) -> Path:
        """Write the CSV of one figure.

        Args:
            records: Sweep records or precomputed figure rows
            figure_id: One of fig2, fig3, fig5, fig6, fig7, fig8
            path: Output CSV path

        Returns:
            The written path

        Raises:
            FigureDataError: If the figure is unknown, there are no rows, or
                a required column is absent; no file is written
            OSError: If the path is not writable
        """
        if figure_id not in FIGURE_COLUMNS:
            raise FigureDataError(
                f"unknown figure '{figure_id}', expected one of {', '.join(FIGURE_IDS)}"
            )
        if not records:
            raise FigureDataError(f"no records for {figure_id}")

        items = list(records)
        rows: list[Mapping[str, Any]]
        if all(isinstance(item, ResultRecord) for item in items):
            rows = list(FigureData.record_rows(cast(list[ResultRecord], items)))
        else:
            rows = [item for item in items if isinstance(item, Mapping)]
        if not rows:
            raise FigureDataError(f"no successful records for {figure_id}")

        columns = FIGURE_COLUMNS[figure_id]
        for column in columns:
            if any(column not in row for row in rows):
                raise FigureDataError(f"{figure_id} is missing sweep dimension '{column}'")

        FigureData.write_rows(rows, columns, path)
        logger.info(f"[Near-field DAP] Wrote {figure_id} data ({len(rows)} rows) to {path}")
        return path

    @staticmethod
    async def build_rows(
        config: SweepConfig, figure_id: str
    ) -> list[ResultRecord] | list[dict[str, Any]]:
        """Compute the rows or records a figure is drawn from."""
        match figure_id:
            case "fig2":
                return await asyncio.to_thread(FigureData.singular_value_rows, config)
            case "fig3":
                return await asyncio.to_thread(FigureData.capacity_rows, config)
            case _ if figure_id in FIGURE_COLUMNS:
                return await SweepRunner(config).run()
            case _:
                raise FigureDataError(
                    f"unknown figure '{figure_id}', expected one of {', '.join(FIGURE_IDS)}"
                )
