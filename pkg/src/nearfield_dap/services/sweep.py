"""Parameter sweeps over distance, SNR and precoding architecture.

Each distance is an independent task: the channel and its PSWF spectrum are
built once, then every (SNR, architecture) pair is evaluated on them. Tasks
run in worker threads and the records are sorted afterwards, so the output
does not depend on completion order. Records at each (distance, SNR)
point are checked against the fully-digital capacity and the hybrid SE
ordering; a record that breaks either is marked failed.
"""

import asyncio
import logging
import time
from dataclasses import replace
from pathlib import Path

import polars as pl

from nearfield_dap.config import SweepConfig, settings
from nearfield_dap.models.errors import DapError
from nearfield_dap.models.types import (
    ArchitectureSpec,
    ChannelMatrix,
    PswfSpectrum,
    ResultRecord,
)
from nearfield_dap.services.baselines import BaselinePrecoders
from nearfield_dap.services.capacity import CapacityAnalyzer
from nearfield_dap.services.channel import ChannelModel
from nearfield_dap.services.energy import EnergyModel
from nearfield_dap.services.precoding import DapPrecoder
from nearfield_dap.services.pswf import PswfSolver

logger = logging.getLogger(__name__)

SWEEP_SCHEMA: dict[str, type[pl.DataType]] = {
    "scenario_id": pl.Utf8,
    "distance": pl.Float64,
    "snr_db": pl.Float64,
    "architecture": pl.Utf8,
    "rf_chains": pl.Int64,
    "ns_chosen": pl.Int64,
    "se_bits": pl.Float64,
    "ee_bits_per_watt": pl.Float64,
    "status": pl.Utf8,
    "reason": pl.Utf8,
}


# Relative slack of the per-point SE ordering checks
_ORDERING_TOLERANCE = 1e-9


def scenario_id(distance: float, snr_db: float, arch: ArchitectureSpec) -> str:
    """Return a stable identifier such as ``r5_snr30_dap``."""
    return f"r{distance:g}_snr{snr_db:g}_{arch.label}"


def _failed(record: ResultRecord, reason: str) -> ResultRecord:
    logger.warning(f"[Near-field DAP] Sweep point {record.scenario_id} failed: {reason}")
    return replace(record, ns_chosen=0, se_bits=0.0, ee=0.0, status="failed", reason=reason)


class SweepRunner:
    """Evaluate the Cartesian product of a sweep configuration.

    Attributes:
        config: The experiment configuration
        max_workers: Maximum number of distances evaluated at once
    """

    def __init__(self, config: SweepConfig, max_workers: int | None = None) -> None:
        self.config = config
        self.max_workers = max_workers or settings.max_workers

    def link_channel(self, distance: float) -> tuple[ChannelMatrix, PswfSpectrum]:
        """Build the (optionally normalized) channel and PSWF spectrum at a distance."""
        link = self.config.link(distance)
        channel = ChannelModel.near_field_channel(link)
        if self.config.channel_power is not None:
            channel = ChannelModel.normalize(channel, self.config.channel_power)
        spectrum = PswfSolver.link_spectrum(
            link,
            count=self.config.spectrum_count,
            quadrature_order=self.config.quadrature_order,
        )
        return channel, spectrum

    def evaluate_point(
        self,
        channel: ChannelMatrix,
        spectrum: PswfSpectrum,
        distance: float,
        snr_db: float,
        arch: ArchitectureSpec,
    ) -> ResultRecord:
        """Evaluate one architecture at one SNR on a prepared channel.

        Domain errors are captured in a failed record instead of raised.
        """
        started = time.perf_counter()
        identifier = scenario_id(distance, snr_db, arch)
        total_power = self.config.total_power
        noise_power = self.config.noise_power(snr_db)
        try:
            adaptive = DapPrecoder.select_stream_count(
                spectrum, channel.power, total_power, noise_power
            )
            streams = min(arch.rf_chains or adaptive, channel.num_tx)
            match arch.kind:
                case "fully_digital":
                    report = CapacityAnalyzer.exact_capacity(channel, total_power, noise_power)
                    se_bits = report.capacity_bits
                    streams = report.allocation.active_streams
                case "fully_connected":
                    se_bits = BaselinePrecoders.fully_connected_baseline(
                        channel, streams, total_power, noise_power
                    )
                case "sub_connected_static":
                    se_bits = BaselinePrecoders.sub_connected_static_baseline(
                        channel, streams, total_power, noise_power
                    )
                case "dap":
                    solution = DapPrecoder.solve_channel(
                        channel, streams, total_power, noise_power, self.config.bound_slack
                    )
                    violated = [
                        name
                        for name, holds in DapPrecoder.validate_triple(
                            solution.triple, total_power
                        ).items()
                        if not holds
                    ]
                    if violated:
                        raise DapError(f"precoder violates {', '.join(violated)}")
                    se_bits = solution.se_bits
            ee = EnergyModel.energy_efficiency(
                se_bits, arch, EnergyModel.power_model(), total_power, streams=streams
            )
        except DapError as e:
            logger.warning(f"[Near-field DAP] Sweep point {identifier} failed: {e}")
            return ResultRecord(
                scenario_id=identifier,
                distance=distance,
                snr_db=snr_db,
                architecture=arch.label,
                rf_chains=arch.rf_chains,
                ns_chosen=0,
                se_bits=0.0,
                ee=0.0,
                runtime_ms=(time.perf_counter() - started) * 1000.0,
                status="failed",
                reason=str(e),
            )

        rf_chains = channel.num_tx if arch.kind == "fully_digital" else streams
        return ResultRecord(
            scenario_id=identifier,
            distance=distance,
            snr_db=snr_db,
            architecture=arch.label,
            rf_chains=rf_chains,
            ns_chosen=streams,
            se_bits=se_bits,
            ee=ee,
            runtime_ms=(time.perf_counter() - started) * 1000.0,
        )

    def check_ordering(
        self, channel: ChannelMatrix, snr_db: float, records: list[ResultRecord]
    ) -> list[ResultRecord]:
        """Fail records that break the SE ordering of one (distance, SNR) point.

        No architecture may exceed the fully-digital capacity, and a
        fully-connected record may not fall below the static sub-connected
        record with the same number of RF chains.
        """
        try:
            capacity = CapacityAnalyzer.exact_capacity(
                channel, self.config.total_power, self.config.noise_power(snr_db)
            ).capacity_bits
        except DapError as e:
            logger.warning(f"[Near-field DAP] SE ordering not checked at {snr_db} dB: {e}")
            return records
        tolerance = _ORDERING_TOLERANCE * max(1.0, capacity)

        checked = [
            _failed(record, f"SE {record.se_bits:.6g} exceeds capacity {capacity:.6g}")
            if record.status == "ok" and record.se_bits > capacity + tolerance
            else record
            for record in records
        ]
        static = {
            record.rf_chains: record.se_bits
            for record in checked
            if record.status == "ok" and record.architecture.startswith("sub_connected_static")
        }
        ordered: list[ResultRecord] = []
        for record in checked:
            floor = static.get(record.rf_chains)
            if (
                record.status == "ok"
                and record.architecture.startswith("fully_connected")
                and floor is not None
                and record.se_bits < floor - tolerance
            ):
                record = _failed(
                    record,
                    f"SE {record.se_bits:.6g} below sub_connected_static "
                    f"{floor:.6g} at {record.rf_chains} RF chains",
                )
            ordered.append(record)
        return ordered

    def evaluate_distance(self, distance: float) -> list[ResultRecord]:
        """Evaluate every (SNR, architecture) pair at one distance."""
        try:
            channel, spectrum = self.link_channel(distance)
        except DapError as e:
            logger.warning(f"[Near-field DAP] Distance {distance} m failed: {e}")
            return [
                ResultRecord(
                    scenario_id=scenario_id(distance, snr_db, arch),
                    distance=distance,
                    snr_db=snr_db,
                    architecture=arch.label,
                    rf_chains=arch.rf_chains,
                    ns_chosen=0,
                    se_bits=0.0,
                    ee=0.0,
                    status="failed",
                    reason=str(e),
                )
                for snr_db in self.config.snrs_db
                for arch in self.config.architecture_specs()
            ]

        records: list[ResultRecord] = []
        for snr_db in self.config.snrs_db:
            point = [
                self.evaluate_point(channel, spectrum, distance, snr_db, arch)
                for arch in self.config.architecture_specs()
            ]
            records.extend(self.check_ordering(channel, snr_db, point))
        return records

    async def run(self) -> list[ResultRecord]:
        """Evaluate all sweep points concurrently.

        Returns:
            Records sorted by distance, SNR and configured architecture order
        """
        semaphore = asyncio.Semaphore(self.max_workers)

        async def bounded(distance: float) -> list[ResultRecord]:
            async with semaphore:
                return await asyncio.to_thread(self.evaluate_distance, distance)

        started = time.perf_counter()
        batches = await asyncio.gather(*(bounded(distance) for distance in self.config.distances))

        order = {label: index for index, label in enumerate(
            spec.label for spec in self.config.architecture_specs()
        )}
        records = sorted(
            (record for batch in batches for record in batch),
            key=lambda record: (record.distance, record.snr_db, order[record.architecture]),
        )
        failed = sum(1 for record in records if record.status == "failed")
        logger.info(
            f"[Near-field DAP] Sweep finished: {len(records)} points, {failed} failed, "
            f"{(time.perf_counter() - started):.2f} s"
        )
        return records

    @staticmethod
    def records_frame(records: list[ResultRecord]) -> pl.DataFrame:
        """Return the sweep records as a DataFrame with the versioned schema."""
        return pl.DataFrame([record.as_row() for record in records], schema=SWEEP_SCHEMA)

    @staticmethod
    def write_csv(records: list[ResultRecord], path: Path) -> Path:
        """Write records to CSV, creating the parent directory.

        Raises:
            OSError: If the path is not writable
        """
        path.parent.mkdir(parents=True, exist_ok=True)
        SweepRunner.records_frame(records).write_csv(path)
        logger.info(f"[Near-field DAP] Wrote {len(records)} records to {path}")
        return path


async def run_sweep(config: SweepConfig, write: bool = True) -> list[ResultRecord]:
    """Run a sweep and write its CSV to ``config.output_path``.

    Args:
        config: The experiment configuration
        write: Whether to write the CSV file

    Returns:
        The sorted records
    """
    logger.info(
        f"[Near-field DAP] Sweep over {len(config.distances)} distances, "
        f"{len(config.snrs_db)} SNRs, {len(config.architectures)} architectures"
    )
    records = await SweepRunner(config).run()
    if write:
        await asyncio.to_thread(SweepRunner.write_csv, records, config.output_path)
    return records
