"""Dynamic sub-connected hybrid precoding.

Each RF chain drives one subarray through a switch network F_S, every
antenna has one phase shifter on the diagonal of F_A, and the digital
precoder F_D water-fills the effective channel H F_A F_S.
"""

import logging
import math

import numpy as np
from numpy.typing import NDArray
from scipy import linalg

from nearfield_dap.config import settings
from nearfield_dap.models.errors import PartitionError
from nearfield_dap.models.types import (
    AnalogPrecoder,
    ChannelMatrix,
    DapSolution,
    LinkGeometry,
    PowerAllocation,
    PrecoderTriple,
    PswfSpectrum,
    SelectionMatrix,
    SubarrayPartition,
)
from nearfield_dap.services.capacity import CapacityAnalyzer
from nearfield_dap.services.channel import ChannelModel
from nearfield_dap.services.partitioning import SubarrayPartitioner
from nearfield_dap.services.pswf import PswfSolver

logger = logging.getLogger(__name__)


class DapPrecoder:
    """Construction and evaluation of DAP precoder triples."""

    @staticmethod
    def select_stream_count(
        spectrum: PswfSpectrum,
        channel_power: float,
        total_power: float,
        noise_power: float,
    ) -> int:
        """Return the number of PSWF subchannels that water-filling activates.

        Args:
            spectrum: PSWF eigenvalues of the link
            channel_power: Channel power P_H used to scale the eigenvalues
            total_power: Power budget P_tot
            noise_power: Noise power sigma_n^2

        Returns:
            Stream count Ns >= 1
        """
        gains = CapacityAnalyzer.pswf_gains(spectrum, channel_power)
        allocation = CapacityAnalyzer.water_fill(gains, total_power, noise_power)
        return max(1, allocation.active_streams)

    @staticmethod
    def build_selection(partition: SubarrayPartition) -> SelectionMatrix:
        """Return F_S with [F_S]_{j,i} = 1 iff antenna j belongs to S_i."""
        entries = np.zeros((partition.num_antennas, partition.streams))
        for index, subset in enumerate(partition.sets):
            entries[list(subset), index] = 1.0
        return SelectionMatrix(entries)

    @staticmethod
    def build_analog(channel: ChannelMatrix, partition: SubarrayPartition) -> AnalogPrecoder:
        """Match each subarray's phases to its dominant right singular vector.

        The global phase of every singular vector is fixed by rotating its
        first nonzero entry onto the positive real axis.

        Args:
            channel: Channel matrix H
            partition: Subarray sets

        Returns:
            Unit-modulus diagonal of F_A
        """
        phases = np.ones(partition.num_antennas, dtype=np.complex128)
        for subset in partition.sets:
            columns = channel.entries[:, list(subset)]
            _, _, vh = linalg.svd(columns, full_matrices=False)
            vector = vh[0].conj()
            magnitude = np.abs(vector)
            nonzero = np.flatnonzero(magnitude > 0)
            if nonzero.size == 0:
                continue
            vector = vector * (vector[nonzero[0]].conj() / magnitude[nonzero[0]])
            safe = np.where(magnitude > 0, magnitude, 1.0)
            phases[list(subset)] = np.where(magnitude > 0, vector / safe, 1.0)
        return AnalogPrecoder(phases)

    @staticmethod
    def solve_digital(
        channel: ChannelMatrix,
        analog: AnalogPrecoder,
        selection: SelectionMatrix,
        total_power: float,
        noise_power: float,
    ) -> tuple[NDArray[np.complex128], PowerAllocation]:
        """Return F_D and the water-filled powers of the effective modes.

        The columns of F_A F_S have disjoint supports and unit-modulus entries,
        so (F_A F_S)^H (F_A F_S) = diag(|S_i|). Water-filling runs on the
        column-normalized channel H F_A F_S D^-1/2 and D^-1/2 is folded into
        F_D, which makes ||F_A F_S F_D||_F^2 equal P_tot.
        """
        streams = selection.streams
        sizes = selection.entries.sum(axis=0)
        scaling = 1.0 / np.sqrt(sizes)
        combiner = analog.phases[:, np.newaxis] * selection.entries
        effective = (channel.entries @ combiner) * scaling[np.newaxis, :]

        _, singular_values, vh = linalg.svd(effective, full_matrices=False)
        allocation = CapacityAnalyzer.water_fill(singular_values**2, total_power, noise_power)
        modes = vh.conj().T * np.sqrt(allocation.per_stream_power)[np.newaxis, :]

        digital = np.zeros((streams, streams), dtype=np.complex128)
        digital[:, : modes.shape[1]] = scaling[:, np.newaxis] * modes
        if allocation.active_streams < streams:
            logger.warning(
                f"[Near-field DAP] Effective channel supports {allocation.active_streams} "
                f"of {streams} streams; null streams get zero power"
            )
        return digital, allocation

    @staticmethod
    def build_digital(
        channel: ChannelMatrix,
        analog: AnalogPrecoder,
        selection: SelectionMatrix,
        total_power: float,
        noise_power: float,
    ) -> NDArray[np.complex128]:
        """Return the water-filled Ns x Ns digital precoder F_D."""
        digital, _ = DapPrecoder.solve_digital(
            channel, analog, selection, total_power, noise_power
        )
        return digital

    @staticmethod
    def precoded_rate(
        channel: ChannelMatrix, precoder: NDArray[np.complex128], noise_power: float
    ) -> float:
        """Return log2 det(I + H F F^H H^H / sigma^2) for any precoder F."""
        product = channel.entries @ precoder
        gram = product.conj().T @ product / noise_power
        eigenvalues = linalg.eigvalsh(gram)
        return float(np.sum(np.log2(1.0 + np.clip(eigenvalues, 0.0, None))))

    @staticmethod
    def spectrum_efficiency(
        channel: ChannelMatrix, triple: PrecoderTriple, noise_power: float
    ) -> float:
        """Return the spectrum efficiency of a precoder triple in bits/s/Hz.

        The determinant is evaluated in the Ns-dimensional stream space,
        which equals the receive-space form by Sylvester's identity.
        """
        return DapPrecoder.precoded_rate(channel, triple.combined(), noise_power)

    @staticmethod
    def jensen_bound(channel: ChannelMatrix, triple: PrecoderTriple, noise_power: float) -> float:
        """Return Ns log2(1 + (1/Ns) sum_i lambda_i^2(H F_A F_S) p_i / sigma^2).

        Stream powers p_i are the column powers of D^1/2 F_D, paired in
        decreasing order with the singular values of H F_A F_S.
        """
        streams = triple.streams
        combiner = triple.analog.phases[:, np.newaxis] * triple.selection.entries
        singular_values = linalg.svd(channel.entries @ combiner, compute_uv=False)
        sizes = triple.selection.entries.sum(axis=0)
        powers = np.sum(np.abs(np.sqrt(sizes)[:, np.newaxis] * triple.digital) ** 2, axis=0)
        powers = np.sort(powers)[::-1]

        gains = np.zeros(streams)
        gains[: singular_values.size] = singular_values[:streams] ** 2
        return streams * math.log2(1.0 + float(np.sum(gains * powers)) / (streams * noise_power))

    @staticmethod
    def validate_triple(
        triple: PrecoderTriple,
        total_power: float,
        tolerance: float = 1e-9,
    ) -> dict[str, bool]:
        """Check the four hybrid precoding constraints.

        Returns:
            Mapping of constraint name to whether it holds:
            ``power`` (||F_A F_S F_D||_F^2 = P_tot within the relative
            tolerance), ``unit_modulus`` (F_A entries), ``binary_selection``
            (F_S entries in {0, 1}) and ``one_chain_per_antenna``
            (each F_S row sums to 1)
        """
        radiated = float(np.sum(np.abs(triple.combined()) ** 2))
        selection = triple.selection.entries
        return {
            "power": abs(radiated - total_power) <= tolerance * total_power,
            "unit_modulus": bool(np.allclose(np.abs(triple.analog.phases), 1.0, atol=tolerance)),
            "binary_selection": bool(np.all((selection == 0) | (selection == 1))),
            "one_chain_per_antenna": bool(np.all(selection.sum(axis=1) == 1)),
        }

    @staticmethod
    def precode_partition(
        channel: ChannelMatrix,
        partition: SubarrayPartition,
        total_power: float,
        noise_power: float,
    ) -> DapSolution:
        """Build and evaluate the triple for a fixed partition."""
        selection = DapPrecoder.build_selection(partition)
        analog = DapPrecoder.build_analog(channel, partition)
        digital, allocation = DapPrecoder.solve_digital(
            channel, analog, selection, total_power, noise_power
        )
        triple = PrecoderTriple(analog=analog, selection=selection, digital=digital)
        se_bits = DapPrecoder.spectrum_efficiency(channel, triple, noise_power)
        return DapSolution(
            partition=partition, triple=triple, allocation=allocation, se_bits=se_bits
        )

    @staticmethod
    def solve_channel(
        channel: ChannelMatrix,
        streams: int,
        total_power: float,
        noise_power: float,
        bound_slack: int | None = None,
    ) -> DapSolution:
        """Partition the array for a fixed stream count and build the triple.

        Contiguous blocks are evaluated next to the greedy partition when
        they respect the size bound, and the partition with the higher SE
        is kept. Ties keep the greedy one.

        Raises:
            PartitionError: If the stream count does not fit the array
        """
        if not 1 <= streams <= channel.num_tx:
            raise PartitionError(
                f"infeasible partition: {streams} streams over {channel.num_tx} antennas"
            )
        slack = settings.bound_slack if bound_slack is None else bound_slack
        bound = SubarrayPartitioner.default_bound(channel.num_tx, streams, slack)
        partition = SubarrayPartitioner.partition_subarrays(channel, streams, bound)
        solution = DapPrecoder.precode_partition(channel, partition, total_power, noise_power)

        blocks = SubarrayPartitioner.block_partition(channel.num_tx, streams)
        if blocks.bound <= bound and blocks.sets != partition.sets:
            contiguous = DapPrecoder.precode_partition(
                channel, blocks, total_power, noise_power
            )
            if contiguous.se_bits > solution.se_bits:
                logger.debug(
                    f"[Near-field DAP] Contiguous blocks beat the greedy partition for "
                    f"Ns={streams}: {contiguous.se_bits:.4f} > {solution.se_bits:.4f}"
                )
                return contiguous
        return solution

    @staticmethod
    def solve_link(
        link: LinkGeometry,
        total_power: float,
        noise_power: float,
        bound_slack: int | None = None,
        streams: int | None = None,
        channel_power: float | None = None,
        quadrature_order: int | None = None,
    ) -> DapSolution:
        """Run the full DAP pipeline on a link.

        Args:
            link: Transmit/receive geometry
            total_power: Power budget P_tot
            noise_power: Noise power sigma_n^2
            bound_slack: Slack added to ceil(Nt / Ns) for the subarray bound
            streams: Fixed stream count; chosen from the PSWF spectrum if None
            channel_power: Rescale the channel to this power P_H if given
            quadrature_order: Nystrom order for the PSWF spectrum

        Returns:
            The pipeline solution

        Raises:
            DapError: Propagated from the channel, spectrum and partition steps
        """
        channel = ChannelModel.near_field_channel(link)
        if channel_power is not None:
            channel = ChannelModel.normalize(channel, channel_power)

        spectrum = PswfSolver.link_spectrum(link, quadrature_order=quadrature_order)
        if streams is None:
            streams = DapPrecoder.select_stream_count(
                spectrum, channel.power, total_power, noise_power
            )
        solution = DapPrecoder.solve_channel(
            channel, streams, total_power, noise_power, bound_slack
        )
        logger.info(
            f"[Near-field DAP] DAP at r={link.distance} m: Ns={streams}, "
            f"SE={solution.se_bits:.4f} bits/s/Hz"
        )
        return DapSolution(
            partition=solution.partition,
            triple=solution.triple,
            allocation=solution.allocation,
            se_bits=solution.se_bits,
            spectrum=spectrum,
        )

    @staticmethod
    def dap_pipeline(
        link: LinkGeometry,
        total_power: float,
        noise_power: float,
        bound_slack: int | None = None,
        streams: int | None = None,
        channel_power: float | None = None,
    ) -> tuple[PrecoderTriple, float]:
        """Return the DAP precoder triple of a link and its spectrum efficiency."""
        solution = DapPrecoder.solve_link(
            link,
            total_power,
            noise_power,
            bound_slack=bound_slack,
            streams=streams,
            channel_power=channel_power,
        )
        return solution.triple, solution.se_bits
