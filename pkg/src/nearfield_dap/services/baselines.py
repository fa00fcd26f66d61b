"""Reference precoding architectures.

Fully-digital precoding reaches the water-filling capacity. The two hybrid
baselines are simplified stand-ins: a fully-connected network whose analog
stage is the best of a few candidate networks, and a sub-connected
network with fixed contiguous subarrays.
"""

import logging

import numpy as np
from numpy.typing import NDArray
from scipy import linalg

from nearfield_dap.models.errors import PartitionError
from nearfield_dap.models.types import ChannelMatrix, DapSolution
from nearfield_dap.services.capacity import CapacityAnalyzer
from nearfield_dap.services.partitioning import SubarrayPartitioner
from nearfield_dap.services.precoding import DapPrecoder

logger = logging.getLogger(__name__)

# Eigenvalues of F_RF^H F_RF below this fraction of the largest are dropped.
_RANK_TOLERANCE = 1e-12

# Rounds of alternating minimization for the refined analog candidate
_ALTERNATING_ROUNDS = 30


def _unit_modulus(matrix: NDArray[np.complex128]) -> NDArray[np.complex128]:
    magnitude = np.abs(matrix)
    return np.where(magnitude > 0, matrix / np.where(magnitude > 0, magnitude, 1.0), 1.0)


def _alternating_phases(
    target: NDArray[np.complex128], rounds: int
) -> NDArray[np.complex128]:
    """Fit F_BB to the target by least squares, then take the phases of target F_BB^H."""
    analog = _unit_modulus(target)
    for _ in range(rounds):
        digital, *_ = linalg.lstsq(analog, target)
        analog = _unit_modulus(target @ digital.conj().T)
    return analog


class BaselinePrecoders:
    """Spectrum efficiency of the comparison architectures."""

    @staticmethod
    def fully_digital_precoder(
        channel: ChannelMatrix, total_power: float, noise_power: float
    ) -> float:
        """Return the fully-digital SE, which is the channel capacity."""
        return CapacityAnalyzer.exact_capacity(channel, total_power, noise_power).capacity_bits

    @staticmethod
    def analog_matrix(channel: ChannelMatrix, rf_chains: int) -> NDArray[np.complex128]:
        """Return the Nt x N_RF unit-modulus phases of the top right singular vectors."""
        _, _, vh = linalg.svd(channel.entries, full_matrices=True)
        return _unit_modulus(vh[:rf_chains].conj().T)

    @staticmethod
    def block_analog_matrix(channel: ChannelMatrix, rf_chains: int) -> NDArray[np.complex128]:
        """Return the block-diagonal network of the static sub-connected baseline.

        Every RF chain reaches its own contiguous block, with zeros elsewhere.
        """
        partition = SubarrayPartitioner.block_partition(channel.num_tx, rf_chains)
        phases = DapPrecoder.build_analog(channel, partition).phases
        return phases[:, np.newaxis] * DapPrecoder.build_selection(partition).entries

    @staticmethod
    def hybrid_precoder(
        channel: ChannelMatrix,
        analog: NDArray[np.complex128],
        total_power: float,
        noise_power: float,
    ) -> NDArray[np.complex128]:
        """Return F_RF F_BB with the optimal digital stage for a given F_RF.

        F_BB whitens F_RF before water-filling the effective channel, so the
        radiated power equals P_tot.
        """
        rf_chains = analog.shape[1]
        eigenvalues, eigenvectors = linalg.eigh(analog.conj().T @ analog)
        keep = eigenvalues > _RANK_TOLERANCE * eigenvalues.max()
        if not keep.all():
            logger.debug(
                f"[Near-field DAP] Analog network rank {int(keep.sum())} < {rf_chains} RF chains"
            )
        whitening = eigenvectors[:, keep] / np.sqrt(eigenvalues[keep])[np.newaxis, :]
        basis = analog @ whitening

        _, singular_values, vh = linalg.svd(channel.entries @ basis, full_matrices=False)
        allocation = CapacityAnalyzer.water_fill(singular_values**2, total_power, noise_power)
        modes = vh.conj().T * np.sqrt(allocation.per_stream_power)[np.newaxis, :]

        digital = np.zeros((rf_chains, rf_chains), dtype=np.complex128)
        digital[:, : modes.shape[1]] = whitening @ modes
        return analog @ digital

    @staticmethod
    def fully_connected_analog(
        channel: ChannelMatrix,
        rf_chains: int,
        total_power: float,
        noise_power: float,
    ) -> NDArray[np.complex128]:
        """Grow the fully-connected analog network one RF chain at a time.

        With j chains the candidates are the singular-vector phases, their
        alternating-minimization refinement, the block-diagonal network, and
        the (j - 1)-chain winner extended by the j-th singular-vector phase
        column. The extended candidate spans the previous winner, so the SE
        is nondecreasing in the chain count. Ties go to the earlier candidate.

        Raises:
            PartitionError: If rf_chains is outside [1, Nt]
        """
        if not 1 <= rf_chains <= channel.num_tx:
            raise PartitionError(f"rf_chains must lie in [1, {channel.num_tx}], got {rf_chains}")
        phases = BaselinePrecoders.analog_matrix(channel, rf_chains)
        _, _, vh = linalg.svd(channel.entries, full_matrices=True)
        vectors = vh[:rf_chains].conj().T

        best = phases[:, :0]
        best_name = ""
        best_rate = 0.0
        for chains in range(1, rf_chains + 1):
            candidates = {
                "singular_phases": phases[:, :chains],
                "alternating": _alternating_phases(vectors[:, :chains], _ALTERNATING_ROUNDS),
                "blocks": BaselinePrecoders.block_analog_matrix(channel, chains),
            }
            if chains > 1:
                candidates["extended"] = np.hstack([best, phases[:, chains - 1 : chains]])
            scored: list[tuple[float, str, NDArray[np.complex128]]] = []
            for name, analog in candidates.items():
                precoder = BaselinePrecoders.hybrid_precoder(
                    channel, analog, total_power, noise_power
                )
                rate = DapPrecoder.precoded_rate(channel, precoder, noise_power)
                scored.append((rate, name, analog))
            best_rate, best_name, best = max(scored, key=lambda item: item[0])

        logger.debug(
            f"[Near-field DAP] Fully-connected N_RF={rf_chains}: {best_name} analog network, "
            f"SE={best_rate:.4f} bits/s/Hz"
        )
        return best

    @staticmethod
    def fully_connected_precoder(
        channel: ChannelMatrix,
        rf_chains: int,
        total_power: float,
        noise_power: float,
    ) -> NDArray[np.complex128]:
        """Return the combined Nt x N_RF fully-connected precoder F_RF F_BB."""
        analog = BaselinePrecoders.fully_connected_analog(
            channel, rf_chains, total_power, noise_power
        )
        return BaselinePrecoders.hybrid_precoder(channel, analog, total_power, noise_power)

    @staticmethod
    def fully_connected_baseline(
        channel: ChannelMatrix,
        rf_chains: int,
        total_power: float,
        noise_power: float,
    ) -> float:
        """Return the SE of the fully-connected hybrid baseline.

        Args:
            channel: Channel matrix H
            rf_chains: Number of RF chains N_RF
            total_power: Power budget P_tot
            noise_power: Noise power sigma_n^2

        Returns:
            Spectrum efficiency in bits/s/Hz
        """
        precoder = BaselinePrecoders.fully_connected_precoder(
            channel, rf_chains, total_power, noise_power
        )
        return DapPrecoder.precoded_rate(channel, precoder, noise_power)

    @staticmethod
    def sub_connected_static_solution(
        channel: ChannelMatrix,
        rf_chains: int,
        total_power: float,
        noise_power: float,
    ) -> DapSolution:
        """Precode over fixed contiguous blocks, the last one absorbing the remainder."""
        partition = SubarrayPartitioner.block_partition(channel.num_tx, rf_chains)
        return DapPrecoder.precode_partition(channel, partition, total_power, noise_power)

    @staticmethod
    def sub_connected_static_baseline(
        channel: ChannelMatrix,
        rf_chains: int,
        total_power: float,
        noise_power: float,
    ) -> float:
        """Return the SE of the static sub-connected baseline."""
        return BaselinePrecoders.sub_connected_static_solution(
            channel, rf_chains, total_power, noise_power
        ).se_bits
