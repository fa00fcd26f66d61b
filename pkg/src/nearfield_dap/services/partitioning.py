"""Greedy near-field subarray partitioning.

Antennas are grouped into one subarray per RF chain so that the sum of the
largest singular values of the column submatrices is large. The largest
singular value of each submatrix is scored with the Minkowski l1 surrogate
(1/|S|) sum_{i,j in S} |R_ij| of R = H^H H, which lets every greedy move be
evaluated from running sums instead of an SVD.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from nearfield_dap.config import settings
from nearfield_dap.models.errors import PartitionError
from nearfield_dap.models.types import ChannelMatrix, SubarrayPartition

logger = logging.getLogger(__name__)


@dataclass
class _PartitionState:
    """Running sums of the greedy partitioner.

    Attributes:
        magnitudes: |R|, the Nt x Nt correlation magnitudes
        members: Antenna indices per set
        affinity: affinity[m, r] = sum_{n in S_r} |R_mn|
        totals: totals[r] = sum_{i, j in S_r} |R_ij|
    """

    magnitudes: NDArray[np.float64]
    members: list[list[int]]
    affinity: NDArray[np.float64] = field(init=False)
    totals: NDArray[np.float64] = field(init=False)

    def __post_init__(self) -> None:
        size = self.magnitudes.shape[0]
        self.affinity = np.zeros((size, len(self.members)))
        self.totals = np.zeros(len(self.members))
        for index, subset in enumerate(self.members):
            for antenna in subset:
                self.affinity[:, index] += self.magnitudes[:, antenna]
            self.totals[index] = self.magnitudes[np.ix_(subset, subset)].sum()

    def gain(self, antenna: int, target: int) -> float:
        """Change of the target set's surrogate if the antenna joins it."""
        size = len(self.members[target])
        total = self.totals[target]
        joined = total + 2.0 * self.affinity[antenna, target] + self.magnitudes[antenna, antenna]
        return float(joined / (size + 1) - total / size)

    def add(self, antenna: int, target: int) -> None:
        self.totals[target] += (
            2.0 * self.affinity[antenna, target] + self.magnitudes[antenna, antenna]
        )
        self.affinity[:, target] += self.magnitudes[:, antenna]
        self.members[target].append(antenna)

    def remove(self, antenna: int, source: int) -> None:
        self.members[source].remove(antenna)
        self.affinity[:, source] -= self.magnitudes[:, antenna]
        self.totals[source] -= (
            2.0 * self.affinity[antenna, source] + self.magnitudes[antenna, antenna]
        )

    def weakest(self, source: int) -> int:
        """Member with the smallest affinity to its own set, lowest index on ties."""
        candidates = sorted(self.members[source])
        scores = self.affinity[candidates, source]
        return candidates[int(np.argmin(scores))]

    def best_target(self, antenna: int, allowed: list[int]) -> int:
        """Allowed set with the largest gain, lowest set index on ties."""
        gains = [self.gain(antenna, target) for target in allowed]
        return allowed[int(np.argmax(gains))]


class SubarrayPartitioner:
    """Subarray partitioning for the dynamic sub-connected architecture."""

    @staticmethod
    def correlation_magnitudes(channel: ChannelMatrix) -> NDArray[np.float64]:
        """Return |H^H H|."""
        gram = channel.entries.conj().T @ channel.entries
        return np.abs(gram)

    @staticmethod
    def minkowski_surrogate(magnitudes: ArrayLike, subset: tuple[int, ...] | list[int]) -> float:
        """Return (1/|S|) sum_{i in S} sum_{j in S} |R_ij|.

        Args:
            magnitudes: Nt x Nt matrix; absolute values are taken
            subset: Antenna indices S

        Returns:
            Surrogate of the largest eigenvalue of R restricted to S

        Raises:
            PartitionError: If the subset is empty
        """
        if len(subset) == 0:
            raise PartitionError("surrogate of an empty index set")
        block = np.abs(np.asarray(magnitudes))[np.ix_(subset, subset)]
        return float(block.sum() / len(subset))

    @staticmethod
    def surrogate_objective(magnitudes: ArrayLike, partition: SubarrayPartition) -> float:
        """Sum of the surrogate over every set of a partition."""
        return sum(
            SubarrayPartitioner.minkowski_surrogate(magnitudes, subset)
            for subset in partition.sets
        )

    @staticmethod
    def default_bound(num_antennas: int, streams: int, bound_slack: int | None = None) -> int:
        """Return ceil(Nt / Ns) + slack."""
        slack = settings.bound_slack if bound_slack is None else bound_slack
        if streams < 1:
            raise PartitionError(f"streams must be positive, got {streams}")
        return math.ceil(num_antennas / streams) + slack

    @staticmethod
    def block_partition(num_antennas: int, streams: int) -> SubarrayPartition:
        """Split antennas into contiguous blocks; the last block absorbs the remainder."""
        if not 1 <= streams <= num_antennas:
            raise PartitionError(
                f"infeasible partition: {streams} streams over {num_antennas} antennas"
            )
        width = num_antennas // streams
        sets = [tuple(range(index * width, (index + 1) * width)) for index in range(streams - 1)]
        sets.append(tuple(range((streams - 1) * width, num_antennas)))
        return SubarrayPartition(
            sets=tuple(sets),
            bound=max(len(subset) for subset in sets),
            num_antennas=num_antennas,
        )

    @staticmethod
    def partition_subarrays(
        channel: ChannelMatrix,
        streams: int,
        bound: int | None = None,
    ) -> SubarrayPartition:
        """Partition the transmit antennas greedily.

        Seeds S_i = {i * floor(Nt / Ns)} (one-based) start the sets. The
        unassigned antenna most correlated with any assigned one joins the
        set with the largest surrogate gain. A set growing past the bound
        evicts its least-contributing member to the best set with room.
        A final pass re-homes the least contributor of each set.

        Args:
            channel: Channel matrix H (Nr x Nt)
            streams: Number of sets Ns
            bound: Maximum set size (defaults to ceil(Nt / Ns) + bound slack)

        Returns:
            The partition, with each set sorted

        Raises:
            PartitionError: If Ns < 1, Nt < Ns or bound * Ns < Nt
        """
        num_antennas = channel.num_tx
        if streams < 1 or num_antennas < streams:
            raise PartitionError(
                f"infeasible partition: {streams} streams over {num_antennas} antennas"
            )
        limit = SubarrayPartitioner.default_bound(num_antennas, streams) if bound is None else bound
        if limit * streams < num_antennas:
            raise PartitionError(
                f"infeasible partition: bound {limit} x {streams} streams < {num_antennas} antennas"
            )

        magnitudes = SubarrayPartitioner.correlation_magnitudes(channel)
        step = num_antennas // streams
        seeds = [index * step - 1 for index in range(1, streams + 1)]
        state = _PartitionState(magnitudes, [[seed] for seed in seeds])

        assigned = np.zeros(num_antennas, dtype=bool)
        assigned[seeds] = True
        strength = magnitudes[seeds].max(axis=0)
        all_sets = list(range(streams))

        while not assigned.all():
            candidate = np.where(assigned, -np.inf, strength)
            antenna = int(np.argmax(candidate))
            target = state.best_target(antenna, all_sets)
            state.add(antenna, target)
            assigned[antenna] = True
            strength = np.maximum(strength, magnitudes[antenna])

            if len(state.members[target]) > limit:
                evicted = state.weakest(target)
                room = [
                    other
                    for other in all_sets
                    if other != target and len(state.members[other]) < limit
                ]
                destination = state.best_target(evicted, room)
                state.remove(evicted, target)
                state.add(evicted, destination)
                logger.debug(
                    f"[Near-field DAP] Evicted antenna {evicted} from set {target} to {destination}"
                )

        for source in all_sets:
            if len(state.members[source]) == 1:
                continue
            antenna = state.weakest(source)
            state.remove(antenna, source)
            allowed = [
                target
                for target in all_sets
                if target == source or len(state.members[target]) < limit
            ]
            destination = state.best_target(antenna, allowed)
            state.add(antenna, destination)
            if destination != source:
                logger.debug(
                    f"[Near-field DAP] Re-homed antenna {antenna} from set {source} "
                    f"to {destination}"
                )

        return SubarrayPartition(
            sets=tuple(tuple(sorted(subset)) for subset in state.members),
            bound=limit,
            num_antennas=num_antennas,
        )
