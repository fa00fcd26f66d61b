"""Data models for the near-field DAP toolkit.

This module defines the core data structures used throughout the package.
Numerical values are frozen dataclasses wrapping read-only numpy arrays so
they can be shared between sweep workers; CSV rows are TypedDicts.
"""

import math
from dataclasses import dataclass
from typing import Literal, TypedDict, cast

import numpy as np
from numpy.typing import NDArray

from nearfield_dap.models.errors import ConfigError, GeometryError, PartitionError

ModelTag = Literal["near_field", "far_field"]
MethodTag = Literal["exact_svd", "pswf_waterfill", "equal_power_dof"]
ArchitectureKind = Literal["fully_digital", "fully_connected", "sub_connected_static", "dap"]
RecordStatus = Literal["ok", "failed"]

ARCHITECTURE_KINDS: tuple[ArchitectureKind, ...] = (
    "fully_digital",
    "fully_connected",
    "sub_connected_static",
    "dap",
)

Vector3 = tuple[float, float, float]


def _frozen(array: NDArray[np.generic]) -> NDArray[np.generic]:
    """Return a read-only copy of an array."""
    copy = np.array(array, copy=True)
    copy.setflags(write=False)
    return copy


@dataclass(frozen=True)
class ArrayGeometry:
    """A uniform linear aperture in the x-y plane.

    Attributes:
        num_elements: Number of antenna elements
        spacing: Element spacing in meters
        tilt: Angle between the array axis and the vertical (y) line, radians
        center: Array centroid in meters
    """

    num_elements: int
    spacing: float
    tilt: float = 0.0
    center: Vector3 = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if self.num_elements < 1:
            raise GeometryError(f"num_elements must be >= 1, got {self.num_elements}")
        if not self.spacing > 0:
            raise GeometryError(f"spacing must be positive, got {self.spacing}")
        if not abs(self.tilt) < math.pi / 2:
            raise GeometryError(f"|tilt| must be below pi/2, got {self.tilt}")

    @property
    def aperture(self) -> float:
        """Physical length (N - 1) * d of the array."""
        return (self.num_elements - 1) * self.spacing

    @property
    def axis(self) -> NDArray[np.float64]:
        """Unit vector along the array, rotated by the tilt away from +y."""
        return np.array([-math.sin(self.tilt), math.cos(self.tilt), 0.0])


@dataclass(frozen=True)
class LinkGeometry:
    """A transmitter/receiver array pair facing each other along +x.

    The transmitter centre sits at the origin and the receiver centre at
    (distance, 0, 0), so both centres are on the same level.

    Attributes:
        tx: Transmit array
        rx: Receive array
        distance: Centre-to-centre separation r in meters
        wavelength: Carrier wavelength in meters
    """

    tx: ArrayGeometry
    rx: ArrayGeometry
    distance: float
    wavelength: float

    def __post_init__(self) -> None:
        if not self.distance > 0:
            raise GeometryError(f"distance must be positive, got {self.distance}")
        if not self.wavelength > 0:
            raise GeometryError(f"wavelength must be positive, got {self.wavelength}")
        offset = np.subtract(self.rx.center, self.tx.center)
        if not np.allclose(offset, (self.distance, 0.0, 0.0), rtol=1e-12, atol=1e-12):
            raise GeometryError(
                "array centres must lie on the same level, separated by the link distance"
            )

    @classmethod
    def build(
        cls,
        num_tx: int,
        num_rx: int,
        spacing: float,
        wavelength: float,
        distance: float,
        tx_tilt: float = 0.0,
        rx_tilt: float = 0.0,
    ) -> "LinkGeometry":
        """Create a link with the transmitter at the origin."""
        return cls(
            tx=ArrayGeometry(num_tx, spacing, tx_tilt, (0.0, 0.0, 0.0)),
            rx=ArrayGeometry(num_rx, spacing, rx_tilt, (distance, 0.0, 0.0)),
            distance=distance,
            wavelength=wavelength,
        )

    def at_distance(self, distance: float) -> "LinkGeometry":
        """Return the same arrays moved to a new separation."""
        rx = ArrayGeometry(self.rx.num_elements, self.rx.spacing, self.rx.tilt, (
            self.tx.center[0] + distance, self.tx.center[1], self.tx.center[2]
        ))
        return LinkGeometry(self.tx, rx, distance, self.wavelength)

    @property
    def num_tx(self) -> int:
        return self.tx.num_elements

    @property
    def num_rx(self) -> int:
        return self.rx.num_elements


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """A complex Nr x Nt line-of-sight channel.

    Attributes:
        entries: Channel coefficients, rows are receive elements
        wavelength: Carrier wavelength in meters
        model_tag: Which propagation model produced the entries
    """

    entries: NDArray[np.complex128]
    wavelength: float
    model_tag: ModelTag = "near_field"

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.ndim != 2:
            raise GeometryError(f"channel must be a matrix, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise GeometryError("channel entries must be finite")
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def num_rx(self) -> int:
        return int(self.entries.shape[0])

    @property
    def num_tx(self) -> int:
        return int(self.entries.shape[1])

    @property
    def power(self) -> float:
        """Squared Frobenius norm P_H."""
        return float(np.sum(np.abs(self.entries) ** 2))


@dataclass(frozen=True, eq=False)
class PswfSpectrum:
    """Leading eigenvalues of the sinc-kernel operator on [-1, 1].

    Attributes:
        c_y: Dimensionless bandwidth parameter
        eigenvalues: Decreasing eigenvalues in (0, 1]
        quadrature_order: Nystrom discretization size
        total_trace: Sum of all discrete eigenvalues, returned or not
    """

    c_y: float
    eigenvalues: NDArray[np.float64]
    quadrature_order: int
    total_trace: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "eigenvalues", _frozen(np.asarray(self.eigenvalues, float)))

    @property
    def knee(self) -> float:
        """Predicted falloff index 2c/pi."""
        return 2.0 * self.c_y / math.pi


@dataclass(frozen=True, eq=False)
class PowerAllocation:
    """Water-filling solution over a set of parallel subchannels.

    Attributes:
        per_stream_power: Power p_i per subchannel, in the caller's order
        water_level: Water level 1/mu
        total_power: Power budget P_tot
        noise_power: Noise power sigma_n^2
    """

    per_stream_power: NDArray[np.float64]
    water_level: float
    total_power: float
    noise_power: float

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "per_stream_power", _frozen(np.asarray(self.per_stream_power, float))
        )

    @property
    def active_streams(self) -> int:
        """Number of subchannels that receive positive power."""
        return int(np.count_nonzero(self.per_stream_power > 0))


@dataclass(frozen=True, eq=False)
class CapacityReport:
    """Capacity of a channel together with the allocation achieving it."""

    capacity_bits: float
    singular_values: NDArray[np.float64]
    allocation: PowerAllocation
    method_tag: MethodTag

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "singular_values", _frozen(np.asarray(self.singular_values, float))
        )


@dataclass(frozen=True)
class SubarrayPartition:
    """Disjoint antenna index sets, one per active RF chain.

    Indices are zero-based antenna positions.

    Attributes:
        sets: The index sets S_1..S_Ns
        bound: Maximum subarray size N_bound
        num_antennas: Number of transmit antennas Nt
    """

    sets: tuple[tuple[int, ...], ...]
    bound: int
    num_antennas: int

    def __post_init__(self) -> None:
        if self.bound < 1:
            raise PartitionError(f"bound must be positive, got {self.bound}")
        flat = [index for subset in self.sets for index in subset]
        if len(flat) != len(set(flat)):
            raise PartitionError("subarray sets must be pairwise disjoint")
        if sorted(flat) != list(range(self.num_antennas)):
            raise PartitionError("subarray sets must cover every antenna exactly once")
        for subset in self.sets:
            if not subset:
                raise PartitionError("subarray sets must be nonempty")
            if len(subset) > self.bound:
                raise PartitionError(
                    f"subarray of size {len(subset)} exceeds bound {self.bound}"
                )

    @property
    def streams(self) -> int:
        return len(self.sets)

    @property
    def sizes(self) -> list[int]:
        return [len(subset) for subset in self.sets]


@dataclass(frozen=True, eq=False)
class SelectionMatrix:
    """Binary Nt x Ns antenna-to-RF-chain assignment F_S."""

    entries: NDArray[np.float64]

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2:
            raise PartitionError(f"selection must be a matrix, got shape {entries.shape}")
        if not np.all((entries == 0) | (entries == 1)):
            raise PartitionError("selection entries must be binary")
        if not np.all(entries.sum(axis=1) == 1):
            raise PartitionError("each antenna must select exactly one RF chain")
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def streams(self) -> int:
        return int(self.entries.shape[1])


@dataclass(frozen=True, eq=False)
class AnalogPrecoder:
    """Diagonal of the phase-shifter matrix F_A."""

    phases: NDArray[np.complex128]

    def __post_init__(self) -> None:
        phases = np.asarray(self.phases, dtype=np.complex128)
        if not np.allclose(np.abs(phases), 1.0, rtol=0.0, atol=1e-12):
            raise GeometryError("analog precoder entries must have unit modulus")
        object.__setattr__(self, "phases", _frozen(phases))


@dataclass(frozen=True, eq=False)
class PrecoderTriple:
    """Analog, selection and digital precoders of the DAP architecture."""

    analog: AnalogPrecoder
    selection: SelectionMatrix
    digital: NDArray[np.complex128]

    def __post_init__(self) -> None:
        object.__setattr__(self, "digital", _frozen(np.asarray(self.digital, np.complex128)))

    @property
    def streams(self) -> int:
        return self.selection.streams

    def combined(self) -> NDArray[np.complex128]:
        """Return F_A F_S F_D as an Nt x Ns matrix."""
        analog_selection = self.analog.phases[:, np.newaxis] * self.selection.entries
        return analog_selection @ self.digital


@dataclass(frozen=True)
class PowerModel:
    """Downlink power consumption constants, all in mW."""

    p_static: float
    p_rf_chain: float
    p_phase_shifter: float
    p_switch: float
    p_power_amp: float

    def __post_init__(self) -> None:
        for name in ("p_static", "p_rf_chain", "p_phase_shifter", "p_switch", "p_power_amp"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class ArchitectureSpec:
    """A precoding architecture and its RF chain budget.

    Attributes:
        kind: Architecture family
        rf_chains: RF chains; None means the count follows the PSWF stream count
        antennas: Transmit antennas Nt
    """

    kind: ArchitectureKind
    rf_chains: int | None
    antennas: int

    def __post_init__(self) -> None:
        if self.kind not in ARCHITECTURE_KINDS:
            raise ConfigError(f"unknown architecture kind '{self.kind}'")
        if self.kind == "fully_digital":
            if self.rf_chains not in (None, self.antennas):
                raise ConfigError("fully-digital precoding uses one RF chain per antenna")
            object.__setattr__(self, "rf_chains", self.antennas)
        if self.rf_chains is not None and not 1 <= self.rf_chains <= self.antennas:
            raise ConfigError(f"rf_chains must lie in [1, {self.antennas}], got {self.rf_chains}")

    @classmethod
    def parse(cls, token: str, antennas: int) -> "ArchitectureSpec":
        """Parse a config token such as ``dap``, ``dap:8`` or ``fully_connected:4``."""
        kind, _, count = token.strip().partition(":")
        if kind not in ARCHITECTURE_KINDS:
            raise ConfigError(f"unknown architecture kind '{kind}' in '{token}'")
        if not count:
            return cls(cast(ArchitectureKind, kind), None, antennas)
        try:
            rf_chains = int(count)
        except ValueError as e:
            raise ConfigError(f"invalid RF chain count in '{token}'") from e
        return cls(cast(ArchitectureKind, kind), rf_chains, antennas)

    @property
    def label(self) -> str:
        """Config token such as ``fully_connected:8`` or ``dap``."""
        if self.rf_chains is None or self.kind == "fully_digital":
            return self.kind
        return f"{self.kind}:{self.rf_chains}"

    def phase_shifters(self, streams: int) -> int:
        """Number of phase shifters N_PS for the given active stream count."""
        match self.kind:
            case "fully_digital":
                return 0
            case "fully_connected":
                return self.antennas * streams
            case _:
                return self.antennas

    def switches(self, streams: int) -> int:
        """Number of switches N_SW; only the DAP selection circuit has any."""
        return streams if self.kind == "dap" else 0


@dataclass(frozen=True)
class ResultRecord:
    """One evaluated (distance, SNR, architecture) sweep point."""

    scenario_id: str
    distance: float
    snr_db: float
    architecture: str
    rf_chains: int | None
    ns_chosen: int
    se_bits: float
    ee: float
    runtime_ms: float = 0.0
    status: RecordStatus = "ok"
    reason: str = ""

    def as_row(self) -> "SweepRow":
        """Return the CSV row; runtime is excluded so output is reproducible."""
        return SweepRow(
            scenario_id=self.scenario_id,
            distance=self.distance,
            snr_db=self.snr_db,
            architecture=self.architecture,
            rf_chains=self.rf_chains,
            ns_chosen=self.ns_chosen,
            se_bits=self.se_bits,
            ee_bits_per_watt=self.ee,
            status=self.status,
            reason=self.reason,
        )


class SweepRow(TypedDict):
    """CSV row of the sweep output."""

    scenario_id: str
    distance: float
    snr_db: float
    architecture: str
    rf_chains: int | None
    ns_chosen: int
    se_bits: float
    ee_bits_per_watt: float
    status: str
    reason: str


class SpectrumRow(TypedDict):
    """CSV row of the ``dof`` subcommand."""

    index: int
    eigenvalue: float


class CapacityRow(TypedDict):
    """CSV row of the ``capacity`` subcommand."""

    r: float
    exact_bits: float
    pswf_estimate_bits: float
    equal_power_bits: float


class CompareRow(TypedDict):
    """CSV row of the ``compare`` subcommand."""

    architecture: str
    rf_chains: int
    r: float
    snr_db: float
    se_bits: float
    ee_bits_per_watt: float


@dataclass
class StreamSummary:
    """Per-stream view of a DAP precoder for reporting.

    Attributes:
        stream: Zero-based RF chain index
        subarray_size: Antennas connected to the chain
        power: Water-filled power of the stream-th strongest effective mode
    """

    stream: int
    subarray_size: int
    power: float


@dataclass(frozen=True, eq=False)
class DapSolution:
    """Everything the DAP pipeline produced for one channel.

    Attributes:
        partition: Subarray sets chosen by the partitioner
        triple: Analog, selection and digital precoders
        allocation: Water-filled powers of the effective modes, strongest first
        se_bits: Achieved spectrum efficiency in bits/s/Hz
        spectrum: PSWF spectrum used to pick the stream count, if any
    """

    partition: SubarrayPartition
    triple: PrecoderTriple
    allocation: PowerAllocation
    se_bits: float
    spectrum: PswfSpectrum | None = None

    @property
    def streams(self) -> int:
        return self.triple.streams

    def stream_summaries(self) -> list[StreamSummary]:
        """Return one row per RF chain for reporting."""
        powers = self.allocation.per_stream_power
        return [
            StreamSummary(
                stream=index,
                subarray_size=size,
                power=float(powers[index]) if index < powers.size else 0.0,
            )
            for index, size in enumerate(self.partition.sizes)
        ]
