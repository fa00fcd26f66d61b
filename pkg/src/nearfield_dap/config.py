"""Configuration settings for the near-field DAP toolkit."""

import math
from pathlib import Path
from typing import Any

import numpy as np
from dotenv import dotenv_values
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    ValidationInfo,
    field_validator,
)
from pydantic_settings import BaseSettings, SettingsConfigDict

from nearfield_dap.models.errors import ConfigError
from nearfield_dap.models.types import ArchitectureSpec, LinkGeometry

# Physical constants
SPEED_OF_LIGHT = 299_792_458.0

# Simulation defaults
DEFAULT_CARRIER_FREQUENCY = 100e9
DEFAULT_NUM_ELEMENTS = 256
DEFAULT_SPACING_OVER_WAVELENGTH = 0.5
DEFAULT_QUADRATURE_ORDER = 512

# Numerical tolerances
DEGENERACY_TOLERANCE = 1e-12
NEGLIGIBLE_GAIN_RATIO = 1e-14

# Power model constants (mW)
P_STATIC_MW = 2500.0
P_RF_CHAIN_MW = 160.0
P_PHASE_SHIFTER_MW = 10.0
P_SWITCH_MW = 10.0
P_POWER_AMP_MW = 30.0

# Equal-power capacity optimum, N*^2 ~ 0.255 P P_H / sigma^2
OPTIMAL_DOF_COEFFICIENT = 0.255

CSV_SCHEMA_VERSION = 1


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="DAP_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Solver configuration
    quadrature_order: int = DEFAULT_QUADRATURE_ORDER
    bound_slack: int = 2
    degeneracy_tolerance: float = DEGENERACY_TOLERANCE
    negligible_gain_ratio: float = NEGLIGIBLE_GAIN_RATIO

    # Sweep execution
    max_workers: int = 4
    output_dir: Path = Path("results")

    # Downlink power model
    p_static_mw: float = P_STATIC_MW
    p_rf_chain_mw: float = P_RF_CHAIN_MW
    p_phase_shifter_mw: float = P_PHASE_SHIFTER_MW
    p_switch_mw: float = P_SWITCH_MW
    p_power_amp_mw: float = P_POWER_AMP_MW

    # Logging
    log_level: str = "INFO"


settings = Settings()


FIGURE_IDS = ("fig2", "fig3", "fig5", "fig6", "fig7", "fig8")

_COMPARISON_ARCHITECTURES = [
    "dap",
    "fully_digital",
    "fully_connected:8",
    "fully_connected:4",
    "sub_connected_static:8",
    "sub_connected_static:4",
]

# Figure presets, applied on top of the SweepConfig defaults.
FIGURE_PRESETS: dict[str, dict[str, Any]] = {
    "fig2": {
        "distances": [5.0, 10.0, 20.0],
        "snrs_db": [15.0],
        "architectures": ["fully_digital"],
        "spectrum_count": 24,
    },
    "fig3": {
        "distances": np.geomspace(1.0, 100.0, 31).tolist(),
        "snrs_db": [15.0],
        "architectures": ["fully_digital"],
    },
    "fig5": {
        "distances": np.geomspace(1.0, 100.0, 16).tolist(),
        "snrs_db": [30.0],
        "architectures": _COMPARISON_ARCHITECTURES,
    },
    "fig6": {
        "distances": [3.0],
        "snrs_db": [20.0, 22.0, 24.0, 26.0, 28.0, 30.0],
        "architectures": _COMPARISON_ARCHITECTURES,
    },
    "fig7": {
        "distances": np.geomspace(1.0, 100.0, 16).tolist(),
        "snrs_db": [30.0],
        "architectures": _COMPARISON_ARCHITECTURES,
    },
    "fig8": {
        "distances": [2.0],
        "snrs_db": [30.0, 35.0, 40.0],
        "architectures": [
            "fully_digital",
            "dap",
            "dap:12",
            "dap:8",
            "dap:4",
            "fully_connected",
            "fully_connected:12",
            "fully_connected:8",
            "fully_connected:4",
        ],
    },
}


def _split_list(value: Any) -> Any:
    """Split a comma-separated string into a list of stripped items."""
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class SweepConfig(BaseModel):
    """One experiment: link parameters and the sweep axes.

    Loaded from a key-value file (dotenv syntax, lists comma separated) and
    optionally overridden from the command line.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    carrier_frequency: float = Field(default=DEFAULT_CARRIER_FREQUENCY, gt=0)
    num_tx: int = Field(default=DEFAULT_NUM_ELEMENTS, ge=1)
    num_rx: int = Field(default=DEFAULT_NUM_ELEMENTS, ge=1)
    spacing_over_wavelength: float = Field(default=DEFAULT_SPACING_OVER_WAVELENGTH, gt=0)
    tx_tilt: float = Field(default=0.0, gt=-math.pi / 2, lt=math.pi / 2)
    rx_tilt: float = Field(default=0.0, gt=-math.pi / 2, lt=math.pi / 2)
    distances: list[float] = Field(default_factory=lambda: [5.0], min_length=1)
    snrs_db: list[float] = Field(default_factory=lambda: [30.0], min_length=1)
    architectures: list[str] = Field(default_factory=lambda: ["dap"], min_length=1)
    bound_slack: int = Field(default_factory=lambda: settings.bound_slack, ge=0)
    quadrature_order: int = Field(default_factory=lambda: settings.quadrature_order, ge=1)
    total_power: float = Field(default=1.0, gt=0)
    # P_H of the evaluated channel; None keeps the unit-gain Nt * Nr channel
    channel_power: float | None = Field(default=1.0, gt=0)
    spectrum_count: int | None = Field(default=None, ge=1)
    output_path: Path = Field(default_factory=lambda: settings.output_dir / "sweep.csv")

    @field_validator("distances", "snrs_db", "architectures", mode="before")
    @classmethod
    def _split(cls, value: Any) -> Any:
        return _split_list(value)

    @field_validator("channel_power", mode="before")
    @classmethod
    def _raw_channel_power(cls, value: Any) -> Any:
        if isinstance(value, str) and value.strip().lower() in {"", "none", "raw"}:
            return None
        return value

    @field_validator("distances")
    @classmethod
    def _positive_distances(cls, value: list[float]) -> list[float]:
        if any(not distance > 0 for distance in value):
            raise ValueError("distances must be positive")
        return value

    @field_validator("architectures")
    @classmethod
    def _known_architectures(cls, value: list[str], info: ValidationInfo) -> list[str]:
        antennas = info.data.get("num_tx", DEFAULT_NUM_ELEMENTS)
        for token in value:
            ArchitectureSpec.parse(token, antennas)
        return value

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def spacing(self) -> float:
        return self.spacing_over_wavelength * self.wavelength

    def noise_power(self, snr_db: float) -> float:
        """Return sigma_n^2 = P_tot / 10^(SNR/10)."""
        return self.total_power / 10.0 ** (snr_db / 10.0)

    def architecture_specs(self) -> list[ArchitectureSpec]:
        return [ArchitectureSpec.parse(token, self.num_tx) for token in self.architectures]

    def link(self, distance: float) -> LinkGeometry:
        """Return the link geometry at a given separation."""
        return LinkGeometry.build(
            num_tx=self.num_tx,
            num_rx=self.num_rx,
            spacing=self.spacing,
            wavelength=self.wavelength,
            distance=distance,
            tx_tilt=self.tx_tilt,
            rx_tilt=self.rx_tilt,
        )

    @classmethod
    def build(cls, values: dict[str, Any]) -> "SweepConfig":
        """Validate raw values, reporting the offending key as a ConfigError."""
        try:
            return cls.model_validate(values)
        except ValidationError as e:
            first = e.errors()[0]
            key = ".".join(str(part) for part in first["loc"]) or "config"
            raise ConfigError(f"invalid config key '{key}': {first['msg']}") from e

    @classmethod
    def from_file(cls, path: Path) -> "SweepConfig":
        """Load a key-value experiment file.

        Raises:
            ConfigError: If the file is missing or a value is invalid
        """
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        raw = dotenv_values(path)
        values: dict[str, Any] = {}
        for key, value in raw.items():
            if value is None:
                raise ConfigError(f"invalid config key '{key}': missing value")
            values[key.strip().lower()] = value
        return cls.build(values)

    @classmethod
    def preset(cls, figure_id: str) -> "SweepConfig":
        """Return the configuration reproducing one figure."""
        if figure_id not in FIGURE_PRESETS:
            raise ConfigError(
                f"unknown figure '{figure_id}', expected one of {', '.join(FIGURE_IDS)}"
            )
        values = dict(FIGURE_PRESETS[figure_id])
        values["output_path"] = settings.output_dir / f"{figure_id}.csv"
        return cls.build(values)

    def with_overrides(self, **overrides: Any) -> "SweepConfig":
        """Return a copy with the given non-None values replaced and revalidated."""
        updates = {key: value for key, value in overrides.items() if value is not None}
        if not updates:
            return self
        return self.build({**self.model_dump(), **updates})
