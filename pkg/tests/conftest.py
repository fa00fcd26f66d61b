"""Shared pytest fixtures for near-field DAP tests."""

from pathlib import Path

import numpy as np
import pytest

from nearfield_dap.config import SweepConfig
from nearfield_dap.models.types import ChannelMatrix, LinkGeometry
from nearfield_dap.services.channel import ChannelModel
from tests.fixtures.sample_data import SPACING, WAVELENGTH


@pytest.fixture
def rng() -> np.random.Generator:
    """Return a seeded random generator."""
    return np.random.default_rng(20240611)


@pytest.fixture
def small_link() -> LinkGeometry:
    """Return a 32 x 32 parallel link well inside the near field."""
    return LinkGeometry.build(
        num_tx=32, num_rx=32, spacing=SPACING, wavelength=WAVELENGTH, distance=0.2
    )


@pytest.fixture
def small_channel(small_link: LinkGeometry) -> ChannelMatrix:
    """Return the near-field channel of the small link."""
    return ChannelModel.near_field_channel(small_link)


@pytest.fixture
def far_link() -> LinkGeometry:
    """Return a 16 x 16 link far beyond its Rayleigh distance."""
    return LinkGeometry.build(
        num_tx=16, num_rx=16, spacing=SPACING, wavelength=WAVELENGTH, distance=50.0
    )


@pytest.fixture
def random_channel(rng: np.random.Generator) -> ChannelMatrix:
    """Return an 8 x 12 i.i.d. complex Gaussian channel."""
    entries = rng.standard_normal((8, 12)) + 1j * rng.standard_normal((8, 12))
    return ChannelMatrix(entries=entries / np.sqrt(2.0), wavelength=WAVELENGTH)


@pytest.fixture
def small_config(tmp_path: Path) -> SweepConfig:
    """Return a quick sweep over a 32-element pair."""
    return SweepConfig(
        num_tx=32,
        num_rx=32,
        distances=[0.2, 0.5],
        snrs_db=[20.0],
        architectures=["dap", "fully_digital", "fully_connected:4", "sub_connected_static:4"],
        quadrature_order=128,
        output_path=tmp_path / "sweep.csv",
    )
