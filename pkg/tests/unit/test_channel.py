"""Unit tests for the channel model."""

import math

import numpy as np
import pytest

from nearfield_dap.models.errors import GeometryError
from nearfield_dap.models.types import ArrayGeometry, ChannelMatrix, LinkGeometry
from nearfield_dap.services.channel import ChannelModel
from tests.fixtures.sample_data import LARGE_ARRAY, SPACING, WAVELENGTH


class TestElementPositions:
    """Tests for ChannelModel.element_positions."""

    def test_single_element_at_center(self) -> None:
        """Test that one element sits at the array centre."""
        positions = ChannelModel.element_positions(ArrayGeometry(1, 1.0))
        np.testing.assert_allclose(positions, [[0.0, 0.0, 0.0]])

    def test_two_elements_symmetric(self) -> None:
        """Test that two elements sit at +-d/2 along the axis."""
        positions = ChannelModel.element_positions(ArrayGeometry(2, 1.0))
        np.testing.assert_allclose(positions, [[0.0, -0.5, 0.0], [0.0, 0.5, 0.0]])

    def test_uniform_spacing_and_centroid(self) -> None:
        """Test consecutive gaps equal the spacing and the centroid is the centre."""
        array = ArrayGeometry(5, 2.0, tilt=0.4, center=(3.0, 0.0, 0.0))
        positions = ChannelModel.element_positions(array)

        gaps = np.linalg.norm(np.diff(positions, axis=0), axis=1)
        np.testing.assert_allclose(gaps, 2.0)
        np.testing.assert_allclose(positions.mean(axis=0), [3.0, 0.0, 0.0], atol=1e-12)


class TestNearFieldChannel:
    """Tests for ChannelModel.near_field_channel."""

    def test_single_pair_one_wavelength(self) -> None:
        """Test that a one-wavelength path wraps to phase zero."""
        link = LinkGeometry.build(1, 1, 1.0, 0.003, 0.003)
        channel = ChannelModel.near_field_channel(link)

        np.testing.assert_allclose(channel.entries, [[1.0 + 0.0j]], atol=1e-12)

    def test_matches_pairwise_distances(self) -> None:
        """Test entries against a per-element distance computation."""
        link = LinkGeometry.build(2, 2, SPACING, WAVELENGTH, 10 * WAVELENGTH)
        channel = ChannelModel.near_field_channel(link)

        tx = [(0.0, -SPACING / 2, 0.0), (0.0, SPACING / 2, 0.0)]
        rx = [(10 * WAVELENGTH, -SPACING / 2, 0.0), (10 * WAVELENGTH, SPACING / 2, 0.0)]
        for p, receiver in enumerate(rx):
            for q, transmitter in enumerate(tx):
                distance = math.dist(receiver, transmitter)
                expected = np.exp(-2j * np.pi * distance / WAVELENGTH)
                assert channel.entries[p, q] == pytest.approx(expected, abs=1e-9)

    def test_phase_wraps_every_wavelength(self) -> None:
        """Test that adding whole wavelengths to every path leaves H unchanged."""
        link = LinkGeometry.build(4, 4, SPACING, WAVELENGTH, 0.05, tx_tilt=0.2)
        channel = ChannelModel.near_field_channel(link)
        shifted = ChannelModel.element_distances(link) + 3 * WAVELENGTH

        np.testing.assert_allclose(
            channel.entries, np.exp(-2j * np.pi * shifted / WAVELENGTH), atol=1e-9
        )
        single = ChannelModel.near_field_channel(LinkGeometry.build(1, 1, 1.0, 0.003, 0.0101))
        moved = ChannelModel.near_field_channel(
            LinkGeometry.build(1, 1, 1.0, 0.003, 0.0101 + 7 * 0.003)
        )
        np.testing.assert_allclose(single.entries, moved.entries, atol=1e-9)

    def test_unit_gain_power(self) -> None:
        """Test that every entry has unit magnitude."""
        link = LinkGeometry.build(LARGE_ARRAY, LARGE_ARRAY, SPACING, WAVELENGTH, 5.0)
        channel = ChannelModel.near_field_channel(link)

        assert channel.entries.shape == (LARGE_ARRAY, LARGE_ARRAY)
        assert channel.power == pytest.approx(65536.0)
        assert channel.model_tag == "near_field"

    def test_reciprocity(self) -> None:
        """Test that swapping the ends with mirrored tilts transposes the channel."""
        forward = LinkGeometry.build(8, 6, SPACING, WAVELENGTH, 0.05, tx_tilt=0.3, rx_tilt=-0.2)
        reverse = LinkGeometry.build(6, 8, SPACING, WAVELENGTH, 0.05, tx_tilt=0.2, rx_tilt=-0.3)

        np.testing.assert_allclose(
            ChannelModel.near_field_channel(reverse).entries,
            ChannelModel.near_field_channel(forward).entries.T,
            atol=1e-9,
        )

    def test_coincident_elements(self) -> None:
        """Test that touching elements raise a degenerate geometry error."""
        tilt = math.pi / 6
        link = LinkGeometry.build(2, 2, 1.0, 1.0, math.sin(tilt), tx_tilt=tilt, rx_tilt=-tilt)

        with pytest.raises(GeometryError, match="degenerate geometry"):
            ChannelModel.near_field_channel(link)


class TestFarFieldChannel:
    """Tests for the planar-wave channel and its limit."""

    def test_single_element_response(self) -> None:
        """Test the single-element steering vector."""
        np.testing.assert_allclose(ChannelModel.array_response(1, 1.0, 1.0, 0.7), [1.0])

    def test_broadside_response(self) -> None:
        """Test that four elements at broadside give equal weights of one half."""
        response = ChannelModel.array_response(4, SPACING, WAVELENGTH, 0.0)
        np.testing.assert_allclose(response, [0.5, 0.5, 0.5, 0.5])

    def test_rank_one_with_matching_power(self, far_link: LinkGeometry) -> None:
        """Test that the far-field channel is rank one with power Nt * Nr."""
        aod, aoa = ChannelModel.center_angles(far_link)
        channel = ChannelModel.far_field_channel(far_link, aod, aoa)

        assert np.linalg.matrix_rank(channel.entries) == 1
        assert channel.power == pytest.approx(256.0)
        assert channel.model_tag == "far_field"

    def test_center_angles_are_tilts(self) -> None:
        """Test that the line-of-centres angles equal the tilts."""
        link = LinkGeometry.build(4, 4, 0.5, 1.0, 10.0, tx_tilt=0.25, rx_tilt=-0.1)
        assert ChannelModel.center_angles(link) == (0.25, -0.1)

    def test_converges_beyond_rayleigh(self, far_link: LinkGeometry) -> None:
        """Test the near-field channel approaches the far-field one with distance."""
        rayleigh = ChannelModel.rayleigh_distance(far_link.tx.aperture, far_link.wavelength)
        far = far_link.at_distance(100.0 * rayleigh)
        near = far_link.at_distance(0.05 * rayleigh)

        def correlation(link: LinkGeometry) -> float:
            aod, aoa = ChannelModel.center_angles(link)
            return ChannelModel.correlation(
                ChannelModel.near_field_channel(link),
                ChannelModel.far_field_channel(link, aod, aoa),
            )

        assert correlation(far) >= 0.99
        assert correlation(near) < correlation(far)

    def test_converges_for_tilted_arrays(self) -> None:
        """Test the far-field limit with tilted arrays."""
        base = LinkGeometry.build(16, 16, SPACING, WAVELENGTH, 1.0, tx_tilt=0.3, rx_tilt=-0.4)
        rayleigh = ChannelModel.rayleigh_distance(base.tx.aperture, base.wavelength)
        link = base.at_distance(100.0 * rayleigh)
        aod, aoa = ChannelModel.center_angles(link)

        correlation = ChannelModel.correlation(
            ChannelModel.near_field_channel(link),
            ChannelModel.far_field_channel(link, aod, aoa),
        )
        assert correlation >= 0.99


class TestHelpers:
    """Tests for Rayleigh distance and normalization."""

    def test_rayleigh_distance(self) -> None:
        """Test 2 D^2 / lambda."""
        assert ChannelModel.rayleigh_distance(0.5, 0.003) == pytest.approx(2 * 0.25 / 0.003)

    @pytest.mark.parametrize(
        ("num_elements", "wavelength", "expected"),
        [(1000, 0.001, 499.0), (256, 0.003, 97.5)],
    )
    def test_rayleigh_distance_of_half_wavelength_arrays(
        self, num_elements: int, wavelength: float, expected: float
    ) -> None:
        """Test the near-field boundary of half-wavelength spaced arrays."""
        aperture = ArrayGeometry(num_elements, wavelength / 2).aperture
        assert ChannelModel.rayleigh_distance(aperture, wavelength) == pytest.approx(
            expected, rel=2e-3
        )

    def test_rayleigh_distance_rejects_zero(self) -> None:
        """Test that a zero aperture is rejected."""
        with pytest.raises(GeometryError):
            ChannelModel.rayleigh_distance(0.0, 0.003)

    def test_normalize(self, small_channel: ChannelMatrix) -> None:
        """Test rescaling to a target channel power."""
        normalized = ChannelModel.normalize(small_channel, 1.0)

        assert normalized.power == pytest.approx(1.0)
        assert ChannelModel.correlation(normalized, small_channel) == pytest.approx(1.0)
