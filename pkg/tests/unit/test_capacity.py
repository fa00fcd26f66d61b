"""Unit tests for water-filling and capacity."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nearfield_dap.models.errors import PowerAllocationError
from nearfield_dap.models.types import ChannelMatrix, LinkGeometry, PowerAllocation
from nearfield_dap.services.capacity import CapacityAnalyzer
from nearfield_dap.services.channel import ChannelModel
from nearfield_dap.services.pswf import PswfSolver
from tests.fixtures.sample_data import WATER_FILL_CASES, bisection_water_fill

gain_sets = arrays(
    np.float64,
    st.integers(min_value=1, max_value=6),
    elements=st.floats(min_value=1e-3, max_value=1e3),
)


class TestWaterFill:
    """Tests for CapacityAnalyzer.water_fill."""

    @pytest.mark.parametrize(("gains", "total", "noise", "level", "powers"), WATER_FILL_CASES)
    def test_closed_form_cases(
        self,
        gains: list[float],
        total: float,
        noise: float,
        level: float,
        powers: list[float],
    ) -> None:
        """Test allocations with known water levels."""
        allocation = CapacityAnalyzer.water_fill(gains, total, noise)

        assert allocation.water_level == pytest.approx(level)
        np.testing.assert_allclose(allocation.per_stream_power, powers, atol=1e-12)

    def test_single_channel_rate(self) -> None:
        """Test that one unit-gain channel at unit SNR carries one bit."""
        allocation = CapacityAnalyzer.water_fill([1.0], 1.0, 1.0)
        assert CapacityAnalyzer.allocation_rate([1.0], allocation) == pytest.approx(1.0)

    def test_equal_gains_split_evenly(self) -> None:
        """Test that equal gains share the power equally."""
        allocation = CapacityAnalyzer.water_fill([2.0] * 5, 3.0, 0.5)
        np.testing.assert_allclose(allocation.per_stream_power, 0.6)

    def test_keeps_input_order(self) -> None:
        """Test that powers follow the caller's order, not the sorted one."""
        allocation = CapacityAnalyzer.water_fill([0.25, 1.0], 1.0, 0.1)
        np.testing.assert_allclose(allocation.per_stream_power, [0.35, 0.65])

    def test_negligible_gain_gets_nothing(self) -> None:
        """Test that gains at the numerical floor stay unused."""
        allocation = CapacityAnalyzer.water_fill([1.0, 1e-20], 1e6, 1.0)

        assert allocation.active_streams == 1
        assert allocation.per_stream_power[1] == 0.0

    @pytest.mark.parametrize(
        ("gains", "total", "noise"),
        [([0.0, 0.0], 1.0, 1.0), ([], 1.0, 1.0), ([1.0, -1.0], 1.0, 1.0), ([1.0], 0.0, 1.0)],
    )
    def test_invalid_inputs(self, gains: list[float], total: float, noise: float) -> None:
        """Test zero, empty and negative gains and a zero budget."""
        with pytest.raises(PowerAllocationError):
            CapacityAnalyzer.water_fill(gains, total, noise)

    def test_no_usable_subchannel_message(self) -> None:
        """Test the message for all-zero gains."""
        with pytest.raises(PowerAllocationError, match="no usable subchannel"):
            CapacityAnalyzer.water_fill([0.0], 1.0, 1.0)

    @settings(max_examples=200, deadline=None)
    @given(gains=gain_sets, total=st.floats(min_value=1e-2, max_value=1e2))
    def test_matches_bisection_and_kkt(self, gains: np.ndarray, total: float) -> None:
        """Test against a bisection oracle and the KKT conditions."""
        noise = 0.1
        allocation = CapacityAnalyzer.water_fill(gains, total, noise)
        powers = allocation.per_stream_power

        assert powers.sum() == pytest.approx(total, rel=1e-9)
        assert np.all(powers >= 0.0)
        active = powers > 0
        np.testing.assert_allclose(
            powers[active] + noise / gains[active], allocation.water_level, rtol=1e-9
        )
        assert np.all(noise / gains[~active] >= allocation.water_level * (1 - 1e-9))
        np.testing.assert_allclose(
            powers, bisection_water_fill(gains, total, noise), atol=1e-9 * max(total, 1.0)
        )

    @settings(max_examples=200, deadline=None)
    @given(gains=gain_sets, seed=st.integers(min_value=0, max_value=2**32 - 1))
    def test_dominates_random_allocations(self, gains: np.ndarray, seed: int) -> None:
        """Test that no random feasible allocation beats water-filling."""
        total, noise = 1.0, 0.1
        optimum = CapacityAnalyzer.allocation_rate(
            gains, CapacityAnalyzer.water_fill(gains, total, noise)
        )
        candidates = np.random.default_rng(seed).dirichlet(np.ones(gains.size), size=1000)
        rates = np.sum(np.log2(1.0 + candidates * total * gains / noise), axis=1)

        assert np.all(rates <= optimum + 1e-9)


class TestExactCapacity:
    """Tests for CapacityAnalyzer.exact_capacity."""

    def test_identity_channel(self) -> None:
        """Test the 2 x 2 identity channel."""
        report = CapacityAnalyzer.exact_capacity(ChannelMatrix(np.eye(2), 1.0), 2.0, 1.0)

        assert report.capacity_bits == pytest.approx(2.0)
        assert report.method_tag == "exact_svd"

    def test_rank_one_channel(self, far_link: LinkGeometry) -> None:
        """Test the single-subchannel formula on a far-field channel."""
        aod, aoa = ChannelModel.center_angles(far_link)
        channel = ChannelModel.far_field_channel(far_link, aod, aoa)
        report = CapacityAnalyzer.exact_capacity(channel, 1.0, 0.01)

        assert report.capacity_bits == pytest.approx(math.log2(1 + 256 / 0.01), rel=1e-9)

    def test_zero_channel(self) -> None:
        """Test that a zero channel has zero capacity."""
        report = CapacityAnalyzer.exact_capacity(ChannelMatrix(np.zeros((3, 3)), 1.0), 1.0, 1.0)
        assert report.capacity_bits == 0.0

    def test_matches_bisection_oracle(self, small_channel: ChannelMatrix) -> None:
        """Test against a dense SVD with bisection water-filling."""
        noise = 10 ** (-1.5)
        gains = np.linalg.svd(small_channel.entries, compute_uv=False) ** 2
        gains = gains[gains > 1e-14 * gains.max()]
        powers = bisection_water_fill(gains, 1.0, noise)
        expected = float(np.sum(np.log2(1.0 + powers * gains / noise)))

        report = CapacityAnalyzer.exact_capacity(small_channel, 1.0, noise)
        assert report.capacity_bits == pytest.approx(expected, rel=1e-6)

    def test_monotone_in_power(self, small_channel: ChannelMatrix) -> None:
        """Test that more power never lowers capacity."""
        capacities = [
            CapacityAnalyzer.exact_capacity(small_channel, power, 1.0).capacity_bits
            for power in (0.1, 1.0, 10.0)
        ]
        assert capacities == sorted(capacities)

    def test_dropping_modes_lowers_capacity(self, random_channel: ChannelMatrix) -> None:
        """Test that zeroing singular values cannot increase capacity."""
        u, s, vh = np.linalg.svd(random_channel.entries, full_matrices=False)
        s[2:] = 0.0
        truncated = ChannelMatrix((u * s) @ vh, random_channel.wavelength)

        full = CapacityAnalyzer.exact_capacity(random_channel, 1.0, 0.1).capacity_bits
        assert CapacityAnalyzer.exact_capacity(truncated, 1.0, 0.1).capacity_bits <= full


class TestPswfEstimate:
    """Tests for the PSWF-based and equal-power estimates."""

    def test_gains_carry_channel_power(self, small_link: LinkGeometry) -> None:
        """Test that scaled eigenvalues sum to P_H."""
        spectrum = PswfSolver.link_spectrum(small_link, quadrature_order=128)
        assert CapacityAnalyzer.pswf_gains(spectrum, 1024.0).sum() == pytest.approx(1024.0)

    def test_single_eigenvalue_reduces(self) -> None:
        """Test that one eigenvalue gives the single-channel formula."""
        spectrum = PswfSolver.pswf_eigenvalues(0.5, 1, quadrature_order=32)
        report = CapacityAnalyzer.pswf_capacity_estimate(spectrum, 100.0, 1.0, 1.0)

        assert report.capacity_bits == pytest.approx(math.log2(101.0))
        assert report.method_tag == "pswf_waterfill"

    def test_close_to_exact(self, small_link: LinkGeometry, small_channel: ChannelMatrix) -> None:
        """Test that the estimate tracks the exact capacity in the near field."""
        noise = 10 ** (-1.5)
        spectrum = PswfSolver.link_spectrum(small_link, quadrature_order=128)
        exact = CapacityAnalyzer.exact_capacity(small_channel, 1.0, noise).capacity_bits
        estimate = CapacityAnalyzer.pswf_capacity_estimate(
            spectrum, small_channel.power, 1.0, noise
        ).capacity_bits

        assert estimate == pytest.approx(exact, rel=0.2)

    def test_equal_power_single_dof(self) -> None:
        """Test the equal-power formula when the DoF estimate is one."""
        link = LinkGeometry.build(2, 2, 1.0, 1.0, 1.0)
        assert PswfSolver.dof_estimate(link) == pytest.approx(1.0)
        value = CapacityAnalyzer.equal_power_capacity_approx(link, 4.0, 1.0, 1.0)
        assert value == pytest.approx(math.log2(5.0))

    def test_equal_power_vanishes_far_away(self, small_link: LinkGeometry) -> None:
        """Test that the estimate tends to zero as the DoF vanish."""
        value = CapacityAnalyzer.equal_power_capacity_approx(
            small_link.at_distance(1e7), 1.0, 1.0, 1.0
        )
        assert value < 1e-3


class TestOptimalDof:
    """Tests for the DoF count maximizing equal-power capacity."""

    def test_reference_value(self) -> None:
        """Test N* at P P_H / sigma^2 = 1000."""
        assert CapacityAnalyzer.optimal_dof(1.0, 1000.0, 1.0) == pytest.approx(15.97, abs=0.02)
        assert CapacityAnalyzer.optimal_dof_approx(1.0, 1000.0, 1.0) == pytest.approx(
            15.97, abs=0.02
        )

    def test_implied_coefficient(self) -> None:
        """Test that the root gives a coefficient near 0.255."""
        coefficient = CapacityAnalyzer.implied_coefficient(1.0, 65536.0, 0.01)
        assert 0.250 <= coefficient <= 0.260

    def test_square_root_scaling(self) -> None:
        """Test that quadrupling the SNR doubles N*."""
        base = CapacityAnalyzer.optimal_dof(1.0, 100.0, 1.0)
        assert CapacityAnalyzer.optimal_dof(4.0, 100.0, 1.0) == pytest.approx(2 * base)

    def test_maximizes_equal_power_capacity(self) -> None:
        """Test that N* is a maximum of N log2(1 + s / N^2)."""
        snr = 500.0
        optimum = CapacityAnalyzer.optimal_dof(1.0, snr, 1.0)

        def capacity(dof: float) -> float:
            return dof * math.log2(1 + snr / dof**2)

        assert capacity(optimum) >= capacity(0.9 * optimum)
        assert capacity(optimum) >= capacity(1.1 * optimum)

    def test_optimal_distance(self, small_link: LinkGeometry) -> None:
        """Test that the DoF estimate at the optimal distance equals N*."""
        distance = CapacityAnalyzer.optimal_distance(small_link, 1.0, 1.0, 0.05)
        target = CapacityAnalyzer.optimal_dof(1.0, 1.0, 0.05)

        assert PswfSolver.dof_estimate(small_link.at_distance(distance)) == pytest.approx(target)

    def test_invalid_powers(self) -> None:
        """Test that nonpositive inputs are rejected."""
        with pytest.raises(PowerAllocationError):
            CapacityAnalyzer.optimal_dof(0.0, 1.0, 1.0)

    def test_allocation_rate_with_zero_power(self) -> None:
        """Test that zero powers carry no rate."""
        allocation = PowerAllocation(np.zeros(2), 0.0, 1.0, 1.0)
        assert CapacityAnalyzer.allocation_rate([1.0, 2.0], allocation) == 0.0
