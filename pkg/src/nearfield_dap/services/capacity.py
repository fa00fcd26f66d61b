"""Channel capacity and water-filling power allocation.

This module provides the exact SVD water-filling capacity of a channel,
the estimate obtained from sinc-kernel eigenvalues, and the closed-form
equal-power approximation built on the degrees-of-freedom estimate.
"""

import logging
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg, optimize

from nearfield_dap.config import OPTIMAL_DOF_COEFFICIENT, settings
from nearfield_dap.models.errors import PowerAllocationError
from nearfield_dap.models.types import (
    CapacityReport,
    ChannelMatrix,
    LinkGeometry,
    MethodTag,
    PowerAllocation,
    PswfSpectrum,
)
from nearfield_dap.services.pswf import PswfSolver

logger = logging.getLogger(__name__)


class CapacityAnalyzer:
    """Capacity computations over parallel Gaussian subchannels."""

    @staticmethod
    def water_fill(
        gains: ArrayLike,
        total_power: float,
        noise_power: float,
    ) -> PowerAllocation:
        """Allocate power over parallel subchannels by water-filling.

        Subchannels are sorted by gain and the weakest active one is dropped
        until every remaining subchannel sits below the water level. Ties keep
        their original index order. Gains below the negligible-gain ratio of
        the strongest are treated as unusable and receive zero power.

        Args:
            gains: Squared singular values lambda_i^2
            total_power: Power budget P_tot
            noise_power: Noise power sigma_n^2

        Returns:
            The allocation, aligned with the input order

        Raises:
            PowerAllocationError: If no subchannel has a positive gain or
                the budget is not positive
        """
        values = np.asarray(gains, dtype=float).ravel()
        if not total_power > 0:
            raise PowerAllocationError(f"total power must be positive, got {total_power}")
        if not noise_power > 0:
            raise PowerAllocationError(f"noise power must be positive, got {noise_power}")
        if values.size == 0 or not np.any(values > 0):
            raise PowerAllocationError("no usable subchannel")
        if np.any(values < 0):
            raise PowerAllocationError("gains must be nonnegative")

        usable = values > settings.negligible_gain_ratio * values.max()
        indices = np.flatnonzero(usable)
        order = indices[np.argsort(-values[indices], kind="stable")]
        floors = noise_power / values[order]

        active = order.size
        level = (total_power + floors.sum()) / active
        while active > 1 and level <= floors[active - 1]:
            active -= 1
            level = (total_power + floors[:active].sum()) / active

        powers = np.zeros_like(values)
        powers[order[:active]] = np.maximum(level - floors[:active], 0.0)
        logger.debug(
            f"[Near-field DAP] Water level {level:.6g} with {active} of {values.size} subchannels"
        )
        return PowerAllocation(
            per_stream_power=powers,
            water_level=float(level),
            total_power=total_power,
            noise_power=noise_power,
        )

    @staticmethod
    def allocation_rate(gains: ArrayLike, allocation: PowerAllocation) -> float:
        """Return sum_i log2(1 + p_i g_i / sigma^2) for an allocation."""
        values = np.asarray(gains, dtype=float).ravel()
        snr = allocation.per_stream_power * values / allocation.noise_power
        return float(np.sum(np.log2(1.0 + snr)))

    @staticmethod
    def _report(
        singular_values: NDArray[np.float64],
        total_power: float,
        noise_power: float,
        method_tag: MethodTag,
    ) -> CapacityReport:
        gains = singular_values**2
        if gains.size == 0 or not np.any(gains > 0):
            allocation = PowerAllocation(np.zeros_like(gains), 0.0, total_power, noise_power)
            return CapacityReport(0.0, singular_values, allocation, method_tag)

        allocation = CapacityAnalyzer.water_fill(gains, total_power, noise_power)
        capacity = CapacityAnalyzer.allocation_rate(gains, allocation)
        return CapacityReport(
            capacity_bits=capacity,
            singular_values=singular_values,
            allocation=allocation,
            method_tag=method_tag,
        )

    @staticmethod
    def exact_capacity(
        channel: ChannelMatrix,
        total_power: float,
        noise_power: float,
    ) -> CapacityReport:
        """Return the SVD water-filling capacity of a channel.

        Args:
            channel: Channel matrix H
            total_power: Power budget P_tot
            noise_power: Noise power sigma_n^2

        Returns:
            Capacity report tagged ``exact_svd``
        """
        singular_values = linalg.svd(channel.entries, compute_uv=False)
        return CapacityAnalyzer._report(singular_values, total_power, noise_power, "exact_svd")

    @staticmethod
    def pswf_gains(spectrum: PswfSpectrum, channel_power: float) -> NDArray[np.float64]:
        """Scale eigenvalues so that they sum to the channel power P_H."""
        eigenvalues = spectrum.eigenvalues
        total = float(eigenvalues.sum())
        if not total > 0:
            raise PowerAllocationError("no usable subchannel")
        return eigenvalues * (channel_power / total)

    @staticmethod
    def pswf_capacity_estimate(
        spectrum: PswfSpectrum,
        channel_power: float,
        total_power: float,
        noise_power: float,
    ) -> CapacityReport:
        """Estimate capacity by water-filling over scaled PSWF eigenvalues.

        The squared singular values are taken as upsilon_n * P_H / sum(upsilon).
        """
        gains = CapacityAnalyzer.pswf_gains(spectrum, channel_power)
        return CapacityAnalyzer._report(np.sqrt(gains), total_power, noise_power, "pswf_waterfill")

    @staticmethod
    def equal_power_capacity_approx(
        link: LinkGeometry,
        channel_power: float,
        total_power: float,
        noise_power: float,
    ) -> float:
        """Return N log2(1 + P P_H / (sigma^2 N^2)) with N the DoF estimate."""
        dof = PswfSolver.dof_estimate(link)
        if dof <= 0:
            return 0.0
        snr = total_power * channel_power / noise_power
        return dof * math.log2(1.0 + snr / dof**2)

    @staticmethod
    def optimal_dof(total_power: float, channel_power: float, noise_power: float) -> float:
        """Return the DoF count maximizing the equal-power capacity.

        Solves (N^2 sigma^2 / (P P_H) + 1) log2(1 + P P_H / (N^2 sigma^2)) = 2 / ln 2
        by bracketed root finding.
        """
        if min(total_power, channel_power, noise_power) <= 0:
            raise PowerAllocationError("powers must be positive")
        snr = total_power * channel_power / noise_power

        def stationarity(dof: float) -> float:
            ratio = snr / dof**2
            return (1.0 / ratio + 1.0) * math.log1p(ratio) - 2.0

        scale = math.sqrt(snr)
        return float(optimize.brentq(stationarity, scale * 1e-3, scale * 1e3, xtol=1e-14 * scale))

    @staticmethod
    def optimal_dof_approx(total_power: float, channel_power: float, noise_power: float) -> float:
        """Return the closed-form approximation sqrt(0.255 P P_H / sigma^2)."""
        return math.sqrt(OPTIMAL_DOF_COEFFICIENT * total_power * channel_power / noise_power)

    @staticmethod
    def implied_coefficient(total_power: float, channel_power: float, noise_power: float) -> float:
        """Return N*^2 sigma^2 / (P P_H), the constant behind the approximation."""
        dof = CapacityAnalyzer.optimal_dof(total_power, channel_power, noise_power)
        return dof**2 * noise_power / (total_power * channel_power)

    @staticmethod
    def optimal_distance(
        link: LinkGeometry,
        total_power: float,
        channel_power: float,
        noise_power: float,
    ) -> float:
        """Return the distance at which the DoF estimate equals the optimal DoF.

        The DoF estimate scales as 1/r, so the distance follows directly from
        the estimate at the link's current separation.
        """
        dof_here = PswfSolver.dof_estimate(link)
        target = CapacityAnalyzer.optimal_dof(total_power, channel_power, noise_power)
        return dof_here * link.distance / target
