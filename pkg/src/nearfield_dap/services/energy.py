"""Downlink power consumption and energy efficiency."""

import logging

from nearfield_dap.config import settings
from nearfield_dap.models.errors import DapError
from nearfield_dap.models.types import ArchitectureSpec, PowerModel

logger = logging.getLogger(__name__)


class EnergyModel:
    """Energy efficiency of a precoding architecture."""

    @staticmethod
    def power_model() -> PowerModel:
        """Return the power model configured in settings."""
        return PowerModel(
            p_static=settings.p_static_mw,
            p_rf_chain=settings.p_rf_chain_mw,
            p_phase_shifter=settings.p_phase_shifter_mw,
            p_switch=settings.p_switch_mw,
            p_power_amp=settings.p_power_amp_mw,
        )

    @staticmethod
    def consumed_power_mw(
        arch: ArchitectureSpec, model: PowerModel, streams: int | None = None
    ) -> float:
        """Return P_T + N_RF P_RF + N_PS P_PS + N_SW P_SW + Nt P_PA in mW.

        Args:
            arch: Architecture and RF chain budget
            model: Power consumption constants
            streams: Active RF chains; required for DAP with an adaptive count

        Returns:
            Consumed power in mW
        """
        rf_chains = streams if streams is not None else arch.rf_chains
        if arch.kind == "fully_digital":
            rf_chains = arch.antennas
        if rf_chains is None:
            raise DapError(f"architecture '{arch.label}' needs an active stream count")
        return (
            model.p_static
            + rf_chains * model.p_rf_chain
            + arch.phase_shifters(rf_chains) * model.p_phase_shifter
            + arch.switches(rf_chains) * model.p_switch
            + arch.antennas * model.p_power_amp
        )

    @staticmethod
    def energy_efficiency(
        se: float,
        arch: ArchitectureSpec,
        model: PowerModel,
        transmit_power: float,
        streams: int | None = None,
        include_transmit_power: bool = False,
    ) -> float:
        """Return SE divided by the consumed power, in bits/s/Hz/W.

        Args:
            se: Spectrum efficiency in bits/s/Hz
            arch: Architecture and RF chain budget
            model: Power consumption constants
            transmit_power: Radiated power in watts
            streams: Active RF chains (defaults to ``arch.rf_chains``)
            include_transmit_power: Add the radiated power to the consumption;
                off by default, matching the circuit-only model

        Returns:
            Energy efficiency eta

        Raises:
            DapError: If se is negative
        """
        if se < 0:
            raise DapError(f"spectrum efficiency must be nonnegative, got {se}")
        consumed = EnergyModel.consumed_power_mw(arch, model, streams)
        if include_transmit_power:
            consumed += transmit_power * 1000.0
        return se / (consumed / 1000.0)
