"""Line-of-sight channel synthesis for linear arrays.

This module builds element positions for uniform linear arrays and
synthesizes spherical-wave (near-field) and planar-wave (far-field)
channel matrices between a transmit and a receive array.
"""

import logging
import math

import numpy as np
from numpy.typing import NDArray

from nearfield_dap.models.errors import GeometryError
from nearfield_dap.models.types import ArrayGeometry, ChannelMatrix, LinkGeometry

logger = logging.getLogger(__name__)


class ChannelModel:
    """Deterministic LoS channel models.

    All methods are pure; path gains follow the unit-gain convention, so
    every near-field entry has unit magnitude and the channel power is
    exactly Nt * Nr.
    """

    @staticmethod
    def element_positions(array: ArrayGeometry) -> NDArray[np.float64]:
        """Return the element coordinates of a linear array.

        Args:
            array: The array geometry

        Returns:
            An (N, 3) array of positions centred on ``array.center``
        """
        offsets = (np.arange(array.num_elements) - (array.num_elements - 1) / 2.0) * array.spacing
        return np.asarray(array.center, dtype=float) + offsets[:, np.newaxis] * array.axis

    @staticmethod
    def element_distances(link: LinkGeometry) -> NDArray[np.float64]:
        """Return the Nr x Nt matrix of element-pair distances r_pq."""
        rx = ChannelModel.element_positions(link.rx)
        tx = ChannelModel.element_positions(link.tx)
        return np.linalg.norm(rx[:, np.newaxis, :] - tx[np.newaxis, :, :], axis=2)

    @staticmethod
    def near_field_channel(link: LinkGeometry) -> ChannelMatrix:
        """Synthesize the spherical-wave LoS channel.

        Entry (p, q) is exp(-j 2 pi r_pq / lambda).

        Args:
            link: Transmit/receive geometry

        Returns:
            The near-field channel matrix

        Raises:
            GeometryError: If a transmit and a receive element coincide
        """
        distances = ChannelModel.element_distances(link)
        if np.any(distances == 0):
            raise GeometryError("degenerate geometry: coincident transmit and receive elements")

        # Reduce to a fraction of a wavelength before scaling by 2 pi.
        cycles = np.mod(distances / link.wavelength, 1.0)
        entries = np.exp(-2j * np.pi * cycles)
        logger.debug(
            f"[Near-field DAP] Near-field channel {link.num_rx}x{link.num_tx} "
            f"at r={link.distance} m"
        )
        return ChannelMatrix(entries=entries, wavelength=link.wavelength, model_tag="near_field")

    @staticmethod
    def array_response(
        num_elements: int, spacing: float, wavelength: float, angle: float
    ) -> NDArray[np.complex128]:
        """Return the normalized far-field steering vector a(angle).

        Args:
            num_elements: Number of elements N
            spacing: Element spacing d
            wavelength: Carrier wavelength
            angle: Azimuth angle in radians

        Returns:
            Vector (1/sqrt(N)) * exp(j 2 pi n d sin(angle) / lambda)
        """
        phase = 2.0 * np.pi * spacing * math.sin(angle) / wavelength
        return np.exp(1j * phase * np.arange(num_elements)) / math.sqrt(num_elements)

    @staticmethod
    def far_field_channel(link: LinkGeometry, aod: float, aoa: float) -> ChannelMatrix:
        """Synthesize the rank-1 planar-wave LoS channel.

        The matrix is alpha * sqrt(Nt * Nr) * a_r(aoa) a_t(aod)^H, with
        alpha = exp(-j 2 pi r / lambda), so its power matches the unit-gain
        near-field channel.

        Args:
            link: Transmit/receive geometry
            aod: Angle of departure in radians
            aoa: Angle of arrival in radians

        Returns:
            The far-field channel matrix
        """
        a_t = ChannelModel.array_response(link.num_tx, link.tx.spacing, link.wavelength, aod)
        a_r = ChannelModel.array_response(link.num_rx, link.rx.spacing, link.wavelength, aoa)
        gain = math.sqrt(link.num_tx * link.num_rx) * np.exp(
            -2j * np.pi * math.fmod(link.distance / link.wavelength, 1.0)
        )
        entries = gain * np.outer(a_r, a_t.conj())
        return ChannelMatrix(entries=entries, wavelength=link.wavelength, model_tag="far_field")

    @staticmethod
    def center_angles(link: LinkGeometry) -> tuple[float, float]:
        """Return the (AoD, AoA) seen along the line of centres.

        The centres lie on the x axis and each array is tilted away from the
        y axis, so the departure and arrival angles equal the tilts.
        """
        return link.tx.tilt, link.rx.tilt

    @staticmethod
    def rayleigh_distance(aperture: float, wavelength: float) -> float:
        """Return the Rayleigh distance 2 D^2 / lambda.

        Args:
            aperture: Array aperture D in meters
            wavelength: Carrier wavelength in meters

        Returns:
            The near-field boundary in meters
        """
        if aperture <= 0 or wavelength <= 0:
            raise GeometryError("aperture and wavelength must be positive")
        return 2.0 * aperture**2 / wavelength

    @staticmethod
    def normalize(channel: ChannelMatrix, channel_power: float) -> ChannelMatrix:
        """Rescale a channel so that its squared Frobenius norm equals P_H."""
        if channel_power <= 0:
            raise GeometryError(f"channel power must be positive, got {channel_power}")
        scale = math.sqrt(channel_power / channel.power)
        return ChannelMatrix(
            entries=channel.entries * scale,
            wavelength=channel.wavelength,
            model_tag=channel.model_tag,
        )

    @staticmethod
    def correlation(first: ChannelMatrix, second: ChannelMatrix) -> float:
        """Return |<H1, H2>| / (||H1||_F ||H2||_F)."""
        inner = np.vdot(first.entries, second.entries)
        return float(abs(inner) / math.sqrt(first.power * second.power))
