"""Sinc-kernel eigenvalues and degrees-of-freedom estimates.

The eigenvalues of the integral operator with kernel
sin(c (x - y)) / (pi (x - y)) on [-1, 1] are the concentration values of the
prolate spheroidal wave functions. They stay close to one up to index 2c/pi
and then fall off exponentially, which is what makes them a proxy for the
singular values of a near-field LoS channel.
"""

import logging
import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import NDArray
from scipy import linalg

from nearfield_dap.config import settings
from nearfield_dap.models.errors import SpectrumError
from nearfield_dap.models.types import LinkGeometry, PswfSpectrum

logger = logging.getLogger(__name__)


class PswfSolver:
    """Nystrom solver for the sinc-kernel eigenproblem."""

    @staticmethod
    def bandwidth_parameter(link: LinkGeometry) -> float:
        """Return the aperture bandwidth c_y of a link.

        c_y = pi (Nt - 1)(Nr - 1) d_t d_r cos(theta) cos(phi) / (2 lambda r)

        Args:
            link: Transmit/receive geometry

        Returns:
            The dimensionless bandwidth parameter
        """
        apertures = link.tx.aperture * link.rx.aperture
        tilts = math.cos(link.tx.tilt) * math.cos(link.rx.tilt)
        return math.pi * apertures * tilts / (2.0 * link.wavelength * link.distance)

    @staticmethod
    def dof_estimate(link: LinkGeometry) -> float:
        """Return the degrees-of-freedom estimate 2 c_y / pi."""
        return 2.0 * PswfSolver.bandwidth_parameter(link) / math.pi

    @staticmethod
    def kernel_matrix(c_y: float, quadrature_order: int) -> tuple[NDArray[np.float64], float]:
        """Return the symmetrized Nystrom matrix W^1/2 K W^1/2 and its trace."""
        nodes, weights = leggauss(quadrature_order)
        # np.sinc(x) = sin(pi x) / (pi x) and evaluates to 1 at x = 0, so the
        # diagonal is c/pi without special casing.
        kernel = (c_y / math.pi) * np.sinc(c_y * np.subtract.outer(nodes, nodes) / math.pi)
        root_weights = np.sqrt(weights)
        matrix = root_weights[:, np.newaxis] * kernel * root_weights[np.newaxis, :]
        return matrix, float(np.trace(matrix))

    @staticmethod
    def pswf_eigenvalues(
        c_y: float,
        count: int,
        quadrature_order: int | None = None,
    ) -> PswfSpectrum:
        """Compute the leading eigenvalues of the sinc kernel.

        Args:
            c_y: Bandwidth parameter, must be positive
            count: Number of leading eigenvalues to return
            quadrature_order: Gauss-Legendre order (defaults to settings)

        Returns:
            The spectrum, sorted in decreasing order and clipped to [0, 1]

        Raises:
            SpectrumError: If c_y is not positive or count is out of range
        """
        order = quadrature_order or settings.quadrature_order
        if not c_y > 0:
            raise SpectrumError(f"empty spectrum: c_y must be positive, got {c_y}")
        if not 1 <= count <= order:
            raise SpectrumError(f"count must lie in [1, {order}], got {count}")

        matrix, trace = PswfSolver.kernel_matrix(c_y, order)
        values = linalg.eigh(
            matrix, eigvals_only=True, subset_by_index=[order - count, order - 1]
        )
        eigenvalues = np.clip(values[::-1], 0.0, 1.0)
        logger.debug(
            f"[Near-field DAP] PSWF spectrum c_y={c_y:.4f}, order={order}, "
            f"leading={eigenvalues[0]:.6f}, trace={trace:.6f}"
        )
        return PswfSpectrum(
            c_y=c_y,
            eigenvalues=eigenvalues,
            quadrature_order=order,
            total_trace=trace,
        )

    @staticmethod
    def link_spectrum(
        link: LinkGeometry,
        count: int | None = None,
        quadrature_order: int | None = None,
    ) -> PswfSpectrum:
        """Compute the spectrum for a link.

        By default enough eigenvalues are returned to cover the knee with a
        comfortable tail: max(8, 3 * ceil(2 c_y / pi) + 8), capped at the
        smaller array size.
        """
        c_y = PswfSolver.bandwidth_parameter(link)
        order = quadrature_order or settings.quadrature_order
        if count is None:
            knee = math.ceil(2.0 * c_y / math.pi) if c_y > 0 else 0
            count = max(8, 3 * knee + 8)
        count = min(count, order, link.num_tx, link.num_rx)
        return PswfSolver.pswf_eigenvalues(c_y, count, order)

    @staticmethod
    def crossing_index(values: NDArray[np.float64], fraction: float = 0.5) -> int:
        """Return the first index whose value drops below fraction * max.

        Returns len(values) if no value drops below the threshold.
        """
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            raise SpectrumError("empty spectrum")
        below = np.flatnonzero(values < fraction * float(values.max()))
        return int(below[0]) if below.size else int(values.size)

    @staticmethod
    def is_strictly_decreasing(spectrum: PswfSpectrum, tolerance: float | None = None) -> bool:
        """Check the strict decrease of eigenvalues above the tolerance floor."""
        tol = settings.degeneracy_tolerance if tolerance is None else tolerance
        significant = spectrum.eigenvalues[spectrum.eigenvalues > tol]
        return bool(np.all(np.diff(significant) < tol))
