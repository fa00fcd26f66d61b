"""Reference values and brute-force oracles for tests."""

from itertools import combinations

import numpy as np
from numpy.typing import NDArray

# 100 GHz carrier, half-wavelength spacing, 256-element arrays
WAVELENGTH = 299_792_458.0 / 100e9
SPACING = WAVELENGTH / 2.0
LARGE_ARRAY = 256

# (distance, expected 2 c_y / pi) for the 256-element parallel pair
DOF_REFERENCE: list[tuple[float, float]] = [
    (5.0, 9.75),
    (10.0, 4.875),
    (20.0, 2.4375),
]

# (gains, total power, noise power, water level, powers)
WATER_FILL_CASES: list[tuple[list[float], float, float, float, list[float]]] = [
    ([1.0], 1.0, 1.0, 2.0, [1.0]),
    ([1.0, 0.25], 1.0, 0.1, 0.75, [0.65, 0.35]),
    ([4.0, 1.0], 1.0, 1.0, 1.125, [0.875, 0.125]),
    ([4.0, 0.1], 1.0, 1.0, 1.25, [1.0, 0.0]),
]

POWER_MODEL_MW = {
    "p_static": 2500.0,
    "p_rf_chain": 160.0,
    "p_phase_shifter": 10.0,
    "p_switch": 10.0,
    "p_power_amp": 30.0,
}


def bisection_water_fill(
    gains: NDArray[np.float64], total_power: float, noise_power: float
) -> NDArray[np.float64]:
    """Water-filling by bisection on the water level."""
    floors = noise_power / gains
    low, high = 0.0, total_power + float(floors.max())
    for _ in range(200):
        level = 0.5 * (low + high)
        if np.maximum(level - floors, 0.0).sum() > total_power:
            high = level
        else:
            low = level
    return np.maximum(0.5 * (low + high) - floors, 0.0)


def surrogate(magnitudes: NDArray[np.float64], subset: tuple[int, ...]) -> float:
    """Direct double-sum evaluation of the l1 surrogate."""
    total = 0.0
    for i in subset:
        for j in subset:
            total += abs(magnitudes[i, j])
    return total / len(subset)


def best_balanced_split(magnitudes: NDArray[np.float64]) -> float:
    """Best surrogate objective over all balanced two-set partitions."""
    size = magnitudes.shape[0]
    everything = set(range(size))
    best = -np.inf
    for first in combinations(range(size), size // 2):
        second = tuple(sorted(everything - set(first)))
        best = max(best, surrogate(magnitudes, first) + surrogate(magnitudes, second))
    return float(best)


def permutation_matrix(order: NDArray[np.int64]) -> NDArray[np.float64]:
    """Return P with P[order[k], k] = 1."""
    size = order.size
    matrix = np.zeros((size, size))
    matrix[order, np.arange(size)] = 1.0
    return matrix
