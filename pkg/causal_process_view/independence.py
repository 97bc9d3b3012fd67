"""
Permutation-calibrated distance-correlation independence test.
"""

import zlib
from typing import Optional

import dcor
import numpy as np


def name_key(name: str) -> int:
    """Stable 32-bit key of an activity name, used to seed random streams."""
    return zlib.crc32(name.encode("utf-8"))


def seeded_rng(seed: int, *names: str) -> np.random.Generator:
    """PCG64 generator seeded from a global seed and a list of activity names."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFF] + [name_key(name) for name in names])


def distance_correlation(u: np.ndarray, x: np.ndarray) -> float:
    """Bias-corrected squared distance correlation of two 1-D samples."""
    return float(dcor.u_distance_correlation_sqr(
        np.ascontiguousarray(u, dtype=float),
        np.ascontiguousarray(x, dtype=float),
    ))


def independence_test(
    u: np.ndarray,
    x: np.ndarray,
    n_permutations: int = 200,
    rng: Optional[np.random.Generator] = None
) -> float:
    """
    Test whether ``u`` is independent of ``x``.

    The statistic is the bias-corrected distance correlation; its null
    distribution is sampled by permuting ``u``.

    Args:
        u: Residual series
        x: Regressor series
        n_permutations: Number of permutations
        rng: Source of the permutations (a fresh default generator if None)

    Returns:
        p-value (1 + #{permuted >= observed}) / (n_permutations + 1)
    """
    u = np.ascontiguousarray(u, dtype=float)
    x = np.ascontiguousarray(x, dtype=float)
    if u.shape != x.shape or u.ndim != 1:
        raise ValueError(
            f"Independence test needs two 1-D series of equal length, got {u.shape} and {x.shape}"
        )
    if len(u) < 4:
        raise ValueError(f"Independence test needs at least 4 samples, got {len(u)}")
    if n_permutations < 1:
        raise ValueError(f"n_permutations must be positive, got {n_permutations}")

    rng = rng or np.random.default_rng()
    observed = distance_correlation(u, x)
    exceed = 0
    for _ in range(n_permutations):
        if distance_correlation(u[rng.permutation(len(u))], x) >= observed:
            exceed += 1
    return (1 + exceed) / (n_permutations + 1)
