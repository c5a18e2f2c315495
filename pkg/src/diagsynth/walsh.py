"""Unnormalised fast Walsh-Hadamard transform (natural / Hadamard order)."""

from __future__ import annotations

import numpy as np


def fwht(values) -> np.ndarray:
    """Return ``H @ v`` along the last axis, ``H[x, k] = (-1)^popcount(x & k)``.

    Works on batches (leading axes are carried along). O(N log N) butterflies,
    one vectorised pass per bit.
    """
    a = np.array(values, dtype=np.float64, copy=True)
    size = a.shape[-1]
    if size & (size - 1) or size == 0:
        raise ValueError(f"length must be a power of two, got {size}")
    lead = a.shape[:-1]
    h = 1
    while h < size:
        v = a.reshape(lead + (size // (2 * h), 2, h))
        lo = v[..., 0, :].copy()
        hi = v[..., 1, :]
        v[..., 0, :] += hi
        v[..., 1, :] = lo - hi
        h *= 2
    return a


def walsh_matrix(n: int) -> np.ndarray:
    """Dense ``2^n x 2^n`` Sylvester-Hadamard matrix (reference only)."""
    idx = np.arange(1 << n)
    parity = np.bitwise_count(idx[:, None] & idx[None, :]) & 1
    return 1 - 2 * parity.astype(np.int64)
