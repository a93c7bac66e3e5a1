"""Counter-based random streams.

Every random matrix in the package is generated from a SplitMix64 counter
generator: the value at ``(row, col)`` of a stream is a pure function of
``(seed, tag, row, col)``. Each column is its own substream, so a matrix
can be generated in any column order, in chunks, or restricted to a subset
of rows, and the entries never change.

Layout of one draw::

    key(col)      = mix(mix(seed ^ tag) + (col + 1) * GAMMA)
    raw(row, col) = mix(key(col) + (row + 1) * GAMMA)
    uniform       = (raw >> 11) * 2**-53                    in [0, 1)

Gaussian entries use Box-Muller on the uniform pair at rows ``2m`` and
``2m + 1``: row ``2m`` receives the cosine branch and row ``2m + 1`` the
sine branch. ``mix`` is the SplitMix64 finaliser.
"""

from __future__ import annotations

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1
_TWO_M53 = 2.0**-53

# Stream tags keep different samplers with the same seed independent.
TAGS = {
    "normal": 1,
    "rademacher": 2,
    "sparse": 3,
    "binary": 4,
    "sign": 5,
    "bias": 6,
    "cauchy": 7,
    "uniform": 8,
}


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _u64(value) -> np.ndarray:
    if isinstance(value, (int, np.integer)):
        return np.asarray(int(value) & _MASK64, dtype=np.uint64)
    return np.asarray(value, dtype=np.uint64)


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministically derive a child seed from ``seed`` and integer keys."""
    with np.errstate(over="ignore"):
        z = _mix(_u64(seed) + GAMMA)
        for k in keys:
            z = _mix(z ^ (_u64(k) * GAMMA + GAMMA))
    return int(z)


def column_keys(seed: int, tag: str, cols) -> np.ndarray:
    cols = np.asarray(cols, dtype=np.uint64)
    with np.errstate(over="ignore"):
        base = _mix(_u64(seed) ^ _u64(TAGS[tag]))
        return _mix(base + (cols + np.uint64(1)) * GAMMA)


def raw_bits(seed: int, tag: str, rows, cols) -> np.ndarray:
    """uint64 draws on the grid ``rows x cols`` (outer product of indices)."""
    keys = column_keys(seed, tag, cols)[None, :]
    rows = np.asarray(rows, dtype=np.uint64)[:, None]
    with np.errstate(over="ignore"):
        return _mix(keys + (rows + np.uint64(1)) * GAMMA)


def uniforms(seed: int, tag: str, rows, cols) -> np.ndarray:
    """Uniform [0, 1) values on the grid ``rows x cols``."""
    bits = raw_bits(seed, tag, rows, cols)
    return (bits >> np.uint64(11)).astype(np.float64) * _TWO_M53


def uniform_block(seed: int, tag: str, n_rows: int, n_cols: int, col_start: int = 0) -> np.ndarray:
    return uniforms(seed, tag, np.arange(n_rows), np.arange(col_start, col_start + n_cols))


def normals(seed: int, tag: str, rows, cols) -> np.ndarray:
    """Standard normal values at arbitrary row indices (Box-Muller pairs)."""
    rows = np.asarray(rows, dtype=np.int64)
    pair = rows >> 1
    u1 = uniforms(seed, tag, 2 * pair, cols)
    u2 = uniforms(seed, tag, 2 * pair + 1, cols)
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    angle = 2.0 * np.pi * u2
    odd = (rows & 1).astype(bool)[:, None]
    return np.where(odd, radius * np.sin(angle), radius * np.cos(angle))


def normal_block(seed: int, tag: str, n_rows: int, n_cols: int, col_start: int = 0) -> np.ndarray:
    """Standard normals for rows ``0..n_rows-1``; same values as :func:`normals`."""
    n_pairs = (n_rows + 1) // 2
    cols = np.arange(col_start, col_start + n_cols)
    u1 = uniforms(seed, tag, 2 * np.arange(n_pairs), cols)
    u2 = uniforms(seed, tag, 2 * np.arange(n_pairs) + 1, cols)
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    angle = 2.0 * np.pi * u2
    out = np.empty((2 * n_pairs, n_cols))
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:n_rows]


def numpy_generator(seed: int, *keys: int) -> np.random.Generator:
    """Auxiliary generator for data synthesis and index sampling (PCG64)."""
    return np.random.default_rng(derive_seed(seed, *keys))
