"""Seeded generation of random projection matrices.

All samplers draw from the counter-based streams in :mod:`sketchbench._rng`,
one substream per column, so ``(d, p, dist, seed)`` fully determines the
entries regardless of the order in which columns are produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .errors import InvalidParameterError

GAUSSIAN_UNIT = "gaussian-unit"
GAUSSIAN = "gaussian"
RADEMACHER = "rademacher"
SPARSE = "sparse"
BINARY = "binary"

REAL_KINDS = (GAUSSIAN_UNIT, GAUSSIAN, RADEMACHER, SPARSE)


@dataclass(frozen=True)
class Distribution:
    """Entry distribution of a projection matrix.

    ``gaussian-unit`` is N(0, 1); ``gaussian`` is N(0, 1/p); ``rademacher``
    is +-1/sqrt(p); ``sparse`` is Achlioptas' sqrt(3/p) * {+1, 0, -1} with
    probabilities {1/6, 2/3, 1/6}; ``binary`` is Bernoulli(bit_prob) on {0, 1}.
    """

    kind: str
    bit_prob: float | None = None

    def __post_init__(self):
        if self.kind not in REAL_KINDS + (BINARY,):
            raise InvalidParameterError(f"unknown distribution {self.kind!r}")
        if self.kind == BINARY:
            if self.bit_prob is None or not (0.0 < self.bit_prob < 1.0):
                raise InvalidParameterError(f"Bernoulli probability must lie in (0, 1), got {self.bit_prob}")
        elif self.bit_prob is not None:
            raise InvalidParameterError(f"{self.kind} takes no probability parameter")

    @property
    def is_real(self) -> bool:
        return self.kind != BINARY

    @classmethod
    def parse(cls, name: str, bit_prob: float | None = None) -> "Distribution":
        return cls(name.strip().lower(), bit_prob if name.strip().lower() == BINARY else None)

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.bit_prob is not None:
            out["bit_prob"] = self.bit_prob
        return out


@dataclass(frozen=True)
class ProjectionMatrix:
    """A ``d x p`` random matrix together with what generated it."""

    mat: np.ndarray = field(repr=False)
    dist: Distribution
    seed: int

    @property
    def d(self) -> int:
        return self.mat.shape[0]

    @property
    def p(self) -> int:
        return self.mat.shape[1]


def _check_dims(d: int, p: int) -> None:
    if d < 1 or p < 1:
        raise InvalidParameterError(f"dimensions must be positive, got d={d}, p={p}")


def real_entries(d: int, p: int, kind: str, seed: int, col_start: int = 0, rows=None) -> np.ndarray:
    """Entries of a real-valued projection, optionally for a row subset.

    ``col_start`` offsets the column substreams, which lets Monte Carlo
    loops treat trial ``t`` as columns ``[t*p, (t+1)*p)`` of one long stream.
    Scaling factors always use ``p``, the width of a single matrix.
    """
    if kind in (GAUSSIAN_UNIT, GAUSSIAN):
        if rows is None:
            z = _rng.normal_block(seed, "normal", d, p, col_start)
        else:
            z = _rng.normals(seed, "normal", rows, np.arange(col_start, col_start + p))
        return z if kind == GAUSSIAN_UNIT else z / math.sqrt(p)
    row_idx = np.arange(d) if rows is None else rows
    cols = np.arange(col_start, col_start + p)
    if kind == RADEMACHER:
        u = _rng.uniforms(seed, "rademacher", row_idx, cols)
        return np.where(u < 0.5, -1.0, 1.0) / math.sqrt(p)
    if kind == SPARSE:
        u = _rng.uniforms(seed, "sparse", row_idx, cols)
        vals = np.where(u < 1.0 / 6.0, 1.0, np.where(u >= 5.0 / 6.0, -1.0, 0.0))
        return vals * math.sqrt(3.0 / p)
    raise InvalidParameterError(f"{kind!r} is not a real-valued distribution")


def sample_projection(d: int, p: int, dist: Distribution | str, seed: int) -> ProjectionMatrix:
    """Sample a real ``d x p`` projection matrix with i.i.d. entries."""
    if isinstance(dist, str):
        dist = Distribution.parse(dist)
    _check_dims(d, p)
    if not dist.is_real:
        raise InvalidParameterError("binary matrices come from sample_hypercube_matrix")
    return ProjectionMatrix(real_entries(d, p, dist.kind, seed), dist, seed)


def binary_entries(d: int, p: int, bit_prob: float, seed: int, rows=None) -> np.ndarray:
    row_idx = np.arange(d) if rows is None else rows
    u = _rng.uniforms(seed, "binary", row_idx, np.arange(p))
    return (u < bit_prob).astype(np.uint8)


def sample_hypercube_matrix(d: int, p: int, bit_prob: float, seed: int) -> ProjectionMatrix:
    """Sample a ``d x p`` 0/1 matrix with i.i.d. Bernoulli(``bit_prob``) entries."""
    dist = Distribution(BINARY, bit_prob)
    _check_dims(d, p)
    return ProjectionMatrix(binary_entries(d, p, bit_prob, seed), dist, seed)


@dataclass(frozen=True)
class SignVector:
    entries: np.ndarray = field(repr=False)
    seed: int


def sample_sign_diagonal(d: int, seed: int) -> SignVector:
    """Diagonal of a random sign-flip matrix, i.i.d. uniform on {-1, +1}."""
    if d < 1:
        raise InvalidParameterError(f"d must be positive, got {d}")
    u = _rng.uniforms(seed, "sign", np.arange(d), np.arange(1))[:, 0]
    return SignVector(np.where(u < 0.5, -1.0, 1.0), seed)
