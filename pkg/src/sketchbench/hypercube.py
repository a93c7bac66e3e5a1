"""Binary random projections onto hypercubes (``U^T x mod 2``) and the
epsilon-approximate nearest-neighbour index built on them.

Binary vectors are ``uint8`` arrays of 0/1 values; a data set is an
``n x d`` array (one point per row) because points are handled as bit
strings here rather than as real columns.
"""

from __future__ import annotations

import itertools
import math
import struct
import threading
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .errors import InvalidParameterError, MatrixFormatError, ShapeError
from .random_matrices import ProjectionMatrix, binary_entries, sample_hypercube_matrix

MAGIC = b"HCUB1"


def _bits(x, name: str = "bits") -> np.ndarray:
    a = np.asarray(x)
    if a.size and not np.all((a == 0) | (a == 1)):
        raise InvalidParameterError(f"{name} must contain only 0/1 values")
    return a.astype(np.uint8)


def project_binary(x, U: ProjectionMatrix | np.ndarray) -> np.ndarray:
    """``U^T x mod 2`` for one bit vector (length ``d``) or a batch (``n x d``)."""
    M = U.mat if isinstance(U, ProjectionMatrix) else np.asarray(U)
    x = _bits(x, "x")
    if x.shape[-1] != M.shape[0]:
        raise ShapeError(f"vector length {x.shape[-1]} does not match projection rows {M.shape[0]}")
    # float matmul is exact for counts far below 2**53
    counts = x.astype(np.float64) @ M.astype(np.float64)
    return (counts.astype(np.int64) & 1).astype(np.uint8)


def quantize(x, thresholds) -> np.ndarray:
    """Thermometer code: bit ``(i, t)`` is ``x_i > thresholds[t]``.

    The output has length ``d * len(thresholds)``, coordinate-major. Ties
    with a threshold give 0.
    """
    t = np.asarray(thresholds, dtype=np.float64)
    if t.ndim != 1 or t.size == 0:
        raise InvalidParameterError("need at least one threshold")
    if np.any(np.diff(t) < 0):
        raise InvalidParameterError("thresholds must be sorted")
    x = np.asarray(x, dtype=np.float64)
    return (x[..., :, None] > t).reshape(*x.shape[:-1], -1).astype(np.uint8)


def default_thresholds(data, count: int = 15) -> np.ndarray:
    """``count`` equally spaced interior quantiles of all training values."""
    levels = np.arange(1, count + 1) / (count + 1)
    return np.quantile(np.asarray(data, dtype=np.float64).ravel(), levels)


def code_dimension(n: int, epsilon: float) -> int:
    """``ceil(8 ln(n) / eps^2)``, at least 1."""
    return max(1, math.ceil(8.0 * math.log(max(n, 2)) / epsilon**2))


def level_schedule(d: int) -> list[int]:
    widths = []
    width = 1
    while width < d:
        widths.append(width)
        width *= 2
    widths.append(d)
    return widths


@dataclass
class Level:
    width: int
    bit_prob: float
    seeds: list[int]
    codes: np.ndarray  # K x n x ceil(p/8) packed bits
    _matrices: list | None = field(default=None, repr=False)

    def matrix(self, k: int, d: int, p: int) -> np.ndarray:
        if self._matrices is None:
            self._matrices = [None] * len(self.seeds)
        if self._matrices[k] is None:
            self._matrices[k] = binary_entries(d, p, self.bit_prob, self.seeds[k])
        return self._matrices[k]


@dataclass(frozen=True)
class QueryResult:
    found: bool
    index: int | None
    certified_radius: float | None
    distance: int | None = None


class HypercubeIndex:
    """Per radius level ``width`` in ``1, 2, 4, ..., d``: ``K`` independent
    Bernoulli(eps^2/width) projections and the packed codes of all points.

    A level certifies radius ``width / 4``: codes closer than
    ``(1 + eps) p bit_prob width / 4`` become candidates, and a candidate is only
    returned after checking ``H(q, x) <= (1 + eps) width / 4`` on the
    original bits.
    """

    def __init__(self, data: np.ndarray, epsilon: float, K: int, p: int, seed: int, levels: list[Level]):
        self.data = data
        self.epsilon = epsilon
        self.K = K
        self.p = p
        self.seed = seed
        self.levels = levels
        self._counter = itertools.count()
        self._lock = threading.Lock()

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    @property
    def stored_code_bits(self) -> int:
        return len(self.levels) * self.K * self.n * self.p

    def _next_query(self) -> int:
        with self._lock:
            return next(self._counter)

    def query(self, q, epsilon: float | None = None) -> QueryResult:
        eps = self.epsilon if epsilon is None else epsilon
        q = _bits(q, "query")
        if q.shape != (self.d,):
            raise ShapeError(f"query has shape {q.shape}, index holds {self.d}-bit points")
        pick = self._next_query() % self.K
        for level in self.levels:
            U = level.matrix(pick, self.d, self.p)
            qcode = np.packbits(project_binary(q, U))
            code_dist = np.bitwise_count(level.codes[pick] ^ qcode).sum(axis=1)
            threshold = (1.0 + eps) * self.p * level.bit_prob * level.width / 4.0
            candidates = np.flatnonzero(code_dist < threshold)
            if candidates.size == 0:
                continue
            radius = level.width / 4.0
            true_dist = np.count_nonzero(self.data[candidates] != q, axis=1)
            ok = true_dist <= (1.0 + eps) * radius
            if ok.any():
                # lowest true distance, then lowest index
                best = candidates[ok][np.argmin(true_dist[ok])]
                dist = int(np.count_nonzero(self.data[best] != q))
                assert dist <= (1.0 + eps) * radius
                return QueryResult(True, int(best), radius, dist)
        return QueryResult(False, None, None, None)

    # ---- persistence -------------------------------------------------
    def to_bytes(self) -> bytes:
        """Binary layout, all integers little-endian u64:

        ``b"HCUB1"``, d, n, bits of epsilon as f64, level count, K, p, seed;
        then per level: width, K seeds, K*n*ceil(p/8) packed code bytes;
        finally n*ceil(d/8) packed data bytes.
        """
        out = bytearray(MAGIC)
        eps_bits = struct.unpack("<Q", struct.pack("<d", self.epsilon))[0]
        out += struct.pack("<8Q", self.d, self.n, eps_bits, len(self.levels), self.K, self.p,
                           self.seed & (2**64 - 1), 0)
        for level in self.levels:
            out += struct.pack("<Q", level.width)
            out += struct.pack(f"<{self.K}Q", *level.seeds)
            out += np.ascontiguousarray(level.codes, dtype=np.uint8).tobytes()
        out += np.packbits(self.data, axis=1).tobytes()
        return bytes(out)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "HypercubeIndex":
        if blob[: len(MAGIC)] != MAGIC:
            raise MatrixFormatError("not a hypercube index file (bad magic)")
        off = len(MAGIC)
        try:
            d, n, eps_bits, n_levels, K, p, seed, _reserved = struct.unpack_from("<8Q", blob, off)
            off += 64
            epsilon = struct.unpack("<d", struct.pack("<Q", eps_bits))[0]
            code_bytes = (p + 7) // 8
            levels = []
            for _ in range(n_levels):
                (width,) = struct.unpack_from("<Q", blob, off)
                off += 8
                seeds = list(struct.unpack_from(f"<{K}Q", blob, off))
                off += 8 * K
                size = K * n * code_bytes
                codes = np.frombuffer(blob, np.uint8, size, off).reshape(K, n, code_bytes).copy()
                off += size
                levels.append(Level(width, epsilon**2 / width, seeds, codes))
            row_bytes = (d + 7) // 8
            packed = np.frombuffer(blob, np.uint8, n * row_bytes, off).reshape(n, row_bytes)
            off += n * row_bytes
        except (struct.error, ValueError) as exc:
            raise MatrixFormatError(f"truncated hypercube index: {exc}") from exc
        if off != len(blob):
            raise MatrixFormatError("trailing bytes after hypercube index")
        data = np.unpackbits(packed, axis=1, count=d)
        return cls(data, epsilon, K, p, seed, levels)


def build_index(dataset, epsilon: float, K: int, seed: int, p: int | None = None) -> HypercubeIndex:
    """Project ``dataset`` (``n x d`` bits) onto ``K`` random hypercubes per level."""
    data = _bits(dataset, "dataset")
    if data.ndim != 2 or data.shape[0] == 0:
        raise InvalidParameterError("dataset must be a non-empty n x d bit matrix")
    if not (0.0 < epsilon < 1.0):
        raise InvalidParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    if K < 1:
        raise InvalidParameterError(f"K must be positive, got {K}")
    n, d = data.shape
    p = code_dimension(n, epsilon) if p is None else p
    levels = []
    for li, width in enumerate(level_schedule(d)):
        bit_prob = epsilon**2 / width
        seeds = [_rng.derive_seed(seed, li, k) for k in range(K)]
        mats = [sample_hypercube_matrix(d, p, bit_prob, s).mat for s in seeds]
        codes = np.stack([np.packbits(project_binary(data, M), axis=1) for M in mats])
        levels.append(Level(width, bit_prob, seeds, codes, mats))
    return HypercubeIndex(data, epsilon, K, p, seed, levels)


def exhaustive_nearest(dataset, q) -> tuple[int, int]:
    """Brute-force nearest neighbour: ``(index, Hamming distance)``."""
    data = _bits(dataset)
    dist = np.count_nonzero(data != _bits(q), axis=1)
    i = int(np.argmin(dist))
    return i, int(dist[i])


# ---- three-regime verification ------------------------------------------


def regime_bounds(width: int, epsilon: float) -> tuple[float, float]:
    """Hamming-distance cut points ``width/4`` and ``width/(2 eps)``."""
    return width / 4.0, width / (2.0 * epsilon)


def regime_violated(h: int, code_dist: int, width: int, epsilon: float, p: int) -> tuple[int, bool]:
    """Regime (1, 2 or 3) of a pair at distance ``h`` and whether its code
    distance breaks that regime's implication."""
    bit_prob = epsilon**2 / width
    low, high = regime_bounds(width, epsilon)
    if h < low:
        return 1, not (code_dist < (1 + epsilon) * p * bit_prob * width / 4.0)
    if h <= high:
        ratio = code_dist / h
        return 2, not ((1 - epsilon) * p * bit_prob <= ratio < (1 + epsilon) * p * bit_prob)
    return 3, not (code_dist > (1 - epsilon) * p * bit_prob * width / (2.0 * epsilon))


def _regime_ranges(d: int, width: int, epsilon: float) -> list[tuple[int, int] | None]:
    low, high = regime_bounds(width, epsilon)
    r1 = (0, math.ceil(low) - 1)
    r2 = (math.ceil(low), min(d, math.floor(high)))
    r3 = (math.floor(high) + 1, d)
    return [r if r[0] <= r[1] else None for r in (r1, r2, r3)]


def regime_check(
    d: int, width: int, epsilon: float, trials: int, seed: int, p: int | None = None, n_ref: int = 1000
) -> dict:
    """Empirical violation rate of each of the three hypercube implications.

    Every trial draws a fresh Bernoulli(eps^2/width) matrix and one pair per
    applicable regime with a uniformly chosen Hamming distance in that
    regime. Only the rows of ``U`` on the pair's difference support affect
    the code distance, and those rows are generated directly from the
    counter-based stream.
    """
    if not (1 <= width <= d):
        raise InvalidParameterError(f"need 1 <= width <= d, got width={width}, d={d}")
    if not (0.0 < epsilon < 1.0):
        raise InvalidParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    p = code_dimension(n_ref, epsilon) if p is None else p
    bit_prob = epsilon**2 / width
    ranges = _regime_ranges(d, width, epsilon)
    rng = _rng.numpy_generator(seed, 31)
    violations = [0, 0, 0]
    samples = [0, 0, 0]
    for t in range(trials):
        mat_seed = _rng.derive_seed(seed, 32, t)
        for r, span in enumerate(ranges):
            if span is None:
                continue
            h = int(rng.integers(span[0], span[1] + 1))
            support = np.sort(rng.choice(d, size=h, replace=False))
            if h:
                rows = binary_entries(d, p, bit_prob, mat_seed, rows=support)
                code_dist = int(np.count_nonzero(rows.sum(axis=0) & 1))
            else:
                code_dist = 0
            regime, bad = regime_violated(h, code_dist, width, epsilon, p)
            assert regime == r + 1
            samples[r] += 1
            violations[r] += bad
    report = {"d": d, "width": width, "epsilon": epsilon, "p": p, "bit_prob": bit_prob, "trials": trials, "regimes": []}
    for r in range(3):
        if ranges[r] is None:
            report["regimes"].append({"regime": r + 1, "applicable": False})
            continue
        m = samples[r]
        rate = violations[r] / m
        se = math.sqrt(max(rate * (1 - rate), 1.0 / m) / m)
        # c such that exp(-c eps^4 p) matches the observed rate
        c_fit = -math.log(max(rate, 1.0 / m)) / (epsilon**4 * p)
        report["regimes"].append(
            {
                "regime": r + 1,
                "applicable": True,
                "distance_range": list(ranges[r]),
                "samples": m,
                "violations": violations[r],
                "rate": rate,
                "std_error": se,
                "fitted_c": c_fit,
            }
        )
    return report
