"""Random Fourier features for shift-invariant kernels.

Two kernels are supported with hard-coded spectral densities: the Gaussian
kernel (Gaussian frequencies) and the Laplacian kernel (Cauchy
frequencies). Feature vectors put the ``p`` cosines first and the ``p``
sines second, each scaled by ``1/sqrt(p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .errors import InvalidParameterError, ShapeError
from .linalg import as_matrix, as_vector

GAUSSIAN = "gaussian"
LAPLACIAN = "laplacian"


@dataclass(frozen=True)
class KernelSpec:
    """``gaussian``: exp(-|x-y|_2^2 / (2 sigma^2)); ``laplacian``: exp(-|x-y|_1 / sigma)."""

    kind: str
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, LAPLACIAN):
            raise InvalidParameterError(f"unknown kernel {self.kind!r}")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise InvalidParameterError(f"bandwidth must be positive, got {self.sigma}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "sigma": self.sigma}


@dataclass(frozen=True)
class FeatureMap:
    frequencies: np.ndarray = field(repr=False)  # d x p
    kernel: KernelSpec
    seed: int

    @property
    def d(self) -> int:
        return self.frequencies.shape[0]

    @property
    def p(self) -> int:
        return self.frequencies.shape[1]


def _frequencies(kernel: KernelSpec, d: int, p: int, seed: int, col_start: int = 0) -> np.ndarray:
    if kernel.kind == GAUSSIAN:
        return _rng.normal_block(seed, "normal", d, p, col_start) / kernel.sigma
    # standard Cauchy by inversion: tan(pi (u - 1/2))
    u = _rng.uniform_block(seed, "cauchy", d, p, col_start)
    return np.tan(math.pi * (u - 0.5)) / kernel.sigma


def sample_spectral(kernel: KernelSpec, d: int, p: int, seed: int) -> FeatureMap:
    if d < 1 or p < 1:
        raise InvalidParameterError(f"dimensions must be positive, got d={d}, p={p}")
    return FeatureMap(_frequencies(kernel, d, p, seed), kernel, seed)


def _apply(X: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """Features for columns of ``X`` (``d x n``) -> ``2p x n``."""
    proj = freqs.T @ X
    scale = 1.0 / math.sqrt(freqs.shape[1])
    return np.vstack([np.cos(proj), np.sin(proj)]) * scale


def feature_map(x, fm: FeatureMap) -> np.ndarray:
    """``z(x)`` of length ``2p`` for a vector, or ``2p x n`` for a ``d x n`` matrix."""
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 1:
        a = as_vector(a, "x")
        if a.size != fm.d:
            raise ShapeError(f"vector has length {a.size}, feature map expects {fm.d}")
        return _apply(a[:, None], fm.frequencies)[:, 0]
    a = as_matrix(a, "X")
    if a.shape[0] != fm.d:
        raise ShapeError(f"matrix has {a.shape[0]} rows, feature map expects {fm.d}")
    return _apply(a, fm.frequencies)


def approx_kernel(zx, zy) -> float:
    zx = as_vector(zx, "zx")
    zy = as_vector(zy, "zy")
    if zx.shape != zy.shape:
        raise ShapeError(f"feature vectors differ in length: {zx.size} vs {zy.size}")
    return float(np.dot(zx, zy))


def exact_kernel(kernel: KernelSpec, x, y) -> float:
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    if x.shape != y.shape:
        raise ShapeError(f"vectors differ in length: {x.size} vs {y.size}")
    diff = x - y
    if kernel.kind == GAUSSIAN:
        return math.exp(-float(np.dot(diff, diff)) / (2.0 * kernel.sigma**2))
    return math.exp(-float(np.abs(diff).sum()) / kernel.sigma)


def exact_kernel_matrix(kernel: KernelSpec, X) -> np.ndarray:
    X = as_matrix(X, "X")
    if kernel.kind == GAUSSIAN:
        sq = np.sum(X * X, axis=0)
        d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (X.T @ X), 0.0)
        K = np.exp(-d2 / (2.0 * kernel.sigma**2))
    else:
        d1 = np.abs(X.T[:, None, :] - X.T[None, :, :]).sum(axis=2)
        K = np.exp(-d1 / kernel.sigma)
    np.fill_diagonal(K, 1.0)
    return K


def approx_kernel_matrix(Z) -> np.ndarray:
    """Gram matrix of feature columns, symmetrized and with an exact unit diagonal."""
    Z = as_matrix(Z, "Z")
    K = Z.T @ Z
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, 1.0)
    return K


def hoeffding_bound(p: int, epsilon: float) -> float:
    """``2 exp(-p eps^2 / 2)``."""
    return 2.0 * math.exp(-p * epsilon**2 / 2.0)


def hoeffding_check(
    kernel: KernelSpec, d: int, p: int, epsilon: float, trials: int, seed: int, chunk: int = 256
) -> dict:
    """Exceedance frequency of ``|z(x)^T z(y) - k(x, y)| >= eps`` over fresh feature maps.

    The pair is fixed per seed with entries N(0, sigma^2 / d), which puts
    the kernel value at a moderate level. Trial ``t`` uses frequency
    columns ``[t p, (t+1) p)`` of one long stream.
    """
    if trials < 1000:
        raise InvalidParameterError(f"hoeffding_check needs at least 1000 trials, got {trials}")
    if epsilon <= 0:
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
    gen = _rng.numpy_generator(seed, 41)
    x = gen.normal(0.0, kernel.sigma / math.sqrt(d), size=d)
    y = gen.normal(0.0, kernel.sigma / math.sqrt(d), size=d)
    k_true = exact_kernel(kernel, x, y)
    diff = x - y
    map_seed = _rng.derive_seed(seed, 42)
    hits = 0
    for t0 in range(0, trials, chunk):
        count = min(chunk, trials - t0)
        freqs = _frequencies(kernel, d, count * p, map_seed, col_start=t0 * p)
        # z(x)^T z(y) = mean over frequencies of cos(u^T (x - y))
        est = np.cos(diff @ freqs).reshape(count, p).mean(axis=1)
        hits += int(np.count_nonzero(np.abs(est - k_true) >= epsilon))
    prob = hits / trials
    se = math.sqrt(max(prob * (1 - prob), 1.0 / trials) / trials)
    bound = hoeffding_bound(p, epsilon)
    return {
        "empirical_prob": prob,
        "bound": bound,
        "std_error": se,
        "kernel_value": k_true,
        "trials": trials,
        "p": p,
        "epsilon": epsilon,
        "holds": prob <= bound + 3 * se,
    }


def sup_error_estimate(kernel: KernelSpec, dataset, p: int, seed: int) -> float:
    """Largest ``|z(x)^T z(y) - k(x, y)|`` over all pairs of columns of ``dataset``."""
    X = as_matrix(dataset, "dataset")
    if X.shape[1] < 2:
        raise InvalidParameterError("need at least two points")
    fm = sample_spectral(kernel, X.shape[0], p, seed)
    Z = feature_map(X, fm)
    err = np.abs(approx_kernel_matrix(Z) - exact_kernel_matrix(kernel, X))
    return float(err.max())


def unbiasedness_check(kernel: KernelSpec, x, y, p: int, maps: int, seed: int) -> dict:
    """Average of ``z(x)^T z(y)`` over ``maps`` independent feature maps."""
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    d = x.size
    freqs = _frequencies(kernel, d, p * maps, seed)
    est = np.cos((x - y) @ freqs).reshape(maps, p).mean(axis=1)
    return {
        "mean_estimate": float(est.mean()),
        "exact": exact_kernel(kernel, x, y),
        "std_error": float(est.std(ddof=1) / math.sqrt(maps)),
    }


def claim_constants(sigma_diam: float, epsilon: float, d: int) -> dict:
    """Informational: the covering constant and dimension guide for the sup bound."""
    return {
        "covering_constant": 2.0**8 * (sigma_diam / epsilon) ** 2,
        "p_guide": d / epsilon**2 * math.log(max(sigma_diam / epsilon, 1.0 + 1e-12)),
    }
