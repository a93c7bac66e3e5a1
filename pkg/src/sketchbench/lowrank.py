"""Randomized rank-p approximation: sketch with a Gaussian matrix, take the
SVD of the small sketch, project the data onto its top right singular
vectors."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, ShapeError
from .linalg import as_matrix, frobenius_norm, svd
from .random_matrices import GAUSSIAN_UNIT, real_entries

DEFAULT_C = 8.0


@dataclass(frozen=True)
class LowRankResult:
    approx: np.ndarray
    basis: np.ndarray
    sketch: np.ndarray
    sketch_singular: np.ndarray
    p: int
    seed: int


def sketch(X, p: int, seed: int) -> np.ndarray:
    """``Y = U^T X / sqrt(p)`` with ``U`` a ``d x p`` standard normal matrix."""
    X = as_matrix(X, "X")
    if p < 1:
        raise InvalidParameterError(f"p must be positive, got {p}")
    U = real_entries(X.shape[0], p, GAUSSIAN_UNIT, seed)
    return (U.T @ X) / math.sqrt(p)


def sketch_dimension(n: int, epsilon: float, c: float = DEFAULT_C) -> int:
    """``ceil(c ln(n) / eps^2)``."""
    if not (0.0 < epsilon <= 1.0):
        raise InvalidParameterError(f"epsilon must lie in (0, 1], got {epsilon}")
    return math.ceil(c * math.log(n) / epsilon**2)


def implied_epsilon(n: int, p: int, c: float = DEFAULT_C) -> float:
    """The eps for which ``p = c ln(n) / eps^2``."""
    return math.sqrt(c * math.log(n) / p)


def lowrank_approximate(X, p: int, seed: int) -> LowRankResult:
    X = as_matrix(X, "X")
    n = X.shape[1]
    if not (1 <= p <= n):
        raise InvalidParameterError(f"rank p must lie in [1, n={n}], got {p}")
    Y = sketch(X, p, seed)
    res = svd(Y)
    # Y is p x n with p <= n, so the thin SVD has exactly p right vectors.
    B = res.right[:, :p]
    return LowRankResult(
        approx=(X @ B) @ B.T,
        basis=B,
        sketch=Y,
        sketch_singular=res.singular[:p],
        p=p,
        seed=seed,
    )


def best_rank_p(X, p: int) -> np.ndarray:
    """Truncated SVD of ``X`` (the Eckart-Young optimum)."""
    X = as_matrix(X, "X")
    if not (1 <= p <= min(X.shape)):
        raise InvalidParameterError(f"rank p must lie in [1, {min(X.shape)}], got {p}")
    res = svd(X)
    return (res.left[:, :p] * res.singular[:p]) @ res.right[:, :p].T


def lowrank_error_report(
    X, result: LowRankResult, epsilon: float, c: float = DEFAULT_C, singular: np.ndarray | None = None
) -> dict:
    """Checks ``||X - X~||_F^2 <= ||X - X_p||_F^2 + 2 eps ||X_p||_F^2`` and the
    sketch-energy inequality ``sum lambda_i^2 >= (1 - eps) ||X_p||_F^2``.

    ``singular`` may pass the singular values of ``X`` when they are
    already known (repeated trials on one matrix)."""
    X = as_matrix(X, "X")
    if result.approx.shape != X.shape:
        raise ShapeError("result does not belong to this matrix")
    p = result.p
    sigma = svd(X).singular if singular is None else np.asarray(singular, dtype=np.float64)
    top = float(np.sum(sigma[:p] ** 2))
    total = frobenius_norm(X) ** 2
    baseline = max(total - top, 0.0)
    lhs = frobenius_norm(X - result.approx) ** 2
    bound = baseline + 2.0 * epsilon * top
    sketch_energy = float(np.sum(result.sketch_singular**2))
    # relative slack absorbs rounding in exactly representable cases
    tol = 1e-10 * max(total, 1.0)
    return {
        "lhs": lhs,
        "baseline": baseline,
        "bound": bound,
        "holds": lhs <= bound + tol,
        "best_energy": top,
        "sketch_energy": sketch_energy,
        "energy_holds": sketch_energy >= (1.0 - epsilon) * top - tol,
        "epsilon": epsilon,
        "implied_epsilon": implied_epsilon(X.shape[1], p, c) if X.shape[1] > 1 else None,
        "p": p,
    }


def timing_comparison(X, p: int, seed: int) -> dict:
    """Wall time of the randomized path versus a full SVD of ``X``."""
    X = as_matrix(X, "X")
    t0 = time.perf_counter()
    lowrank_approximate(X, p, seed)
    t1 = time.perf_counter()
    best_rank_p(X, p)
    t2 = time.perf_counter()
    return {"randomized_seconds": t1 - t0, "full_svd_seconds": t2 - t1}
