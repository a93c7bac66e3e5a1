"""Random ReLU layers and empirical checks of how they act on distances and
angles of points on (or near) the unit sphere.

Layer weights are Gaussian with entries N(0, weight_scale / p); the
default ``weight_scale=1`` is the standard N(0, 1/p) projection.

Two centre values are available for squared output distances:

* ``plus``:  ``|x - y|^2 / 2 + |x| |y| angle_offset(theta)``
* ``minus``: ``|x - y|^2 / 2 - |x| |y| angle_offset(theta)``, the exact
  expectation of ``|relu(U^T x) - relu(U^T y)|^2`` under N(0, 1/p) weights.

The distance checks evaluate the ``plus`` form by default and always
report the pass fraction around the ``minus`` form next to it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .errors import InvalidParameterError, ShapeError
from .linalg import as_matrix, as_vector
from .random_matrices import GAUSSIAN_UNIT, ProjectionMatrix, real_entries

PLUS = "plus"
MINUS = "minus"
SPHERE_TOL = 1e-9


def angle_offset(theta) -> np.ndarray | float:
    """``(sin t - t cos t) / pi`` on ``[0, pi]``; increases from 0 to 1."""
    t = np.asarray(theta, dtype=np.float64)
    if np.any(~np.isfinite(t)) or np.any(t < 0) or np.any(t > math.pi):
        raise InvalidParameterError("angle must lie in [0, pi]")
    out = (np.sin(t) - t * np.cos(t)) / math.pi
    return float(out) if out.ndim == 0 else out


def _angles(X: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(X, axis=0)
    # a zero column gets angle pi/2; its offset term is scaled by zero anyway
    safe = np.where(norms > 0, norms, 1.0)
    C = (X.T @ X) / np.outer(safe, safe)
    return np.arccos(np.clip(C, -1.0, 1.0))


def relu_layer(x, U: ProjectionMatrix | np.ndarray) -> np.ndarray:
    """``max(0, U^T x)`` for a vector or for the columns of a matrix."""
    M = U.mat if isinstance(U, ProjectionMatrix) else np.asarray(U, dtype=np.float64)
    a = np.asarray(x, dtype=np.float64)
    if a.shape[0] != M.shape[0]:
        raise ShapeError(f"input has dimension {a.shape[0]}, layer expects {M.shape[0]}")
    return np.maximum(M.T @ a, 0.0)


def layer_weights(d: int, p: int, seed: int, weight_scale: float = 1.0, col_start: int = 0) -> np.ndarray:
    return real_entries(d, p, GAUSSIAN_UNIT, seed, col_start=col_start) * math.sqrt(weight_scale / p)


@dataclass
class LayerStack:
    """Ordered list of ReLU layers; layer ``i`` maps ``dims[i]`` to ``dims[i+1]``."""

    weights: list[np.ndarray] = field(default_factory=list, repr=False)
    seed: int = 0

    def __post_init__(self):
        for a, b in zip(self.weights, self.weights[1:]):
            if a.shape[1] != b.shape[0]:
                raise ShapeError(f"layer widths do not chain: {a.shape} then {b.shape}")

    @classmethod
    def random(cls, dims: list[int], seed: int, weight_scale: float = 1.0) -> "LayerStack":
        weights = [
            layer_weights(a, b, _rng.derive_seed(seed, 61, i), weight_scale)
            for i, (a, b) in enumerate(zip(dims, dims[1:]))
        ]
        return cls(weights, seed)

    @property
    def depth(self) -> int:
        return len(self.weights)


def stack_forward(x, stack: LayerStack) -> np.ndarray:
    out = np.asarray(x, dtype=np.float64)
    for W in stack.weights:
        out = relu_layer(out, W)
    return out


def center_value(X: np.ndarray, form: str = PLUS) -> np.ndarray:
    """Predicted squared output distance for every pair of columns."""
    norms = np.linalg.norm(X, axis=0)
    sq = norms**2
    D = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (X.T @ X), 0.0)
    theta = _angles(X) if X.shape[1] else np.zeros((0, 0))
    offset = np.outer(norms, norms) * angle_offset(theta)
    if form == PLUS:
        C = 0.5 * D + offset
    elif form == MINUS:
        C = 0.5 * D - offset
    else:
        raise InvalidParameterError(f"unknown centre form {form!r}")
    np.fill_diagonal(C, 0.0)
    return C


def _sq_dists(G: np.ndarray) -> np.ndarray:
    sq = np.sum(G * G, axis=0)
    D = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (G.T @ G), 0.0)
    np.fill_diagonal(D, 0.0)
    return D


def _unit_columns(X) -> np.ndarray:
    X = as_matrix(X, "X")
    norms = np.linalg.norm(X, axis=0)
    if np.any(np.abs(norms - 1.0) > SPHERE_TOL):
        raise InvalidParameterError("columns must have unit norm; normalise the data first")
    return X


def sphere_points(n: int, d: int, seed: int) -> np.ndarray:
    """``n`` uniform points on the unit sphere in R^d, as columns."""
    X = _rng.numpy_generator(seed, 62).normal(size=(d, n))
    return X / np.linalg.norm(X, axis=0)


@dataclass(frozen=True)
class AngleReport:
    i: int
    j: int
    theta_in: float
    theta_out: float | None
    offset_value: float
    lhs_distance: float
    delta_used: float


def _pairs(n: int):
    return np.triu_indices(n, k=1)


def distance_preservation_check(
    X, p: int, delta: float, trials: int, seed: int, weight_scale: float = 1.0, form: str = PLUS
) -> dict:
    """Fraction of (pair, trial) events with
    ``| |g(x) - g(y)|^2 - centre(x, y) | <= delta``, where ``g`` is a fresh
    random ReLU layer per trial."""
    X = _unit_columns(X)
    if delta <= 0 or p < 1 or trials < 1:
        raise InvalidParameterError("need delta > 0, p >= 1, trials >= 1")
    d, n = X.shape
    iu = _pairs(n)
    center = center_value(X, form)[iu]
    minus_center = center_value(X, MINUS)[iu]
    theta = _angles(X)[iu]
    passed = passed_minus = 0
    observed = np.empty((trials, iu[0].size))
    reports = []
    for t in range(trials):
        G = relu_layer(X, layer_weights(d, p, seed, weight_scale, col_start=t * p))
        obs = _sq_dists(G)[iu]
        observed[t] = obs
        passed += int(np.count_nonzero(np.abs(obs - center) <= delta))
        passed_minus += int(np.count_nonzero(np.abs(obs - minus_center) <= delta))
        if t == 0:
            reports = [
                AngleReport(int(a), int(b), float(th), None, float(angle_offset(th)), float(abs(o - c)), delta)
                for a, b, th, o, c in zip(iu[0], iu[1], theta, obs, center)
            ]
    events = max(trials * iu[0].size, 1)
    return {
        "pass_fraction": passed / events,
        "minus_center_pass_fraction": passed_minus / events,
        "events": trials * iu[0].size,
        "form": form,
        "mean_offset_from_center": float((observed - center).mean()) if observed.size else 0.0,
        "reports": reports,
    }


def sandwich_check(X, p: int, delta: float, trials: int, seed: int, weight_scale: float = 1.0) -> dict:
    """Fraction of (pair, trial) events with
    ``|x - y|^2 / 2 - delta <= |g(x) - g(y)|^2 <= |x - y|^2 + delta``."""
    X = _unit_columns(X)
    if delta <= 0 or p < 1 or trials < 1:
        raise InvalidParameterError("need delta > 0, p >= 1, trials >= 1")
    d, n = X.shape
    iu = _pairs(n)
    D = _sq_dists(X)[iu]
    passed = low_fail = high_fail = 0
    for t in range(trials):
        G = relu_layer(X, layer_weights(d, p, seed, weight_scale, col_start=t * p))
        obs = _sq_dists(G)[iu]
        lo = obs < 0.5 * D - delta
        hi = obs > D + delta
        low_fail += int(np.count_nonzero(lo))
        high_fail += int(np.count_nonzero(hi))
        passed += int(np.count_nonzero(~lo & ~hi))
    events = max(trials * iu[0].size, 1)
    return {
        "pass_fraction": passed / events,
        "lower_failures": low_fail,
        "upper_failures": high_fail,
        "events": trials * iu[0].size,
    }


def angle_slack(delta: float, min_norm: float) -> float:
    """``15 delta / (min_norm^2 - 2 delta)``."""
    return 15.0 * delta / (min_norm**2 - 2.0 * delta)


def angle_preservation_check(
    X, p: int, delta: float, min_norm: float, trials: int, seed: int, weight_scale: float = 1.0
) -> dict:
    """Fraction of pairs with ``|cos(out angle) - (cos(in angle) + offset)|``
    within :func:`angle_slack`. Pairs where a ReLU output vanishes have no
    angle; they are skipped and counted. The target is not clamped to
    ``[-1, 1]``."""
    X = as_matrix(X, "X")
    if not (0 < min_norm <= 1):
        raise InvalidParameterError(f"min_norm must lie in (0, 1], got {min_norm}")
    if min_norm**2 <= 2.0 * delta:
        raise InvalidParameterError("the slack degenerates unless min_norm^2 > 2 delta")
    norms = np.linalg.norm(X, axis=0)
    if np.any(norms < min_norm - SPHERE_TOL) or np.any(norms > 1.0 + SPHERE_TOL):
        raise InvalidParameterError(f"column norms must lie in [{min_norm}, 1]")
    d, n = X.shape
    iu = _pairs(n)
    theta = _angles(X)[iu]
    target = np.cos(theta) + angle_offset(theta)
    slack = angle_slack(delta, min_norm)
    passed = skipped = 0
    worst = 0.0
    for t in range(trials):
        G = relu_layer(X, layer_weights(d, p, seed, weight_scale, col_start=t * p))
        gn = np.linalg.norm(G, axis=0)
        ok = (gn[iu[0]] > 0) & (gn[iu[1]] > 0)
        skipped += int(np.count_nonzero(~ok))
        safe = np.where(gn > 0, gn, 1.0)
        cos_out = np.clip(((G.T @ G) / np.outer(safe, safe))[iu], -1.0, 1.0)
        gap = np.abs(cos_out - target)[ok]
        passed += int(np.count_nonzero(gap <= slack))
        if gap.size:
            worst = max(worst, float(gap.max()))
    events = trials * iu[0].size
    measured = events - skipped
    return {
        "pass_fraction": passed / measured if measured else 1.0,
        "skipped_pairs": skipped,
        "events": events,
        "slack": slack,
        "max_discrepancy": worst,
        "target_exceeds_one": int(np.count_nonzero(target > 1.0)),
    }


def variance_ratio(x, y, p: int, trials: int, seed: int, factor: int = 4, weight_scale: float = 1.0) -> dict:
    """Variance of ``|g(x) - g(y)|^2`` at width ``p`` over width ``factor * p``."""
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    X = np.column_stack([x, y])
    out = {}
    for width, tag in ((p, 0), (factor * p, 1)):
        vals = np.empty(trials)
        for t in range(trials):
            W = layer_weights(x.size, width, _rng.derive_seed(seed, 63, tag), weight_scale, col_start=t * width)
            G = relu_layer(X, W)
            diff = G[:, 0] - G[:, 1]
            vals[t] = diff @ diff
        out[width] = float(vals.var(ddof=1))
    return {"p": p, "factor": factor, "variance_small": out[p], "variance_large": out[factor * p],
            "ratio": out[p] / out[factor * p]}


def stack_distance_check(
    X, depth: int, p: int, delta: float, seed: int, form: str = PLUS, weight_scale: float = 1.0
) -> dict:
    """Run ``depth`` random layers of width ``p``; at each layer compare the
    observed squared distances with the centre value computed from that
    layer's own inputs. A pair passes when the accumulated absolute
    deviation stays within ``depth * delta``."""
    X = _unit_columns(X)
    n = X.shape[1]
    iu = _pairs(n)
    stack = LayerStack.random([X.shape[0]] + [p] * depth, seed, weight_scale)
    total = np.zeros(iu[0].size)
    cur = X
    for W in stack.weights:
        predicted = center_value(cur, form)[iu]
        cur = relu_layer(cur, W)
        total += np.abs(_sq_dists(cur)[iu] - predicted)
    return {
        "pass_fraction": float(np.mean(total <= depth * delta)) if total.size else 1.0,
        "depth": depth,
        "form": form,
        "max_accumulated_deviation": float(total.max()) if total.size else 0.0,
    }


def lipschitz_check(X, p: int, seed: int) -> dict:
    """ReLU is 1-Lipschitz entrywise, so ``|g(x) - g(y)| <= |U^T x - U^T y|``.
    Also reports the smallest observed ratio ``|g(x) - g(y)| / |x - y|``."""
    X = as_matrix(X, "X")
    W = layer_weights(X.shape[0], p, seed)
    P = W.T @ X
    G = np.maximum(P, 0.0)
    iu = _pairs(X.shape[1])
    out_d = np.sqrt(_sq_dists(G)[iu])
    lin_d = np.sqrt(_sq_dists(P)[iu])
    in_d = np.sqrt(_sq_dists(X)[iu])
    nz = in_d > 0
    return {
        "violations": int(np.count_nonzero(out_d > lin_d * (1 + 1e-12) + 1e-12)),
        "min_lower_ratio": float((out_d[nz] / in_d[nz]).min()) if nz.any() else None,
    }
