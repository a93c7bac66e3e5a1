"""Linear random projection, subspace projection/reconstruction and the
Monte Carlo checks of the JL-type guarantees.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import _rng
from .errors import InvalidParameterError, ShapeError, SingularMatrixError
from .linalg import as_matrix, as_vector, interpolation_norm, svd
from .random_matrices import GAUSSIAN_UNIT, ProjectionMatrix, SignVector, real_entries


def _check_epsilon(epsilon: float) -> None:
    if not (0.0 < epsilon < 1.0):
        raise InvalidParameterError(f"epsilon must lie in (0, 1), got {epsilon}")


def _matrix_of(U) -> np.ndarray:
    return U.mat if isinstance(U, ProjectionMatrix) else np.asarray(U, dtype=np.float64)


def project(X, U, normalized: bool = False, sign_flip: SignVector | np.ndarray | None = None) -> np.ndarray:
    """Map the columns of ``X`` (``d x n``) to ``U^T x`` (``p x n``).

    ``sign_flip`` multiplies the input coordinates by +-1 first; ``normalized``
    scales the result by ``1/sqrt(p)``.
    """
    X = as_matrix(X, "X")
    M = _matrix_of(U).astype(np.float64, copy=False)
    if M.ndim != 2 or M.shape[0] != X.shape[0]:
        raise ShapeError(f"projection has shape {M.shape}, data has {X.shape[0]} rows")
    if sign_flip is not None:
        signs = sign_flip.entries if isinstance(sign_flip, SignVector) else np.asarray(sign_flip, float)
        if signs.shape != (X.shape[0],):
            raise ShapeError(f"sign vector has shape {signs.shape}, expected ({X.shape[0]},)")
        X = X * signs[:, None]
    out = M.T @ X
    if normalized:
        out /= math.sqrt(M.shape[1])
    return out


def hat_matrix(U) -> np.ndarray:
    """Orthogonal projector ``U (U^T U)^{-1} U^T`` onto the column space of ``U``."""
    U = as_matrix(U, "U")
    if U.shape[1] > U.shape[0]:
        raise SingularMatrixError("U has more columns than rows, so it is rank deficient")
    res = svd(U)
    if res.singular[-1] <= max(U.shape) * np.finfo(float).eps * res.singular[0]:
        raise SingularMatrixError("U does not have full column rank")
    gram = U.T @ U
    P = U @ np.linalg.solve(gram, U.T)
    return 0.5 * (P + P.T)


def reconstruct(Xproj, U) -> np.ndarray:
    """``U @ Xproj``: lift projected coordinates back to the input space."""
    Xproj = as_matrix(Xproj, "Xproj")
    U = as_matrix(U, "U")
    if U.shape[1] != Xproj.shape[0]:
        raise ShapeError(f"U has {U.shape[1]} columns, projected data has {Xproj.shape[0]} rows")
    return U @ Xproj


def jl_min_dimension(n: int, epsilon: float) -> int:
    """Smallest p with ``p >= 4 (eps^2/2 - eps^3/3)^{-1} ln n``."""
    _check_epsilon(epsilon)
    if n < 2:
        raise InvalidParameterError(f"need at least two points, got n={n}")
    return math.ceil(4.0 * math.log(n) / (epsilon**2 / 2.0 - epsilon**3 / 3.0))


def jl_failure_bound(p: int, epsilon: float) -> float:
    """Per-pair failure probability ``min(1, 2 exp(-(eps^2 - eps^3) p / 4))``."""
    _check_epsilon(epsilon)
    if p < 1:
        raise InvalidParameterError(f"p must be positive, got {p}")
    return min(1.0, 2.0 * math.exp(-(epsilon**2 - epsilon**3) * p / 4.0))


@dataclass(frozen=True)
class JlParams:
    n: int
    epsilon: float
    p_min: int
    delta: float

    @classmethod
    def for_data(cls, n: int, epsilon: float, p: int | None = None) -> "JlParams":
        p_min = jl_min_dimension(n, epsilon)
        return cls(n, epsilon, p_min, jl_failure_bound(p if p is not None else p_min, epsilon))

    @property
    def union_bound(self) -> float:
        """``n (n - 1) * delta``: the all-pairs failure bound before clamping."""
        return self.n * (self.n - 1) * self.delta


@dataclass(frozen=True)
class DistortionReport:
    epsilon: float
    pairs_total: int
    pairs_zero_distance: int
    pairs_below: int
    pairs_above: int
    max_distortion: float
    mean_distortion: float
    theoretical_pair_delta: float

    @property
    def pairs_measured(self) -> int:
        return self.pairs_total - self.pairs_zero_distance

    @property
    def violation_fraction(self) -> float:
        if self.pairs_measured == 0:
            return 0.0
        return (self.pairs_below + self.pairs_above) / self.pairs_measured

    def to_dict(self) -> dict:
        out = asdict(self)
        out["pairs_measured"] = self.pairs_measured
        out["violation_fraction"] = self.violation_fraction
        return out


def _pairwise_sq_dists(A: np.ndarray, i: int) -> np.ndarray:
    diff = A[:, i + 1 :] - A[:, i : i + 1]
    return np.einsum("ij,ij->j", diff, diff)


def distortion_report(X, Xproj, epsilon: float) -> DistortionReport:
    """Exact pairwise distortion statistics of a projection.

    ``Xproj`` must come from a norm-preserving-in-expectation map (the
    normalized map, or entries N(0, 1/p)). Pairs of identical inputs are
    counted separately and left out of the ratio statistics.
    """
    _check_epsilon(epsilon)
    X = as_matrix(X, "X")
    Y = as_matrix(Xproj, "Xproj")
    n = X.shape[1]
    if Y.shape[1] != n:
        raise ShapeError(f"X has {n} columns but Xproj has {Y.shape[1]}")
    if n < 2:
        raise InvalidParameterError("distortion needs at least two points")
    zero = below = above = 0
    max_dist = 0.0
    total = 0.0
    for i in range(n - 1):
        before = _pairwise_sq_dists(X, i)
        after = _pairwise_sq_dists(Y, i)
        nz = before > 0
        zero += int(np.count_nonzero(~nz))
        ratio = after[nz] / before[nz]
        below += int(np.count_nonzero(ratio < 1.0 - epsilon))
        above += int(np.count_nonzero(ratio > 1.0 + epsilon))
        if ratio.size:
            dist = np.abs(ratio - 1.0)
            max_dist = max(max_dist, float(dist.max()))
            total += float(dist.sum())
    pairs = n * (n - 1) // 2
    measured = pairs - zero
    return DistortionReport(
        epsilon=epsilon,
        pairs_total=pairs,
        pairs_zero_distance=zero,
        pairs_below=below,
        pairs_above=above,
        max_distortion=max_dist,
        mean_distortion=total / measured if measured else 0.0,
        theoretical_pair_delta=jl_failure_bound(Y.shape[0], epsilon),
    )


def _gaussian_trials(d: int, p: int, seed: int, t0: int, count: int) -> np.ndarray:
    """``count`` independent ``d x p`` N(0, 1/p) matrices, shape ``(count, d, p)``."""
    block = real_entries(d, p * count, GAUSSIAN_UNIT, seed, col_start=t0 * p) / math.sqrt(p)
    return block.reshape(d, count, p).transpose(1, 0, 2)


def expectation_preservation_check(x_diff, p: int, trials: int, seed: int, chunk: int = 2048) -> dict:
    """Mean of ``||U^T x||^2 / ||x||^2`` over fresh N(0, 1/p) matrices ``U``."""
    x = as_vector(x_diff, "x_diff")
    if trials < 100:
        raise InvalidParameterError(f"need at least 100 trials, got {trials}")
    norm_sq = float(np.dot(x, x))
    if norm_sq == 0.0:
        raise InvalidParameterError("the difference vector must be non-zero")
    ratios = np.empty(trials)
    for t0 in range(0, trials, chunk):
        count = min(chunk, trials - t0)
        U = _gaussian_trials(x.size, p, seed, t0, count)
        proj = np.einsum("tdp,d->tp", U, x)
        ratios[t0 : t0 + count] = np.einsum("tp,tp->t", proj, proj) / norm_sq
    return {
        "mean_ratio": float(ratios.mean()),
        "std_error": float(ratios.std(ddof=1) / math.sqrt(trials)),
        "trials": trials,
        "p": p,
    }


def chi_square_tail_bound(p: int, ratio: float) -> float:
    """``exp((p/2)(1 - ratio + ln ratio))``."""
    if ratio <= 0:
        raise InvalidParameterError(f"ratio must be positive, got {ratio}")
    return math.exp(0.5 * p * (1.0 - ratio + math.log(ratio)))


def _gram_schmidt(A: np.ndarray) -> np.ndarray:
    Q = np.array(A, dtype=np.float64)
    for k in range(Q.shape[1]):
        for _ in range(2):
            Q[:, k] -= Q[:, :k] @ (Q[:, :k].T @ Q[:, k])
        Q[:, k] /= np.linalg.norm(Q[:, k])
    return Q


def chi_square_tail_check(
    p: int, d: int, ratio: float, trials: int, seed: int, vectors_per_subspace: int = 1000
) -> dict:
    """Empirical tail of ``L``, the squared length of a random unit vector
    projected onto a random ``p``-dimensional subspace of R^d.

    ``ratio < 1`` estimates ``P(L <= ratio p / d)``, ``ratio > 1`` estimates
    ``P(L >= ratio p / d)``. Subspaces are Gram-Schmidt orthonormalised
    Gaussian ``d x p`` matrices, each shared by ``vectors_per_subspace``
    independent unit vectors (the law of ``L`` does not depend on the
    subspace, so draws stay i.i.d.).
    """
    if ratio == 1.0:
        raise InvalidParameterError("ratio = 1 gives the trivial bound 1")
    if not (1 <= p < d):
        raise InvalidParameterError(f"need 1 <= p < d, got p={p}, d={d}")
    bound = chi_square_tail_bound(p, ratio)
    threshold = ratio * p / d
    hits = 0
    done = 0
    block = 0
    while done < trials:
        count = min(vectors_per_subspace, trials - done)
        Q = _gram_schmidt(_rng.normal_block(_rng.derive_seed(seed, 0, block), "normal", d, p))
        V = _rng.normal_block(_rng.derive_seed(seed, 1, block), "normal", d, count)
        V /= np.linalg.norm(V, axis=0)
        L = np.sum((Q.T @ V) ** 2, axis=0)
        hits += int(np.count_nonzero(L <= threshold if ratio < 1 else L >= threshold))
        done += count
        block += 1
    prob = hits / trials
    se = math.sqrt(max(prob * (1.0 - prob), 1.0 / trials) / trials)
    return {
        "empirical_prob": prob,
        "bound": bound,
        "std_error": se,
        "trials": trials,
        "holds": prob <= bound + 3.0 * se,
    }


def sample_sparse_unit_vectors(d: int, k: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` unit vectors (columns) with ``k`` non-zeros on uniform supports."""
    X = np.zeros((d, count))
    for c in range(count):
        support = rng.choice(d, size=k, replace=False)
        vals = rng.standard_normal(k)
        while not np.any(vals):
            vals = rng.standard_normal(k)
        X[support, c] = vals / np.linalg.norm(vals)
    return X


def rip_check(U, k: int, epsilon: float, trials: int, seed: int) -> dict:
    """Fraction of random ``k``-sparse unit vectors for which ``||U^T x||^2``
    leaves ``[1 - eps, 1 + eps]``. ``U`` should have entries N(0, 1/p)."""
    M = _matrix_of(U)
    d = M.shape[0]
    if not (1 <= k <= d):
        raise InvalidParameterError(f"sparsity k must lie in [1, {d}], got {k}")
    _check_epsilon(epsilon)
    X = sample_sparse_unit_vectors(d, k, trials, _rng.numpy_generator(seed, 17))
    sq = np.sum((M.T @ X) ** 2, axis=0)
    bad = np.count_nonzero((sq < 1.0 - epsilon) | (sq > 1.0 + epsilon))
    return {
        "violating_fraction": bad / trials,
        "trials": trials,
        "k": k,
        "p": M.shape[1],
        "min_ratio": float(sq.min()),
        "max_ratio": float(sq.max()),
    }


def rip_dimension(d: int, k: int, epsilon: float) -> int:
    """``ceil(eps^-2 k ln(d/k))``, at least 1."""
    return max(1, math.ceil(k * math.log(d / k) / epsilon**2))


INTERPOLATION_LOWER = 0.63
INTERPOLATION_UPPER = 1.63


def interpolation_embedding_check(v, block: int, epsilon: float, p: int, trials: int, seed: int) -> dict:
    """Counts how often ``||U^T v||_1`` falls outside
    ``[(0.63 - eps) ||v||_{1,2,block}, (1.63 + eps) ||v||_{1,2,block}]``.

    ``U`` has Gaussian entries scaled by ``1/p``. The constants are treated
    as targets: the report flags violations rather than raising.
    """
    x = as_vector(v, "v")
    norm = interpolation_norm(x, block)
    if norm == 0.0:
        raise InvalidParameterError("v must be non-zero")
    lo = (INTERPOLATION_LOWER - epsilon) * norm
    hi = (INTERPOLATION_UPPER + epsilon) * norm
    lo_bad = hi_bad = 0
    ratios = np.empty(trials)
    for t in range(trials):
        U = real_entries(x.size, p, GAUSSIAN_UNIT, seed, col_start=t * p) / p
        l1 = float(np.abs(U.T @ x).sum())
        ratios[t] = l1 / norm
        lo_bad += l1 < lo
        hi_bad += l1 > hi
    return {
        "lo_violations": int(lo_bad),
        "hi_violations": int(hi_bad),
        "trials": trials,
        "interpolation_norm": norm,
        "mean_ratio": float(ratios.mean()),
        "flagged": bool(lo_bad or hi_bad),
    }


def norm_concentration_experiment(
    n: int, d_list, r: float, seed: int, repeats: int = 50
) -> list[tuple[int, float]]:
    """Mean spread ``max - min`` of l_r distances from the origin for ``n``
    uniform points in ``[0, 1]^d``, for each ``d`` in ``d_list``."""
    d_list = [int(d) for d in d_list]
    if any(b <= a for a, b in zip(d_list, d_list[1:])):
        raise InvalidParameterError("d_list must be strictly increasing")
    rng = _rng.numpy_generator(seed, 23)
    series = []
    for d in d_list:
        gaps = np.empty(repeats)
        for rep in range(repeats):
            P = rng.random((n, d))
            dist = np.max(P, axis=1) if r == math.inf else np.sum(P**r, axis=1) ** (1.0 / r)
            gaps[rep] = dist.max() - dist.min()
        series.append((d, float(gaps.mean())))
    return series

