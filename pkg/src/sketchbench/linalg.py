"""Dense matrix helpers, norms, a one-sided Jacobi SVD and Hamming distance.

Matrices are plain ``numpy`` float64 arrays. Data sets follow the column
convention used throughout the package: a ``d x n`` array holds ``n``
samples of dimension ``d``, one per column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, ShapeError

INF = math.inf


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Validate and return ``M`` as a finite 2-D float64 array."""
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidParameterError(f"{name} contains non-finite entries")
    return A


def as_vector(v, name: str = "vector") -> np.ndarray:
    x = np.asarray(v, dtype=np.float64)
    if x.ndim != 1 or x.size < 1:
        raise ShapeError(f"{name} must be a non-empty 1-D array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidParameterError(f"{name} contains non-finite entries")
    return x


def lp_norm(v, r: float = 2.0) -> float:
    """``(sum |v_i|^r)^(1/r)``; pass ``math.inf`` for the max norm."""
    x = np.abs(as_vector(v))
    if r == INF:
        return float(x.max())
    if not r >= 1:
        raise InvalidParameterError(f"lp_norm needs r >= 1, got {r}")
    if r == 1:
        return float(x.sum())
    if r == 2:
        return float(math.sqrt(np.dot(x, x)))
    scale = x.max()
    if scale == 0:
        return 0.0
    return float(scale * np.sum((x / scale) ** r) ** (1.0 / r))


def interpolation_norm(v, block: int) -> float:
    """Block norm that runs from the l2 norm (``block=1``) to the l1 norm (``block=dim``).

    Magnitudes are sorted in decreasing order and cut into consecutive
    blocks of ``block`` entries (the last one may be shorter); the result is the
    l2 norm of the vector of block l1 norms.
    """
    x = as_vector(v)
    if not (isinstance(block, (int, np.integer)) and 1 <= block <= x.size):
        raise InvalidParameterError(f"block size must be an integer in [1, {x.size}], got {block}")
    mags = np.sort(np.abs(x))[::-1]
    n_blocks = -(-x.size // block)
    padded = np.zeros(n_blocks * block)
    padded[: x.size] = mags
    block_sums = padded.reshape(n_blocks, block).sum(axis=1)
    return float(math.sqrt(np.dot(block_sums, block_sums)))


def frobenius_norm(M) -> float:
    A = np.asarray(M, dtype=np.float64)
    return float(math.sqrt(np.sum(A * A)))


def hamming_distance(a, b) -> int:
    """Number of positions where two 0/1 vectors differ."""
    x = np.asarray(a)
    y = np.asarray(b)
    if x.shape != y.shape:
        raise ShapeError(f"bit vectors differ in shape: {x.shape} vs {y.shape}")
    return int(np.count_nonzero(x != y))


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``M = left @ diag(singular) @ right.T``."""

    left: np.ndarray
    singular: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left * self.singular) @ self.right.T


def _round_robin(n: int):
    """Yield ``n - 1`` rounds of disjoint index pairs covering all pairs (``n`` even)."""
    others = list(range(1, n))
    for _ in range(n - 1):
        order = [0] + others
        first = np.array(order[: n // 2])
        second = np.array(order[::-1][: n // 2])
        yield first, second
        others = others[-1:] + others[:-1]


def _complete_basis(Q: np.ndarray, k: int) -> np.ndarray:
    """Replace the columns ``k:`` of ``Q`` by an orthonormal completion."""
    m, n = Q.shape
    basis = [Q[:, j] for j in range(k)]
    candidate = 0
    for _ in range(k, n):
        while True:
            e = np.zeros(m)
            e[candidate % m] = 1.0
            candidate += 1
            for _pass in range(2):
                for b in basis:
                    e -= np.dot(b, e) * b
            norm = np.linalg.norm(e)
            if norm > 1e-8:
                basis.append(e / norm)
                break
    return np.column_stack(basis)


def _jacobi_tall(A: np.ndarray, tol: float, max_sweeps: int):
    m, n = A.shape
    # rows of Wt / Vt are the columns being rotated (contiguous in memory)
    Wt = np.array(A.T, order="C")  # always a copy; rotations run in place
    Vt = np.eye(n)
    if n % 2:
        Wt = np.vstack([Wt, np.zeros((1, m))])
        Vt = np.pad(Vt, ((0, 1), (0, 1)))
        Vt[n, n] = 1.0
    size = Wt.shape[0]
    rounds = list(_round_robin(size)) if size > 1 else []
    for _ in range(max_sweeps):
        rotated = False
        for i, j in rounds:
            Wi, Wj = Wt[i], Wt[j]
            sq_i = np.einsum("ij,ij->i", Wi, Wi)
            sq_j = np.einsum("ij,ij->i", Wj, Wj)
            cross = np.einsum("ij,ij->i", Wi, Wj)
            active = np.abs(cross) > tol * np.sqrt(sq_i * sq_j)
            if not active.any():
                continue
            rotated = True
            if not active.all():
                i, j = i[active], j[active]
                Wi, Wj = Wi[active], Wj[active]
                sq_i, sq_j, cross = sq_i[active], sq_j[active], cross[active]
            zeta = (sq_j - sq_i) / (2.0 * cross)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            c = (1.0 / np.sqrt(1.0 + t * t))[:, None]
            s = c * t[:, None]
            Wt[i] = c * Wi - s * Wj
            Wt[j] = s * Wi + c * Wj
            Vi, Vj = Vt[i], Vt[j]
            Vt[i] = c * Vi - s * Vj
            Vt[j] = s * Vi + c * Vj
        if not rotated:
            break
    W, V = Wt[:n].T, Vt[:n, :n].T
    sigma = np.linalg.norm(W, axis=0)
    # stable sort keeps column order for (near-)ties
    order = np.argsort(-sigma, kind="stable")
    sigma, W, V = sigma[order], W[:, order], V[:, order]
    cutoff = max(m, n) * np.finfo(float).eps * (sigma[0] if sigma.size else 0.0)
    rank = int(np.count_nonzero(sigma > cutoff))
    U = np.zeros((m, n))
    U[:, :rank] = W[:, :rank] / sigma[:rank]
    if rank < n:
        U = _complete_basis(U, rank)
        sigma[rank:] = 0.0
    return U, sigma, np.ascontiguousarray(V)


def svd(M, tol: float = 1e-15, max_sweeps: int = 60) -> SvdResult:
    """Thin SVD by one-sided cyclic Jacobi rotations.

    Column pairs are processed in round-robin (tournament) order so each
    round rotates ``n/2`` disjoint pairs at once. The rotation is applied to
    the transpose when ``M`` is wide. Returns ``k = min(rows, cols)``
    singular triplets with singular values in non-increasing order.
    """
    A = as_matrix(M)
    if A.shape[0] >= A.shape[1]:
        U, s, V = _jacobi_tall(A, tol, max_sweeps)
        return SvdResult(U, s, V)
    U, s, V = _jacobi_tall(A.T, tol, max_sweeps)
    return SvdResult(V, s, U)
