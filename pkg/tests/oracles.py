"""Independent reference computations used only by the tests."""

import math

import numpy as np


def jacobi_eigenvalues(S, tol=1e-14, max_sweeps=100):
    """Eigenvalues of a symmetric matrix by classical two-sided cyclic Jacobi,
    written with scalar loops so it shares no code with the package SVD."""
    A = [list(map(float, row)) for row in np.asarray(S)]
    n = len(A)
    for _ in range(max_sweeps):
        off = sum(A[i][j] ** 2 for i in range(n) for j in range(n) if i != j)
        if off < tol**2:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p][q]) < 1e-300:
                    continue
                theta = (A[q][q] - A[p][p]) / (2.0 * A[p][q])
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp, akq = A[k][p], A[k][q]
                    A[k][p] = c * akp - s * akq
                    A[k][q] = s * akp + c * akq
                for k in range(n):
                    apk, aqk = A[p][k], A[q][k]
                    A[p][k] = c * apk - s * aqk
                    A[q][k] = s * apk + c * aqk
    return sorted((A[i][i] for i in range(n)), reverse=True)


def gauss_solve(A, B):
    """Solve ``A X = B`` by Gaussian elimination with partial pivoting (pure Python)."""
    A = [list(map(float, row)) for row in np.asarray(A)]
    B = [list(map(float, row)) for row in np.atleast_2d(np.asarray(B, dtype=float).T).T]
    n = len(A)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(A[r][col]))
        A[col], A[piv] = A[piv], A[col]
        B[col], B[piv] = B[piv], B[col]
        for r in range(col + 1, n):
            f = A[r][col] / A[col][col]
            for k in range(col, n):
                A[r][k] -= f * A[col][k]
            for k in range(len(B[r])):
                B[r][k] -= f * B[col][k]
    X = [[0.0] * len(B[0]) for _ in range(n)]
    for r in range(n - 1, -1, -1):
        for k in range(len(B[0])):
            acc = B[r][k] - sum(A[r][j] * X[j][k] for j in range(r + 1, n))
            X[r][k] = acc / A[r][r]
    return np.array(X)


def brute_hamming(a, b):
    return sum(1 for x, y in zip(a, b) if x != y)


def mod2_matvec(U, x):
    """``U^T x mod 2`` with explicit integer loops."""
    d, p = len(U), len(U[0])
    return [sum(int(U[j][t]) * int(x[j]) for j in range(d)) % 2 for t in range(p)]


def exhaustive_nn(data, q):
    best = None
    for i, row in enumerate(data):
        h = brute_hamming(row, q)
        if best is None or h < best[1]:
            best = (i, h)
    return best
