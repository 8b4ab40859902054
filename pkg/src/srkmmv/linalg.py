"""Dense linear algebra primitives used by the Kaczmarz solvers.

Matrices and vectors are plain ``numpy`` arrays of ``float64``. Matrices are
kept row-major (C order) because the solver inner loop reads one row per
iteration. ``as_matrix`` / ``as_vector`` are the validating constructors: they
reject empty shapes and non-finite entries so that every downstream operation
can assume clean data.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, SingularMatrixError

__all__ = [
    "as_matrix",
    "as_vector",
    "dot",
    "row_norms_sq",
    "frobenius_norm_sq",
    "matmul",
    "least_squares_oracle",
]


def as_matrix(data) -> np.ndarray:
    """Coerce ``data`` to a validated 2-D float64 row-major array.

    Raises
    ------
    DimensionError
        If the input is not two-dimensional or has an empty axis.
    ValueError
        If any entry is NaN or infinite.
    """
    A = np.ascontiguousarray(data, dtype=np.float64)
    if A.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got ndim={A.ndim}")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise DimensionError(f"matrix axes must be nonempty, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def as_vector(data) -> np.ndarray:
    """Coerce ``data`` to a validated 1-D float64 array."""
    v = np.ascontiguousarray(data, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionError(f"expected a 1-D vector, got ndim={v.ndim}")
    if v.shape[0] < 1:
        raise DimensionError("vector must be nonempty")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def dot(u, v) -> float:
    """Inner product of two equal-length vectors."""
    u = as_vector(u)
    v = as_vector(v)
    if u.shape[0] != v.shape[0]:
        raise DimensionError(f"dot: lengths differ ({u.shape[0]} vs {v.shape[0]})")
    return float(u @ v)


def row_norms_sq(A) -> np.ndarray:
    """Squared Euclidean norm of every row of ``A``."""
    A = as_matrix(A)
    return np.einsum("ij,ij->i", A, A)


def frobenius_norm_sq(A) -> float:
    """Sum of all squared entries of ``A``."""
    A = as_matrix(A)
    return float(np.einsum("ij,ij->", A, A))


def matmul(A, X) -> np.ndarray:
    """Matrix product ``A @ X`` with explicit conformability check."""
    A = as_matrix(A)
    X = as_matrix(X)
    if A.shape[1] != X.shape[0]:
        raise DimensionError(
            f"matmul: inner dimensions differ ({A.shape[1]} vs {X.shape[0]})"
        )
    return A @ X


def least_squares_oracle(A, b) -> np.ndarray:
    """Least-squares minimizer of ``||b - A x||`` via the normal equations.

    Solves ``(A^T A) x = A^T b`` by Gaussian elimination with partial
    pivoting. Intended as a small-instance reference (n up to ~100), not a
    production solver: the normal equations square the conditioning, which is
    acceptable at oracle scale on well-conditioned inputs.

    Raises
    ------
    DimensionError
        If the system is underdetermined or shapes disagree.
    SingularMatrixError
        If a pivot falls below the numerical-rank threshold.
    """
    A = as_matrix(A)
    b = as_vector(b)
    m, n = A.shape
    if b.shape[0] != m:
        raise DimensionError(f"least squares: A has {m} rows but b has {b.shape[0]}")
    if m < n:
        raise DimensionError(f"least squares: underdetermined system ({m}x{n})")

    G = A.T @ A
    c = A.T @ b
    # Augmented elimination; pivot threshold scaled to the matrix magnitude.
    aug = np.hstack([G, c[:, None]])
    tol = n * np.finfo(np.float64).eps * max(1.0, float(np.max(np.abs(G))))
    for k in range(n):
        p = k + int(np.argmax(np.abs(aug[k:, k])))
        if abs(aug[p, k]) <= tol:
            raise SingularMatrixError(f"pivot {k} below threshold {tol:.3e}")
        if p != k:
            aug[[k, p]] = aug[[p, k]]
        factors = aug[k + 1 :, k] / aug[k, k]
        aug[k + 1 :, k:] -= factors[:, None] * aug[k, k:]
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        x[k] = (aug[k, n] - aug[k, k + 1 : n] @ x[k + 1 :]) / aug[k, k]
    return x
