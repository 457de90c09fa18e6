"""Dense linear algebra for small symmetric matrices (dim roughly 2 to 20).

Everything works on plain float64 numpy arrays. Matrices are dense and
row-major throughout; there are no sparse paths.
"""

from typing import NamedTuple

import numpy as np

from .errors import NoConvergence, NotPositiveDefinite

SYMMETRY_RTOL = 1e-9


class EigenDecomposition(NamedTuple):
    """Spectral decomposition M = vectors @ diag(values) @ vectors.T."""

    values: np.ndarray  # ascending
    vectors: np.ndarray  # orthogonal, columns are eigenvectors


def symmetrize(matrix, rtol: float = SYMMETRY_RTOL) -> np.ndarray:
    """Validate and symmetrize a square matrix.

    Asymmetry up to ``rtol`` (relative to the largest entry) is treated as
    I/O roundoff and averaged away; anything larger is rejected as genuinely
    wrong input.
    """
    m = np.array(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise ValueError("matrix dimension must be at least 1")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    scale = np.max(np.abs(m))
    gap = np.max(np.abs(m - m.T))
    if gap > rtol * max(scale, 1.0):
        raise ValueError(f"matrix is not symmetric (asymmetry {gap:.3e}, scale {scale:.3e})")
    return 0.5 * (m + m.T)


def cholesky(matrix: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor L with L @ L.T == matrix.

    Raises NotPositiveDefinite (with the failing pivot index) when the input
    is not positive definite. Only the lower triangle of the input is read.
    """
    m = np.asarray(matrix, dtype=float)
    n = m.shape[0]
    lower = np.zeros((n, n))
    for j in range(n):
        pivot = m[j, j] - lower[j, :j] @ lower[j, :j]
        if not pivot > 0.0:  # also catches NaN
            raise NotPositiveDefinite(j)
        ljj = np.sqrt(pivot)
        lower[j, j] = ljj
        if j + 1 < n:
            lower[j + 1:, j] = (m[j + 1:, j] - lower[j + 1:, :j] @ lower[j, :j]) / ljj
    return lower


def sym_eig(matrix: np.ndarray) -> EigenDecomposition:
    """Full spectral decomposition of a symmetric matrix, eigenvalues ascending.

    Deterministic for identical input. Backed by LAPACK's symmetric
    eigensolver, which is exact enough for the small dimensions used here.
    """
    m = np.asarray(matrix, dtype=float)
    try:
        values, vectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"symmetric eigensolver failed: {exc}") from exc
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(vectors))):
        raise NoConvergence("symmetric eigensolver produced non-finite output")
    return EigenDecomposition(values=values, vectors=vectors)


def det_from_cholesky(lower: np.ndarray) -> float:
    """Determinant of the factored matrix: (prod of diagonal entries)^2."""
    return float(np.prod(np.diagonal(lower)) ** 2)


def solve_lower(lower: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve L @ X = B by forward substitution. B may be a vector or matrix."""
    L = np.asarray(lower, dtype=float)
    x = np.array(rhs, dtype=float)
    n = L.shape[0]
    for i in range(n):
        x[i] = (x[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def solve_cholesky(lower: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve (L @ L.T) @ X = B given the lower Cholesky factor L."""
    L = np.asarray(lower, dtype=float)
    x = solve_lower(L, rhs)
    n = L.shape[0]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - L[i + 1:, i] @ x[i + 1:]) / L[i, i]
    return x


def spd_inverse(matrix: np.ndarray) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix, symmetrized."""
    L = cholesky(matrix)
    inv = solve_cholesky(L, np.eye(L.shape[0]))
    return 0.5 * (inv + inv.T)
