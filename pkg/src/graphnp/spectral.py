"""Normalized symmetric graph Laplacian and local structural eigenfeatures.

The Laplacian is ``L = I - D^{-1/2} A D^{-1/2}`` with the convention that
rows and columns of isolated nodes (degree 0, where the normalization is
undefined) are identically zero, diagonal included; context sparsification
routinely isolates nodes, and this keeps them spectrally inert.

Eigendecomposition uses cyclic Jacobi rotations: simple, robust, and
deterministic for the small dense matrices that arise here. The kernel is
JIT-compiled through numba when available and runs as plain Python
otherwise (same code, same arithmetic order, identical results).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

SYMMETRY_TOL = 1e-10
SIGN_TOL = 1e-12
OFF_DIAGONAL_TOL = 1e-12


def _jacobi_kernel(a, v, max_rotations):
    """Cyclic Jacobi sweeps on symmetric ``a``, accumulating rotations in ``v``.

    Mutates both arguments; returns (rotations used, final off-diagonal
    Frobenius norm). Stops when the off-diagonal norm falls to
    OFF_DIAGONAL_TOL or the rotation budget runs out.
    """
    n = a.shape[0]
    rotations = 0
    while True:
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off += 2.0 * a[i, j] * a[i, j]
        off = np.sqrt(off)
        if off <= 1e-12 or rotations >= max_rotations:
            return rotations, off
        for p in range(n - 1):
            for q in range(p + 1, n):
                if rotations >= max_rotations:
                    continue
                apq = a[p, q]
                if apq == 0.0:
                    continue
                rotations += 1
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for i in range(n):
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = aip * c - aiq * s
                    a[i, q] = aiq * c + aip * s
                for i in range(n):
                    api = a[p, i]
                    aqi = a[q, i]
                    a[p, i] = api * c - aqi * s
                    a[q, i] = aqi * c + api * s
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = vip * c - viq * s
                    v[i, q] = viq * c + vip * s


try:  # pragma: no cover - exercised implicitly by every eigensolve
    from numba import njit

    _jacobi_compiled = njit(cache=True)(_jacobi_kernel)
except Exception:  # pragma: no cover
    _jacobi_compiled = _jacobi_kernel


@dataclass(frozen=True)
class EigenSystem:
    """Full symmetric eigendecomposition, eigenvalues sorted descending.

    Column ``j`` of ``vectors`` pairs with ``values[j]``; each column is
    unit length with its first nonzero entry positive.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def size(self) -> int:
        return self.values.shape[0]


def normalized_laplacian(a: np.ndarray, d: np.ndarray) -> np.ndarray:
    """``I - D^{-1/2} A D^{-1/2}`` with all-zero rows for isolated nodes."""
    a = np.asarray(a, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("adjacency matrix must be square")
    if d.shape != a.shape:
        raise ValueError("degree matrix shape must match adjacency")
    deg = np.diag(d)
    inv_sqrt = np.zeros_like(deg)
    positive = deg > 0
    inv_sqrt[positive] = 1.0 / np.sqrt(deg[positive])
    lap = -(inv_sqrt[:, None] * a * inv_sqrt[None, :])
    lap[np.diag_indices_from(lap)] = np.where(positive, 1.0, 0.0)
    return lap


def symmetric_eigen(matrix: np.ndarray) -> EigenSystem:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Eigenvalues come back sorted descending (ties keep the solver's column
    order), eigenvector signs are fixed so the first entry larger than
    SIGN_TOL in magnitude is positive.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("input must be a square matrix")
    if matrix.size and np.max(np.abs(matrix - matrix.T)) > SYMMETRY_TOL:
        raise ValueError("input matrix is not symmetric")
    n = matrix.shape[0]
    a = np.array(matrix, dtype=np.float64, order="C", copy=True)
    v = np.eye(n, dtype=np.float64)
    if n > 1:
        rotations, off = _jacobi_compiled(a, v, 100 * n * n)
        if off > OFF_DIAGONAL_TOL:
            raise NumericalError(
                f"Jacobi eigensolver did not converge within {100 * n * n} "
                f"rotations (off-diagonal norm {off:.3e})")
    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:, order]
    for j in range(n):
        col = vectors[:, j]
        nonzero = np.nonzero(np.abs(col) > SIGN_TOL)[0]
        if nonzero.size and col[nonzero[0]] < 0.0:
            vectors[:, j] = -col
    return EigenSystem(values=values, vectors=vectors)


def edge_eigenfeatures(es: EigenSystem, u: int, v: int, m: int) -> np.ndarray:
    """Endpoint rows of the eigenvector matrix, top-``m`` columns each.

    Returns the length-``2m`` concatenation ``[vectors[u, :m];
    vectors[v, :m]]``; columns are already ordered by descending
    eigenvalue, so ``m = 1`` selects the largest-eigenvalue entries.
    """
    n = es.size
    if not 1 <= m <= n:
        raise ValueError(f"m must lie in [1, {n}], got {m}")
    if not (0 <= u < n and 0 <= v < n):
        raise IndexError("node index out of range for this eigensystem")
    return np.concatenate([es.vectors[u, :m], es.vectors[v, :m]])
