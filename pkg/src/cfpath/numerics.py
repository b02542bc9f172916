"""Dense linear-algebra kernels: validated matvec and a cyclic-Jacobi symmetric eigensolver.

Everything here works on float64 numpy arrays and is pure: no global state,
no randomness, bit-identical outputs for identical inputs.
"""

from __future__ import annotations

import math

import numpy as np

SYMMETRY_TOL = 1e-9
# Convergence threshold for the off-diagonal Frobenius norm, relative to the
# input scale so large matrices converge just like small ones.
JACOBI_OFFDIAG_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got array with ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    return a


def as_vector(v) -> np.ndarray:
    a = np.asarray(v, dtype=np.float64)
    if a.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got array with ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector contains non-finite entries")
    return a


def matvec(m, v) -> np.ndarray:
    """Matrix-vector product with explicit dimension checking."""
    a = as_matrix(m)
    x = as_vector(v)
    if a.shape[1] != x.shape[0]:
        raise ValueError(
            f"matvec: matrix is {a.shape[0]}x{a.shape[1]} but vector has dim {x.shape[0]}"
        )
    return a @ x


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def sym_eigen(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) with eigenvalues sorted descending and
    eigenvectors as the corresponding columns. Eigenvector signs are
    canonicalized so the first nonzero component is positive.

    Raises ValueError for non-square or asymmetric input, RuntimeError if the
    off-diagonal norm has not converged after the sweep cap.
    """
    a = as_matrix(m).copy()
    n, ncols = a.shape
    if n != ncols:
        raise ValueError(f"sym_eigen: matrix must be square, got {n}x{ncols}")
    asym = float(np.max(np.abs(a - a.T))) if n > 1 else 0.0
    if asym > SYMMETRY_TOL:
        raise ValueError(
            f"sym_eigen: matrix is asymmetric (max |a - a.T| = {asym:.3e} > {SYMMETRY_TOL})"
        )
    # Work on the symmetrized matrix so tiny input asymmetry cannot bias sweeps.
    a = (a + a.T) / 2.0

    vectors = np.eye(n)
    scale = max(1.0, float(np.sqrt(np.sum(a * a))))
    tol = JACOBI_OFFDIAG_TOL * scale

    converged = False
    for _ in range(JACOBI_MAX_SWEEPS):
        if _offdiag_norm(a) <= tol:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # a <- J^T a J for the (p, q) rotation; columns first, then rows.
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                vec_p = vectors[:, p].copy()
                vec_q = vectors[:, q].copy()
                vectors[:, p] = c * vec_p - s * vec_q
                vectors[:, q] = s * vec_p + c * vec_q
    else:
        if _offdiag_norm(a) > tol:
            raise RuntimeError(
                f"sym_eigen: no convergence after {JACOBI_MAX_SWEEPS} sweeps "
                f"(off-diagonal norm {_offdiag_norm(a):.3e} > {tol:.3e})"
            )
        converged = True
    assert converged

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    return values, canonicalize_signs(vectors)


def canonicalize_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its first nonzero component is positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nonzero = np.nonzero(col)[0]
        if nonzero.size and col[nonzero[0]] < 0.0:
            out[:, j] = -col
    return out
