"""Small dense symmetric linear algebra and finite differences."""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import EvaluationFailure, NonSymmetric

SYMMETRY_TOL = 1e-12
RANK_TOL = 1e-10


class EigenDecomp(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns


def check_symmetric(m, tol: float = SYMMETRY_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise NonSymmetric(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.allclose(m, m.T, rtol=0.0, atol=tol * max(1.0, np.abs(m).max())):
        raise NonSymmetric("matrix is not symmetric within tolerance")
    return m


def eig_sym(m, tol: float = SYMMETRY_TOL) -> EigenDecomp:
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending."""
    m = check_symmetric(m, tol)
    w, q = np.linalg.eigh(0.5 * (m + m.T))
    return EigenDecomp(w, q)


def pseudoinverse(m, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a symmetric matrix.

    Eigenvalues with ``|lam| < rank_tol * max|lam|`` are treated as zero, so
    the kernel of the result equals the (numerical) kernel of ``m``.
    """
    w, q = eig_sym(m)
    scale = np.abs(w).max()
    if scale == 0.0:
        return np.zeros_like(q)
    keep = np.abs(w) >= rank_tol * scale
    qk = q[:, keep]
    out = (qk / w[keep]) @ qk.T
    return 0.5 * (out + out.T)


def zero_sum_projector(n: int) -> np.ndarray:
    """Euclidean orthogonal projector onto zero-sum vectors, ``I - 11^T/n``."""
    if n < 1:
        raise ValueError("n must be positive")
    return np.eye(n) - np.full((n, n), 1.0 / n)


def finite_diff_jacobian(f: Callable, x, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian ``J[i, j] = d f_i / d x_j``."""
    x = np.asarray(x, dtype=float)
    if h <= 0:
        raise ValueError("h must be positive")
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        try:
            fp = np.atleast_1d(np.asarray(f(x + e), dtype=float))
            fm = np.atleast_1d(np.asarray(f(x - e), dtype=float))
        except (ValueError, ArithmeticError) as exc:
            raise EvaluationFailure(f"map undefined near stencil point {j}") from exc
        if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
            raise EvaluationFailure(f"non-finite value at stencil point {j}")
        cols.append((fp - fm) / (2 * h))
    return np.column_stack(cols)


def rel_frobenius(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))
