"""Population states on the simplex, tangent vectors and supports.

States, tangent vectors and covectors are plain 1-d float arrays; the
helpers here validate and snap them.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch

SUPPORT_TOL = 1e-12
TANGENT_TOL = 1e-10


def as_simplex_point(p, support_tol: float = SUPPORT_TOL) -> np.ndarray:
    """Validate ``p`` as a population state and snap tiny coordinates to 0.

    Coordinates at or below ``support_tol`` (including slightly negative
    roundoff) become exact zeros and the rest is renormalized.
    """
    x = np.array(p, dtype=float).ravel()
    if x.size < 1 or not np.all(np.isfinite(x)):
        raise ValueError("a simplex point needs finite coordinates")
    if x.min() < -1e-9 or abs(x.sum() - 1.0) > 1e-9:
        raise ValueError(f"not a point of the simplex: {x}")
    x[x <= support_tol] = 0.0
    return x / x.sum()


def support(x, tol: float = 0.0) -> np.ndarray:
    """Boolean mask of strategies with share above ``tol``."""
    return np.asarray(x) > tol


def is_interior(x, tol: float = 0.0) -> bool:
    return bool(np.all(np.asarray(x) > tol))


def vertex(n: int, i: int) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e


def barycenter(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def _check_dims(x, z):
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if x.shape != z.shape:
        raise DimensionMismatch(f"state has shape {x.shape}, vector has {z.shape}")
    return x, z


def in_tangent_cone(x, z, tol: float = TANGENT_TOL, support_tol: float = SUPPORT_TOL) -> bool:
    """True iff ``z`` is a feasible direction of motion at ``x``."""
    x, z = _check_dims(x, z)
    off = ~support(x, support_tol)
    return bool(abs(z.sum()) <= tol and np.all(z[off] >= -tol))


def in_tangent_space(x, z, tol: float = TANGENT_TOL, support_tol: float = SUPPORT_TOL) -> bool:
    """True iff ``z`` sums to zero and vanishes off the support of ``x``."""
    x, z = _check_dims(x, z)
    off = ~support(x, support_tol)
    return bool(abs(z.sum()) <= tol and np.all(np.abs(z[off]) <= tol))


def euclid_project_simplex(p) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort and threshold)."""
    p = np.asarray(p, dtype=float).ravel()
    u = np.sort(p)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, p.size + 1)
    rho = np.count_nonzero(u - css / ind > 0)
    theta = css[rho - 1] / rho
    x = np.maximum(p - theta, 0.0)
    return x / x.sum()


def random_simplex_points(rng: np.random.Generator, n: int, count: int,
                          boundary_fraction: float = 0.0) -> np.ndarray:
    """Uniform draws from the simplex; a fraction is pushed onto random faces."""
    pts = rng.dirichlet(np.ones(n), size=count)
    k = int(round(boundary_fraction * count))
    for i in range(k):
        nz = rng.integers(1, n)  # number of zeroed coordinates, keep at least one
        idx = rng.choice(n, size=nz, replace=False)
        pts[i, idx] = 0.0
        pts[i] /= pts[i].sum()
    return pts
