"""Metric tangent projection at interior, minimal-rank and full-rank states."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionalityLimit, OutsideDomain
from .metrics import FULL_RANK, MINIMAL_RANK, MetricField, normal_vector
from .simplex import SUPPORT_TOL, TANGENT_TOL

MAX_FREE = 20
TIE_TOL = 1e-12


@dataclass(frozen=True)
class ProjectionResult:
    vector: np.ndarray
    active_support: tuple[int, ...]
    kkt_residual: float


def _interior_formula(w: np.ndarray, nvec: np.ndarray) -> np.ndarray:
    return w - (w.sum() / nvec.sum()) * nvec


def project_interior(g: MetricField, x, w, tol: float = TANGENT_TOL) -> ProjectionResult:
    """Orthogonal projection onto the tangent space through the normal vector.

    Also valid at boundary states of minimal-rank metrics, for ``w`` supported
    on ``supp(x)``.
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    on = x > SUPPORT_TOL
    if not np.all(on):
        if g.extendability != MINIMAL_RANK:
            raise OutsideDomain("interior formula used at a boundary state of a full-rank metric")
        if np.any(np.abs(w[~on]) > tol * max(1.0, np.abs(w).max())):
            raise OutsideDomain("vector has mass outside the support of the state")
        w = np.where(on, w, 0.0)
    nvec = normal_vector(g, x)
    z = _interior_formula(w, nvec)
    if not np.all(on):
        z[~on] = 0.0
    return ProjectionResult(z, tuple(np.flatnonzero(on)), 0.0)


def _metric_on(g: MetricField, x: np.ndarray) -> np.ndarray:
    """Metric tensor ``g(x)`` at a full-rank state."""
    if g.weight is not None:
        return np.diag(1.0 / g.weights(x))
    return np.linalg.inv(g.g_sharp(x))


def _face_projection(G: np.ndarray, w: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Metric projection of ``w`` onto ``{z : sum z = 0, z = 0 off S}``.

    First project onto the coordinate subspace of S (under G), then remove
    the component along the normal vector of that subspace.
    """
    z = np.zeros_like(w)
    if S.sum() <= 1:
        return z
    off = ~S
    K = np.linalg.inv(G[np.ix_(S, S)])
    ws = w[S] + K @ (G[np.ix_(S, off)] @ w[off])
    nS = K.sum(axis=1)
    z[S] = _interior_formula(ws, nS)
    return z


def _cone_generators(on: np.ndarray) -> list[np.ndarray]:
    n = on.size
    idx_on = np.flatnonzero(on)
    gens = []
    anchor = idx_on[0]
    for a in idx_on:
        for b in idx_on:
            if a != b:
                d = np.zeros(n)
                d[a], d[b] = 1.0, -1.0
                gens.append(d)
    for c in np.flatnonzero(~on):
        d = np.zeros(n)
        d[c], d[anchor] = 1.0, -1.0
        gens.append(d)
    return gens


def moreau_residual(G: np.ndarray, x: np.ndarray, w: np.ndarray, z: np.ndarray) -> float:
    """Largest violation of the cone-projection optimality conditions at ``z``."""
    r = G @ (w - z)
    scale = max(1.0, float(np.sqrt(max(w @ G @ w, 0.0))))
    res = abs(float(r @ z))
    for d in _cone_generators(x > SUPPORT_TOL):
        res = max(res, float(r @ d))
    return res / scale


def project_cone(g: MetricField, x, w, tol: float = 1e-10) -> ProjectionResult:
    """Closest point of the tangent cone to ``w`` in the metric at ``x``.

    Enumerates the faces ``supp(x) <= S`` of the cone, projects onto each
    face's span and keeps the nearest feasible candidate (larger support on
    ties).
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    on = x > SUPPORT_TOL
    if np.all(on):
        return project_interior(g, x, w)
    free = np.flatnonzero(~on)
    if free.size > MAX_FREE:
        raise DimensionalityLimit(f"{free.size} zero coordinates exceed the limit of {MAX_FREE}")
    G = _metric_on(g, x)
    best = None
    best_d = np.inf
    best_S: tuple[int, ...] = ()
    for k in range(free.size, -1, -1):  # larger supports first
        for extra in itertools.combinations(free, k):
            S = on.copy()
            S[list(extra)] = True
            z = _face_projection(G, w, S)
            if np.any(z[~on] < -tol):
                continue
            r = w - z
            d = float(r @ G @ r)
            if best is None or d < best_d - TIE_TOL * max(1.0, best_d):
                best, best_d, best_S = z, d, tuple(np.flatnonzero(S))
    best = best.copy()
    best[~on] = np.maximum(best[~on], 0.0)
    return ProjectionResult(best, best_S, moreau_residual(G, x, w, best))


def project(g: MetricField, x, w) -> ProjectionResult:
    """Tangent projection dispatched on the state and the metric's boundary class."""
    x = np.asarray(x, dtype=float)
    if np.all(x > SUPPORT_TOL) or g.extendability == MINIMAL_RANK:
        return project_interior(g, x, w)
    if g.extendability == FULL_RANK:
        return project_cone(g, x, w)
    raise OutsideDomain(f"no tangent projection for a {g.extendability} metric at the boundary")


def euclidean_max_average_projection(x, w) -> np.ndarray:
    """Euclidean cone projection via the best-average superset of ``supp(x)``.

    Reference formula: among supersets of the support, the one maximizing the
    mean of ``w`` carries ``w - mean``; all other coordinates are 0.
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    on = x > SUPPORT_TOL
    free = np.flatnonzero(~on)
    best_avg, best_S = -np.inf, None
    for k in range(free.size, -1, -1):
        for extra in itertools.combinations(free, k):
            S = on.copy()
            S[list(extra)] = True
            avg = w[S].mean()
            if avg > best_avg + TIE_TOL:
                best_avg, best_S = avg, S
    z = np.zeros_like(w)
    z[best_S] = w[best_S] - best_avg
    return z
