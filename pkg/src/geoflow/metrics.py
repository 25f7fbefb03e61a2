"""Metric fields on the simplex, the sharp map and extendability checks.

A metric is represented through ``g_sharp(x)``, the inverse metric tensor,
which extends continuously to boundary states. Separable metrics carry the
weighting function so that hot paths can stay diagonal.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import OutsideDomain, ZeroSalience
from .numerics import pseudoinverse
from .simplex import SUPPORT_TOL, TANGENT_TOL

MINIMAL_RANK = "minimal_rank"
FULL_RANK = "full_rank"
NEITHER = "neither"


@dataclass(frozen=True)
class WeightFunction:
    """Weighting ``phi`` of a separable metric, ``g_sharp = diag(phi(x))``."""

    phi: Callable[[np.ndarray], np.ndarray]
    vanishing_at_zero: bool


@dataclass(frozen=True, eq=False)
class MetricField:
    n: int
    sharp_tensor: Callable[[np.ndarray], np.ndarray]
    extendability: str
    descriptor: str = "custom"
    weight: WeightFunction | None = None
    p: float | None = None
    potential: object | None = None  # HessianPotential when g = Hess h
    lipschitz: bool = True

    @property
    def separable(self) -> bool:
        return self.weight is not None

    @property
    def regime(self) -> str:
        return "continuous" if self.extendability == MINIMAL_RANK else "discontinuous"

    def weights(self, x) -> np.ndarray:
        """Diagonal of ``g_sharp(x)`` for separable metrics."""
        return np.asarray(self.weight.phi(np.asarray(x, dtype=float)), dtype=float)

    def g_sharp(self, x) -> np.ndarray:
        if self.weight is not None:
            return np.diag(self.weights(x))
        return np.asarray(self.sharp_tensor(np.asarray(x, dtype=float)), dtype=float)

    def __repr__(self):
        extra = f", p={self.p}" if self.p is not None else ""
        return f"MetricField({self.descriptor}, n={self.n}{extra})"


def separable_metric(phi: WeightFunction | Callable, n: int, descriptor: str = "separable",
                     vanishing_at_zero: bool | None = None, p: float | None = None,
                     potential=None, lipschitz: bool = True) -> MetricField:
    if not isinstance(phi, WeightFunction):
        if vanishing_at_zero is None:
            vanishing_at_zero = bool(abs(float(np.asarray(phi(np.array([0.0])))[0])) == 0.0)
        phi = WeightFunction(phi, vanishing_at_zero)
    ext = MINIMAL_RANK if phi.vanishing_at_zero else FULL_RANK
    return MetricField(n=n, sharp_tensor=lambda x: np.diag(phi.phi(x)), extendability=ext,
                       descriptor=descriptor, weight=phi, p=p, potential=potential,
                       lipschitz=lipschitz)


def euclidean(n: int) -> MetricField:
    return prep(n, 0.0, descriptor="euclidean")


def shahshahani(n: int) -> MetricField:
    return prep(n, 1.0, descriptor="shahshahani")


def log_barrier(n: int) -> MetricField:
    return prep(n, 2.0, descriptor="logbarrier")


def prep(n: int, p: float, descriptor: str = "prep") -> MetricField:
    """Metric of the p-replicator dynamics, ``g_sharp = diag(x**p)``.

    ``p in (0, 1)`` gives a minimal-rank metric whose dynamics are not
    Lipschitz at the boundary.
    """
    from .hessian import potential_p

    p = float(p)
    if p < 0:
        raise ValueError("p must be nonnegative")
    if p == 0.0:
        phi = WeightFunction(lambda x: np.ones_like(x), vanishing_at_zero=False)
    elif p == 1.0:
        phi = WeightFunction(lambda x: np.array(x, dtype=float), vanishing_at_zero=True)
    elif p == 2.0:
        phi = WeightFunction(lambda x: x * x, vanishing_at_zero=True)
    else:
        phi = WeightFunction(lambda x: np.power(x, p), vanishing_at_zero=True)
    return separable_metric(phi, n, descriptor=descriptor, p=p, potential=potential_p(p),
                            lipschitz=not (0.0 < p < 1.0))


def custom_metric(sharp_tensor: Callable, n: int, extendability: str,
                  descriptor: str = "custom", potential=None) -> MetricField:
    if extendability not in (MINIMAL_RANK, FULL_RANK, NEITHER):
        raise ValueError(f"unknown extendability {extendability!r}")
    return MetricField(n=n, sharp_tensor=sharp_tensor, extendability=extendability,
                       descriptor=descriptor, potential=potential)


def constant_metric(g_sharp) -> MetricField:
    """Full-rank metric with a constant (symmetric positive definite) ``g_sharp``."""
    G = np.array(g_sharp, dtype=float)
    G.setflags(write=False)
    return custom_metric(lambda x: G, G.shape[0], FULL_RANK, descriptor="constant")


# -- operations -----------------------------------------------------------------

def sharp(g: MetricField, x, omega) -> np.ndarray:
    """Primal vector of a covector: ``g_sharp(x) @ omega``."""
    omega = np.asarray(omega, dtype=float)
    if g.weight is not None:
        return g.weights(x) * omega
    return g.g_sharp(x) @ omega


def normal_vector(g: MetricField, x) -> np.ndarray:
    """Sharp of the all-ones covector."""
    if g.weight is not None:
        return g.weights(x).copy()
    return g.g_sharp(x).sum(axis=1)


def _metric_matrix(g: MetricField, x, w, w2, tol):
    """Matrix of the scalar product at ``x``; checks domain membership."""
    x = np.asarray(x, dtype=float)
    G = g.g_sharp(x)
    if g.extendability == MINIMAL_RANK and np.any(x <= SUPPORT_TOL):
        off = x <= SUPPORT_TOL
        for v in (w, w2):
            if np.any(np.abs(v[off]) > tol):
                raise OutsideDomain("vector has mass outside the support of the state")
        return pseudoinverse(G)
    return np.linalg.inv(G)


def inner(g: MetricField, x, w, w2, tol: float = TANGENT_TOL) -> float:
    """Scalar product ``<w, w2>_x`` (pseudoinverse of ``g_sharp`` at the boundary)."""
    w = np.asarray(w, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    x = np.asarray(x, dtype=float)
    if g.weight is not None:
        d = g.weights(x)
        on = d > 0
        if np.any(~on):
            if g.extendability != MINIMAL_RANK:
                raise OutsideDomain("metric weight vanishes at a full-rank state")
            if np.any(np.abs(w[~on]) > tol) or np.any(np.abs(w2[~on]) > tol):
                raise OutsideDomain("vector has mass outside the support of the state")
        return float(np.sum(w[on] * w2[on] / d[on]))
    return float(w @ _metric_matrix(g, x, w, w2, tol) @ w2)


def norm(g: MetricField, x, w, tol: float = TANGENT_TOL) -> float:
    return float(np.sqrt(max(inner(g, x, w, w, tol), 0.0)))


def similarity(g: MetricField, x, a: int, b: int) -> float:
    G = g.g_sharp(x)
    if G[a, a] <= 0 or G[b, b] <= 0:
        raise ZeroSalience(f"strategy {a if G[a, a] <= 0 else b} has zero salience")
    r = G[a, b] / np.sqrt(G[a, a] * G[b, b])
    return float(np.clip(r, -1.0, 1.0))


def _face_probes(n: int) -> list[np.ndarray]:
    """Barycenters of every proper face of the simplex."""
    probes = []
    for mask in range(1, 2 ** n - 1):
        on = np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)
        x = on / on.sum()
        probes.append(x.astype(float))
    return probes


def _rank_class(G: np.ndarray, x: np.ndarray, tol: float) -> str:
    scale = max(np.abs(G).max(), 1e-300)
    on = x > SUPPORT_TOL
    lam = np.linalg.eigvalsh(0.5 * (G + G.T))
    if lam.min() > tol * scale:
        return FULL_RANK
    off_block = np.abs(G[~on]).max(initial=0.0)
    if off_block <= tol * scale:
        lam_on = np.linalg.eigvalsh(G[np.ix_(on, on)])
        if lam_on.min() > tol * scale:
            return MINIMAL_RANK
    return NEITHER


def _oscillates(g: MetricField, x: np.ndarray, samples: int = 4000) -> bool:
    """Whether ``g_sharp`` fails to settle along an interior approach to ``x``."""
    b = np.full(x.size, 1.0 / x.size)
    ts = np.logspace(-1, -7, samples)
    vals = np.array([g.g_sharp((1 - t) * x + t * b).ravel() for t in ts])
    tv = np.abs(np.diff(vals, axis=0)).sum(axis=0)
    spread = np.abs(vals[-1] - vals[0])
    return bool(np.any(tv > 3.0 * spread + 1e-6))


def classify_extendability(g: MetricField, probe_states=None, tol: float = 1e-10) -> str:
    """Sampled extendability verdict: minimal_rank, full_rank or neither.

    At each boundary probe the rank pattern of ``g_sharp`` is compared with
    the support, and the approach from the interior is checked for
    oscillation (a sign that no continuous extension exists).
    """
    probes = _face_probes(g.n) if probe_states is None else [np.asarray(p, float) for p in probe_states]
    verdicts = set()
    for x in probes:
        try:
            G = g.g_sharp(x)
        except (ArithmeticError, ValueError):
            return NEITHER
        if not np.all(np.isfinite(G)):
            return NEITHER
        if np.any(x <= SUPPORT_TOL) and _oscillates(g, x):
            return NEITHER
        verdicts.add(_rank_class(G, x, tol))
    if len(verdicts) == 1:
        return verdicts.pop()
    return NEITHER
