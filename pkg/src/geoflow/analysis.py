"""Lyapunov monitors, convergence verdicts and structural audits."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .dynamics import DynamicsSpec, vector_field
from .errors import EnumerationImpossible, MissingPotential
from .games import enumerate_restricted_equilibria, payoff
from .hessian import HessianPotential, bregman_series, entropy
from .integrator import IntegratorConfig, Trajectory, integrate, orbit_closure, trailing_window
from .metrics import norm
from .simplex import SUPPORT_TOL, random_simplex_points

MONITOR_KINDS = ("potential_f", "bregman_to", "kl_to", "payoff_correlation", "speed")


@dataclass
class Monitor:
    kind: str
    times: np.ndarray
    values: np.ndarray

    def rates(self) -> np.ndarray:
        """Forward differences ``dvalue/dt``; NaN where a value is infinite."""
        v = self.values
        with np.errstate(invalid="ignore"):
            r = np.diff(v) / np.diff(self.times)
        r[~(np.isfinite(v[1:]) & np.isfinite(v[:-1]))] = np.nan
        return r

    def max_increase(self) -> float:
        with np.errstate(invalid="ignore"):
            d = np.diff(self.values)
        d = d[np.isfinite(d)]
        return float(d.max()) if d.size else 0.0

    def max_drift(self) -> float:
        v = self.values[np.isfinite(self.values)]
        return float(np.abs(v - v[0]).max()) if v.size else 0.0


def _potential_of(spec: DynamicsSpec, hp: HessianPotential | None) -> HessianPotential:
    hp = hp if hp is not None else spec.metric.potential
    if hp is None:
        raise MissingPotential("metric has no Hessian potential; pass one explicitly")
    return hp


def monitor(traj: Trajectory, spec: DynamicsSpec, kind: str, x_star=None,
            hp: HessianPotential | None = None) -> Monitor:
    if kind not in MONITOR_KINDS:
        raise ValueError(f"monitor kind must be one of {MONITOR_KINDS}")
    X = traj.states
    if kind == "potential_f":
        if spec.game.potential is None:
            raise MissingPotential(f"game {spec.game.name!r} has no potential")
        vals = spec.game.potential.values(X)
    elif kind == "bregman_to":
        if x_star is None:
            raise ValueError("bregman_to needs x_star")
        h = _potential_of(spec, hp)
        vals = bregman_series(h, x_star, X)
    elif kind == "kl_to":
        if x_star is None:
            raise ValueError("kl_to needs x_star")
        vals = bregman_series(entropy(), x_star, X)
    elif kind == "payoff_correlation":
        vals = np.array([payoff(spec.game, x) @ vector_field(spec, x) for x in X])
    else:
        vals = traj.speeds.copy()
    return Monitor(kind, traj.times, vals)


class Verdict(NamedTuple):
    kind: str  # converged_to_rest_point | recurrent | undecided
    point: np.ndarray | None = None
    period: float | None = None


def convergence_verdict(traj: Trajectory, spec: DynamicsSpec, tol: float = 1e-5,
                        eps: float = 1e-3) -> Verdict:
    """Converged if the trailing window is tiny and the speed there vanishes;
    recurrent if the orbit closes up; undecided otherwise."""
    if len(traj) < 100:
        raise ValueError("verdicts need at least 100 samples")
    w = traj.states[trailing_window(traj)]
    diam = float((w.max(axis=0) - w.min(axis=0)).max())
    xm = w.mean(axis=0)
    xm[xm <= SUPPORT_TOL] = 0.0
    xm /= xm.sum()
    sp = norm(spec.metric, xm, vector_field(spec, xm), tol=1e-8)
    if diam < tol and sp < tol:
        return Verdict("converged_to_rest_point", xm)
    period = orbit_closure(traj, eps)
    if period is not None:
        return Verdict("recurrent", None, period)
    return Verdict("undecided")


def _domain_perturbations(rng, x_star: np.ndarray, radius: float, count: int) -> np.ndarray:
    """Random states within ``radius`` (Euclidean) of ``x_star`` whose support contains it."""
    out = []
    n = x_star.size
    while len(out) < count:
        y = rng.dirichlet(np.ones(n))
        d = np.linalg.norm(y - x_star)
        if d < 1e-12:
            continue
        s = radius * rng.uniform(0.2, 1.0) / d
        x = x_star + min(s, 1.0) * (y - x_star)
        out.append(x / x.sum())
    return np.array(out)


def ess_stability_probe(spec: DynamicsSpec, x_star, radius: float = 0.1, count: int = 20,
                        cfg: IntegratorConfig | None = None, hp: HessianPotential | None = None,
                        rng: np.random.Generator | None = None) -> bool:
    """Perturb ``x_star`` inside its domain and check attraction under the flow.

    Passes iff every run keeps ``D_h(x*, x(t))`` nonincreasing and ends within
    ``radius / 10`` of ``x_star``.
    """
    h = _potential_of(spec, hp)
    x_star = np.asarray(x_star, dtype=float)
    cfg = IntegratorConfig(step=1e-2, t_end=60.0) if cfg is None else cfg
    rng = np.random.default_rng(0) if rng is None else rng
    for x0 in _domain_perturbations(rng, x_star, radius, count):
        traj = integrate(spec, x0, cfg)
        D = monitor(traj, spec, "bregman_to", x_star, h).values
        if np.any(np.diff(D) > 1e-12 * np.maximum(1.0, D[:-1])):
            return False
        if np.linalg.norm(traj.states[-1] - x_star) >= radius / 10:
            return False
    return True


@dataclass
class PermanenceCertificate:
    certified: bool
    witness: np.ndarray | None = None
    margins: list[float] = field(default_factory=list)
    rest_points: list[np.ndarray] = field(default_factory=list)


def permanence_certificate(spec: DynamicsSpec, p, margin: float = 1e-9) -> PermanenceCertificate:
    """Check ``<v(x*), p - x*> > 0`` at every boundary restricted equilibrium."""
    if spec.game.matrix is None:
        raise EnumerationImpossible("boundary rest points can only be enumerated for matching games")
    p = np.asarray(p, dtype=float)
    eqs = enumerate_restricted_equilibria(spec.game)
    boundary = [x for x in eqs.points if np.any(x <= SUPPORT_TOL)]
    if any(len(S) < spec.n for S in eqs.degenerate_supports):
        return PermanenceCertificate(False, None, [], boundary)
    margins = [float(payoff(spec.game, x) @ (p - x)) for x in boundary]
    for x, m in zip(boundary, margins):
        if not m > margin:
            return PermanenceCertificate(False, x, margins, boundary)
    return PermanenceCertificate(True, None, margins, boundary)


@dataclass
class CorrelationReport:
    min_margin: float  # min of <v, V> - |V|_x^2
    min_correlation: float  # min of <v, V>
    implication_holds: bool  # <v, V> <= 1e-8 implies |V|_x <= 1e-5
    worst_state: np.ndarray
    samples: int
    low_correlation_speed: float = 0.0  # largest |V|_x among states with <v, V> <= 1e-8


def positive_correlation_audit(spec: DynamicsSpec, samples: int = 500,
                               rng: np.random.Generator | None = None,
                               boundary_fraction: float = 0.3, states=None) -> CorrelationReport:
    rng = np.random.default_rng(0) if rng is None else rng
    X = random_simplex_points(rng, spec.n, samples, boundary_fraction) if states is None else states
    min_margin, min_corr, worst, ok, low = np.inf, np.inf, None, True, 0.0
    for x in X:
        V = vector_field(spec, x)
        corr = float(payoff(spec.game, x) @ V)
        sq = norm(spec.metric, x, V, tol=1e-8) ** 2
        if corr - sq < min_margin:
            min_margin, worst = corr - sq, x
        min_corr = min(min_corr, corr)
        if corr <= 1e-8:
            low = max(low, float(np.sqrt(sq)))
            ok = ok and low <= 1e-5
    return CorrelationReport(float(min_margin), float(min_corr), ok, worst, len(X), low)


def dominance_ledger(hp: HessianPotential, dominated: int, dominator: int, X) -> np.ndarray:
    """``D_h(e_p, x) - D_h(e_q, x)`` up to an additive constant, i.e. ``<dh(x), e_q - e_p>``.

    Along interior Hessian dynamics its rate is ``<v(x), e_q - e_p>``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    G = np.array([hp.grad(x) for x in X])
    return G[:, dominator] - G[:, dominated]


def speed_lsc_probe(spec: DynamicsSpec, x, offsets=None) -> float:
    """Sampled ``liminf`` of the speed along an interior approach to ``x``,
    minus the speed at ``x``. A diagnostic only; nonnegative values are
    consistent with lower semicontinuity."""
    x = np.asarray(x, dtype=float)
    b = np.full(x.size, 1.0 / x.size)
    ts = np.logspace(-4, -8, 5) if offsets is None else np.asarray(offsets)
    here = norm(spec.metric, x, vector_field(spec, x), tol=1e-8)
    near = [norm(spec.metric, y, vector_field(spec, y), tol=1e-8)
            for y in ((1 - t) * x + t * b for t in ts)]
    return float(min(near) - here)
