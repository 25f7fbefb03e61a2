"""Trajectories of Riemannian dynamics in both regimes.

Continuous dynamics (minimal-rank metrics) use classical RK4 with mass
renormalization; supports never change. Discontinuous dynamics use projected
explicit Euler, ``x <- P_simplex(x + h V(x))``, which realizes sliding along
faces and lets supports change.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import _kernels
from .dynamics import DynamicsSpec, vector_field
from .errors import StepExplosion
from .metrics import norm
from .simplex import as_simplex_point, euclid_project_simplex

SCHEMES = ("auto", "rk4", "euler_projected")


@dataclass(frozen=True)
class IntegratorConfig:
    scheme: str = "auto"
    step: float = 1e-3
    t_end: float = 10.0
    boundary_snap: float = 1e-12

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.step > self.t_end:
            raise ValueError("step must not exceed t_end")

    def resolved_scheme(self, spec: DynamicsSpec) -> str:
        if self.scheme != "auto":
            return self.scheme
        return "rk4" if spec.regime == "continuous" else "euler_projected"


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (steps + 1, n)
    speeds: np.ndarray
    scheme: str = "rk4"
    warnings: list[str] = field(default_factory=list)

    @property
    def supports(self) -> np.ndarray:
        return self.states > 0.0

    @property
    def n(self) -> int:
        return self.states.shape[1]

    def __len__(self):
        return self.times.size

    def support_changes(self) -> int:
        s = self.supports
        return int(np.count_nonzero(np.any(s[1:] != s[:-1], axis=1)))

    def to_csv(self, path, monitors: dict[str, np.ndarray] | None = None) -> None:
        write_trajectory_csv(self, path, monitors)


def _fast_field(spec: DynamicsSpec) -> Callable[[np.ndarray], np.ndarray]:
    """Vector field closure; separable matching cases skip all dispatch."""
    g, game = spec.metric, spec.game
    if spec.form == "projected" and g.weight is not None and game.matrix is not None \
            and g.extendability == "minimal_rank":
        A = game.matrix
        phi = g.weight.phi

        def f(x):
            d = phi(x)
            dv = d * (A @ x)
            return dv - (dv.sum() / d.sum()) * d
        return f
    return lambda x: vector_field(spec, x)


def _kernel_for(spec: DynamicsSpec, scheme: str) -> str | None:
    g, game = spec.metric, spec.game
    if spec.form != "projected" or game.matrix is None or g.weight is None or g.p is None:
        return None
    if scheme == "rk4" and g.extendability == "minimal_rank":
        return "rk4"
    if scheme == "euler_projected" and g.p == 0.0:
        return "euler"
    return None


def _speed_fn(spec: DynamicsSpec) -> Callable[[np.ndarray, np.ndarray], float]:
    g = spec.metric
    if g.weight is not None:
        phi = g.weight.phi

        def s(x, V):
            d = phi(x)
            on = d > 0
            return float(np.sqrt(np.sum(V[on] ** 2 / d[on])))
        return s
    return lambda x, V: norm(g, x, V, tol=1e-8)


def integrate(spec: DynamicsSpec, x0, cfg: IntegratorConfig | None = None, **overrides) -> Trajectory:
    """Integrate the dynamics from ``x0`` over ``[0, cfg.t_end]``."""
    cfg = IntegratorConfig(**overrides) if cfg is None else cfg
    x = as_simplex_point(x0, cfg.boundary_snap)
    scheme = cfg.resolved_scheme(spec)
    nsteps = int(round(cfg.t_end / cfg.step))
    h = cfg.step
    f = _fast_field(spec)
    spd = _speed_fn(spec)
    states = np.empty((nsteps + 1, x.size))
    speeds = np.empty(nsteps + 1)
    notes = []
    if not spec.metric.lipschitz and np.any(x == 0):
        msg = ("non-Lipschitz metric with a boundary initial condition: the stationary "
               "branch is followed, other solutions exist")
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)

    kernel = _kernel_for(spec, scheme)
    if kernel is not None:
        A = np.ascontiguousarray(spec.game.matrix, dtype=float)
        if kernel == "rk4":
            states, speeds, failed = _kernels.rk4_prep(A, float(spec.metric.p), x, h, nsteps)
        else:
            states, speeds, failed = _kernels.euler_euclid(A, x, h, nsteps, float(cfg.boundary_snap))
        if failed >= 0:
            raise StepExplosion(f"{scheme} step {failed} left the simplex; reduce the step")
        return Trajectory(np.arange(nsteps + 1) * h, states, speeds, scheme, notes)

    states[0] = x
    if scheme == "rk4":
        on = x > 0
        off = ~on
        for k in range(nsteps):
            k1 = f(x)
            speeds[k] = spd(x, k1)
            k2 = f(x + 0.5 * h * k1)
            k3 = f(x + 0.5 * h * k2)
            k4 = f(x + h * k3)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            x[off] = 0.0
            if np.any(x[on] <= 0.0):
                raise StepExplosion(f"RK4 step {k} pushed a coordinate in the support to <= 0; "
                                    "reduce the step")
            x = x / x.sum()
            states[k + 1] = x
    else:
        for k in range(nsteps):
            V = f(x)
            speeds[k] = spd(x, V)
            y = x + h * V
            if y.min() < -10.0 * h:
                raise StepExplosion(f"Euler step {k} left the simplex by {-y.min():.3g}")
            x = euclid_project_simplex(y)
            if cfg.boundary_snap > 0:
                x[x < cfg.boundary_snap] = 0.0
                x = x / x.sum()
            states[k + 1] = x
    speeds[nsteps] = spd(x, f(x))
    times = np.arange(nsteps + 1) * h
    return Trajectory(times, states, speeds, scheme, notes)


def time_average(traj: Trajectory) -> np.ndarray:
    """Running average ``(1/t) int_0^t x(s) ds`` (trapezoid rule) at each time."""
    integral = cumulative_trapezoid(traj.states, traj.times, axis=0, initial=0.0)
    out = np.empty_like(traj.states)
    out[0] = traj.states[0]
    t = traj.times[1:, None]
    out[1:] = integral[1:] / t
    return out / out.sum(axis=1, keepdims=True)


def orbit_closure(traj: Trajectory, eps: float = 1e-3, t_min: float = 0.5) -> float | None:
    """First return time to within ``eps`` of the initial state after ``t_min``.

    The orbit must leave the ``eps``-ball before a return counts; an orbit
    that never leaves it closes at the first sample past ``t_min``.
    """
    d = np.linalg.norm(traj.states - traj.states[0], axis=1)
    late = traj.times > t_min
    left = np.flatnonzero(d > eps)
    if left.size == 0:
        idx = np.flatnonzero(late)
        return float(traj.times[idx[0]]) if idx.size else None
    back = np.flatnonzero((d < eps) & late & (np.arange(d.size) > left[0]))
    return float(traj.times[back[0]]) if back.size else None


def trailing_window(traj: Trajectory, fraction: float = 0.2, minimum: int = 100) -> slice:
    m = len(traj)
    k = max(int(np.ceil(fraction * m)), min(minimum, m))
    return slice(m - k, m)


def extinction_profile(traj: Trajectory, strategy: int, fraction: float = 0.2) -> float:
    """Minimum share of ``strategy`` over the trailing window."""
    return float(traj.states[trailing_window(traj, fraction), strategy].min())


def write_trajectory_csv(traj: Trajectory, path, monitors: dict[str, np.ndarray] | None = None) -> None:
    """CSV with ``t, x_1..x_n, speed, support_mask`` plus optional monitor columns.

    A monitor named like a base column (``speed``) is already there and is not repeated.
    """
    monitors = monitors or {}
    base = ["t"] + [f"x_{i + 1}" for i in range(traj.n)] + ["speed", "support_mask"]
    names = [c for c in monitors if c not in base]
    header = base + names
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for k in range(len(traj)):
            mask = "".join("1" if s else "0" for s in traj.states[k] > 0)
            row = [repr(float(traj.times[k]))] + [repr(float(v)) for v in traj.states[k]]
            row += [repr(float(traj.speeds[k])), mask]
            row += [repr(float(monitors[c][k])) for c in names]
            w.writerow(row)


def read_trajectory_csv(path) -> tuple[list[str], np.ndarray]:
    """Header and numeric columns (support mask dropped) of a trajectory CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    keep = [i for i, h in enumerate(header) if h != "support_mask"]
    data = np.array([[float(r[i]) for i in keep] for r in rows[1:]])
    return [header[i] for i in keep], data
