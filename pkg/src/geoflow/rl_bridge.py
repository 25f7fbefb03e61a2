"""Score-space reinforcement learning and its link to Hessian dynamics."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import NonSteep
from .games import PopulationGame, dominated_pairs, payoff
from .hessian import HessianPotential, choice_map
from .integrator import IntegratorConfig, Trajectory, trailing_window
from .simplex import as_simplex_point


@dataclass
class ScoreTrajectory:
    times: np.ndarray
    scores: np.ndarray  # y(t), shape (steps + 1, n)
    states: np.ndarray  # Q(y(t))

    def __len__(self):
        return self.times.size

    def to_csv(self, path) -> None:
        write_rl_csv(self, path)


def _hessian_speed(hp: HessianPotential, v: np.ndarray, x: np.ndarray) -> float:
    w = 1.0 / hp.d2theta(x)
    lam = (w @ v) / w.sum()
    return float(np.sqrt(np.sum(w * (v - lam) ** 2)))


def integrate_rl(hp: HessianPotential, game: PopulationGame, y0=None, cfg: IntegratorConfig | None = None,
                 x0=None) -> tuple[ScoreTrajectory, Trajectory]:
    """RK4 on ``ydot = v(Q(y))``.

    ``y0`` defaults to ``dh(x0)`` so the run starts from the same mixed state
    as the matching Hessian flow.
    """
    if not hp.steep:
        raise NonSteep("score dynamics are only integrated for steep potentials")
    cfg = IntegratorConfig() if cfg is None else cfg
    if y0 is None:
        if x0 is None:
            raise ValueError("give y0 or x0")
        y = hp.grad(as_simplex_point(x0))
    else:
        y = np.array(y0, dtype=float)
    if y.shape != (game.n,):
        raise ValueError("score vector has the wrong dimension")

    def f(y):
        return payoff(game, choice_map(hp, y))

    h = cfg.step
    steps = int(round(cfg.t_end / h))
    Y = np.empty((steps + 1, game.n))
    Y[0] = y
    for k in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        Y[k + 1] = y
    X = np.array([choice_map(hp, yk) for yk in Y])
    t = np.arange(steps + 1) * h
    speeds = np.array([_hessian_speed(hp, payoff(game, x), x) for x in X])
    return ScoreTrajectory(t, Y, X), Trajectory(t, X, speeds, scheme="rl_rk4")


def rl_dominated_extinction(hp: HessianPotential, game: PopulationGame, y0=None, t_end: float = 300.0,
                            step: float = 1e-2) -> float:
    """Largest trailing-window share of a strictly dominated strategy under RL."""
    pairs = dominated_pairs(game)
    if not pairs:
        raise ValueError("game has no strictly dominated strategy")
    y0 = np.zeros(game.n) if y0 is None else y0
    _, traj = integrate_rl(hp, game, y0, IntegratorConfig(step=step, t_end=t_end))
    w = traj.states[trailing_window(traj)]
    return float(max(w[:, p].max() for p, _ in pairs))


def write_rl_csv(st: ScoreTrajectory, path) -> None:
    n = st.scores.shape[1]
    header = ["t"] + [f"y_{i + 1}" for i in range(n)] + [f"x_{i + 1}" for i in range(n)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for t, y, x in zip(st.times, st.scores, st.states):
            w.writerow([repr(float(t))] + [repr(float(a)) for a in y] + [repr(float(a)) for a in x])
