"""Riemannian game dynamics: the vector field and its equivalent forms."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import NotInterior, SignViolation
from .games import PopulationGame, payoff
from .hessian import HessianPotential, choice_map
from .metrics import MINIMAL_RANK, MetricField, norm, normal_vector, sharp
from .numerics import pseudoinverse, zero_sum_projector
from .projection import project
from .simplex import SUPPORT_TOL

logger = logging.getLogger(__name__)

FORMS = ("projected", "coords", "normalized", "hopkins")


@dataclass(frozen=True, eq=False)
class DynamicsSpec:
    """A game paired with a metric; ``form`` selects the evaluation route."""

    game: PopulationGame
    metric: MetricField
    form: str = "projected"

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"form must be one of {FORMS}")
        if self.game.n != self.metric.n:
            raise ValueError("game and metric dimensions differ")

    @property
    def n(self) -> int:
        return self.game.n

    @property
    def regime(self) -> str:
        return self.metric.regime

    def field(self, x) -> np.ndarray:
        return vector_field(self, x)


def _on_fast_path(g: MetricField, x: np.ndarray) -> bool:
    return g.extendability == MINIMAL_RANK or bool(np.all(x > SUPPORT_TOL))


def vector_field(spec: DynamicsSpec, x) -> np.ndarray:
    """``V(x)``: tangent projection of the sharp of the payoff covector.

    Interior and minimal-rank states use the normal-vector formula; boundary
    states of full-rank metrics go through the cone projection.
    """
    x = np.asarray(x, dtype=float)
    v = payoff(spec.game, x)
    g = spec.metric
    if spec.form == "hopkins":
        return vector_field_hopkins(spec, x).vector
    if spec.form in ("coords", "normalized"):
        if not _on_fast_path(g, x):
            raise NotInterior(f"{spec.form} form is undefined at full-rank boundary states")
        G = g.g_sharp(x)
        nvec = G.sum(axis=1)
        if spec.form == "coords":
            return (G - np.outer(nvec, nvec) / nvec.sum()) @ v
        vs = G @ v
        return vs * nvec.sum() - nvec * vs.sum()
    if _on_fast_path(g, x):
        if g.weight is not None:
            d = g.weights(x)
            dv = d * v
            return dv - (dv.sum() / d.sum()) * d
        vs = sharp(g, x, v)
        nvec = normal_vector(g, x)
        out = vs - (vs.sum() / nvec.sum()) * nvec
        out[x <= SUPPORT_TOL] = 0.0
        return out
    return project(g, x, sharp(g, x, v)).vector


def normalized_field(spec: DynamicsSpec, x) -> np.ndarray:
    """Speed-rescaled form ``v# * sum(n) - n * sum(v#)``."""
    return vector_field(DynamicsSpec(spec.game, spec.metric, "normalized"), x)


def speed(spec: DynamicsSpec, x, V=None) -> float:
    """Metric norm of the velocity at ``x``."""
    x = np.asarray(x, dtype=float)
    V = vector_field(spec, x) if V is None else V
    return norm(spec.metric, x, V, tol=1e-8)


class HopkinsResult(NamedTuple):
    vector: np.ndarray
    deviation: float  # max gap among closed form, pseudoinverse and projected routes


def hopkins_matrix(g_sharp: np.ndarray) -> np.ndarray:
    """Closed form of ``(Phi H Phi)^+`` with ``H^-1 = g_sharp``."""
    nvec = g_sharp.sum(axis=1)
    return g_sharp - np.outer(nvec, nvec) / nvec.sum()


def vector_field_hopkins(spec: DynamicsSpec, x) -> HopkinsResult:
    """Interior field as ``(Phi g(x) Phi)^+ v(x)``, cross-checked three ways."""
    x = np.asarray(x, dtype=float)
    if not np.all(x > SUPPORT_TOL):
        raise NotInterior("the matrix form holds on the interior only")
    Gs = spec.metric.g_sharp(x)
    H = np.linalg.inv(Gs)
    Phi = zero_sum_projector(spec.n)
    M_num = pseudoinverse(Phi @ H @ Phi)
    M_closed = hopkins_matrix(Gs)
    v = payoff(spec.game, x)
    V = M_num @ v
    V_proj = vector_field(DynamicsSpec(spec.game, spec.metric, "projected"), x)
    dev = max(np.abs(M_num - M_closed).max(), np.abs(V - V_proj).max(),
              np.abs(M_closed @ v - V_proj).max())
    return HopkinsResult(V, float(dev))


# -- revision protocols --------------------------------------------------------------

PROTOCOL_KINDS = ("payoff_attraction", "payoff_aversion", "pairwise_comparison")


@dataclass(frozen=True, eq=False)
class RevisionProtocol:
    """Switch rates ``s[a, b]`` from strategy a to strategy b."""

    kind: str
    switch_rate: Callable[[np.ndarray, np.ndarray], np.ndarray]
    payoff_sign: str | None = None  # "nonnegative" | "nonpositive" | None


def riemannian_protocol(metric: MetricField, kind: str) -> RevisionProtocol:
    """Protocols whose mean dynamics are the normalized Riemannian dynamics.

    payoff_attraction: ``s_ab = n_a (pi g#)_b`` (payoffs >= 0);
    payoff_aversion: ``s_ab = -(pi g#)_a n_b`` (payoffs <= 0);
    pairwise_comparison: ``s_ab = g#_aa g#_bb [pi_b - pi_a]_+`` (diagonal g#).
    """
    if kind == "payoff_attraction":
        def rate(x, pi):
            G = metric.g_sharp(x)
            return np.outer(G.sum(axis=1), pi @ G)
        return RevisionProtocol(kind, rate, "nonnegative")
    if kind == "payoff_aversion":
        def rate(x, pi):
            G = metric.g_sharp(x)
            return -np.outer(pi @ G, G.sum(axis=1))
        return RevisionProtocol(kind, rate, "nonpositive")
    if kind == "pairwise_comparison":
        def rate(x, pi):
            G = metric.g_sharp(x)
            if np.abs(G - np.diag(np.diag(G))).max() > 0:
                raise ValueError("pairwise comparison protocol needs a diagonal metric")
            d = np.diag(G)
            return np.outer(d, d) * np.maximum(pi[None, :] - pi[:, None], 0.0)
        return RevisionProtocol(kind, rate, None)
    raise ValueError(f"unknown protocol kind {kind!r}")


def payoff_shift(protocol: RevisionProtocol, game: PopulationGame, v: np.ndarray) -> float:
    """Constant to add to payoffs so the protocol's sign condition holds."""
    if protocol.payoff_sign is None:
        return 0.0
    lo, hi = (game.matrix.min(), game.matrix.max()) if game.matrix is not None else (v.min(), v.max())
    if protocol.payoff_sign == "nonnegative":
        return float(max(0.0, -lo))
    return float(min(0.0, -hi))


def mean_dynamics(protocol: RevisionProtocol, game: PopulationGame, x, auto_shift: bool = True) -> np.ndarray:
    """Inflow minus outflow: ``xdot_a = sum_b s_ba - s_ab``."""
    x = np.asarray(x, dtype=float)
    pi = payoff(game, x)
    if auto_shift:
        a = payoff_shift(protocol, game, pi)
        if a:
            logger.debug("shifting payoffs of %s by %g for %s", game.name, a, protocol.kind)
            pi = pi + a
    if protocol.payoff_sign == "nonnegative" and pi.min() < 0:
        raise SignViolation("protocol needs nonnegative payoffs")
    if protocol.payoff_sign == "nonpositive" and pi.max() > 0:
        raise SignViolation("protocol needs nonpositive payoffs")
    S = protocol.switch_rate(x, pi)
    return S.sum(axis=0) - S.sum(axis=1)


def payoff_transform_check(spec: DynamicsSpec, x, a: float, b: float) -> float:
    """Metric-norm gap between the field of ``a + b v`` and ``b`` times the field of v."""
    if b <= 0:
        raise ValueError("b must be positive")
    x = np.asarray(x, dtype=float)
    base = spec.game
    shifted = PopulationGame(n=base.n, payoff_fn=lambda y: a + b * payoff(base, y),
                             name=f"{base.name}-affine")
    V0 = vector_field(spec, x)
    V1 = vector_field(DynamicsSpec(shifted, spec.metric, spec.form), x)
    return norm(spec.metric, x, V1 - b * V0, tol=1e-8)


def rl_field(hp: HessianPotential, game: PopulationGame, y) -> tuple[np.ndarray, np.ndarray]:
    """Score dynamics ``ydot = v(Q(y))``; returns ``(ydot, x)``."""
    x = choice_map(hp, y)
    return payoff(game, x), x
