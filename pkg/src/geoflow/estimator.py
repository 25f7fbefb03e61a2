"""Estimator-style facade: initial states in, flows and end states out.

``fit`` integrates the dynamics from each row of ``X``; ``transform`` gives
the velocity field at the rows of ``X``; ``predict`` gives the state reached
after ``t_end``. Parameters follow the usual ``get_params``/``set_params``
conventions so the object can sit in a pipeline or a parameter sweep.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .dynamics import DynamicsSpec, vector_field
from .errors import DimensionMismatch
from .integrator import IntegratorConfig, integrate, time_average
from .scenario import GameSpec, MetricSpec
from .simplex import SUPPORT_TOL


def check_simplex_array(X, n: int | None = None, tol: float = 1e-9) -> np.ndarray:
    """Validate a 2-d array of simplex points; rows are snapped and renormalized."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if n is not None and X.shape[1] != n:
        raise DimensionMismatch(f"expected {n} strategies, got {X.shape[1]}")
    if X.min() < -tol or np.abs(X.sum(axis=1) - 1.0).max() > tol:
        raise ValueError("rows must be nonnegative and sum to 1")
    X = np.where(X <= SUPPORT_TOL, 0.0, X)
    return X / X.sum(axis=1, keepdims=True)


class GameFlow(TransformerMixin, BaseEstimator):
    """Riemannian game dynamics as an estimator.

    Parameters
    ----------
    game : str or dict
        Builtin game name or ``{"matrix": [[...]]}``.
    metric : str or dict
        ``"replicator"``, ``"projection"``, ``"logbarrier"``, ``"prep:<p>"`` or a metric object.
    form : str
        Field representation (``projected``, ``coords``, ``normalized``, ``hopkins``).
    step, t_end, scheme :
        Integrator settings.
    """

    def __init__(self, game="rps", metric="replicator", form="projected", step=1e-3, t_end=10.0,
                 scheme="auto"):
        self.game = game
        self.metric = metric
        self.form = form
        self.step = step
        self.t_end = t_end
        self.scheme = scheme

    def _spec(self) -> DynamicsSpec:
        g = GameSpec.parse(self.game).build()
        return DynamicsSpec(g, MetricSpec.parse(self.metric).build(g.n), self.form)

    def _cfg(self) -> IntegratorConfig:
        return IntegratorConfig(scheme=self.scheme, step=self.step, t_end=self.t_end)

    def fit(self, X, y=None):
        spec = self._spec()
        X = check_simplex_array(X, spec.n)
        self.spec_ = spec
        self.n_features_in_ = spec.n
        self.trajectories_ = [integrate(spec, x, self._cfg()) for x in X]
        self.terminal_states_ = np.array([t.states[-1] for t in self.trajectories_])
        self.time_averages_ = np.array([time_average(t)[-1] for t in self.trajectories_])
        return self

    def transform(self, X):
        check_is_fitted(self, "spec_")
        X = check_simplex_array(X, self.n_features_in_)
        return np.array([vector_field(self.spec_, x) for x in X])

    def predict(self, X):
        check_is_fitted(self, "spec_")
        X = check_simplex_array(X, self.n_features_in_)
        return np.array([integrate(self.spec_, x, self._cfg()).states[-1] for x in X])
