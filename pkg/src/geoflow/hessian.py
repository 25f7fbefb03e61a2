"""Separable Hessian potentials, Bregman divergences and choice maps."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq
from scipy.special import xlogy

from .errors import NonSteep, OutsideDomain
from .numerics import finite_diff_jacobian
from .simplex import SUPPORT_TOL


@dataclass(frozen=True, eq=False)
class HessianPotential:
    """Separable potential ``h(x) = sum_a theta(x_a)`` on the orthant.

    ``dtheta_inv`` inverts ``theta'`` on its range and returns 0 (nonsteep
    case) or ``inf`` outside it; ``theta`` may be infinite at 0.
    """

    theta: Callable[[np.ndarray], np.ndarray]
    dtheta: Callable[[np.ndarray], np.ndarray]
    d2theta: Callable[[np.ndarray], np.ndarray]
    dtheta_inv: Callable[[np.ndarray], np.ndarray]
    steep: bool
    p: float | None = None
    name: str = "custom"

    @property
    def finite_at_boundary(self) -> bool:
        with np.errstate(divide="ignore"):
            return bool(np.isfinite(self.theta(np.array([0.0])))[0])

    def value(self, x) -> float:
        with np.errstate(divide="ignore"):
            return float(np.sum(self.theta(np.asarray(x, dtype=float))))

    def grad(self, x) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return self.dtheta(np.asarray(x, dtype=float))

    def hess(self, x) -> np.ndarray:
        return np.diag(self.d2theta(np.asarray(x, dtype=float)))

    def metric(self, n: int):
        """The Hessian metric ``g = Hess h`` as a metric field."""
        from .metrics import WeightFunction, separable_metric

        def phi(x):
            with np.errstate(divide="ignore"):
                return 1.0 / self.d2theta(x)

        with np.errstate(divide="ignore"):
            vanishing = float(1.0 / self.d2theta(np.array([0.0]))[0]) == 0.0
        return separable_metric(WeightFunction(phi, vanishing), n, descriptor="hessian",
                                p=self.p, potential=self,
                                lipschitz=not (self.p is not None and 0 < self.p < 1))


def potential_p(p: float) -> HessianPotential:
    """Potential of the p-replicator dynamics (``theta'' = z**-p``).

    p=0 quadratic, p=1 entropy ``z log z``, p=2 ``-log z``, otherwise
    ``z**(2-p) / ((p-1)(p-2))``.
    """
    p = float(p)
    if p < 0:
        raise ValueError("p must be nonnegative")

    if p == 1.0:
        def theta(z):
            return xlogy(z, z)

        def dtheta(z):
            return np.log(z) + 1.0

        def dtheta_inv(u):
            return np.exp(np.asarray(u, dtype=float) - 1.0)
        name = "entropy"
    elif p == 2.0:
        def theta(z):
            return -np.log(z)

        def dtheta(z):
            return -1.0 / z

        def dtheta_inv(u):
            u = np.asarray(u, dtype=float)
            with np.errstate(divide="ignore"):
                return np.where(u < 0, -1.0 / np.minimum(u, -1e-300), np.inf)
        name = "log"
    elif p == 0.0:
        def theta(z):
            return 0.5 * z * z

        def dtheta(z):
            return np.asarray(z, dtype=float)

        def dtheta_inv(u):
            return np.maximum(np.asarray(u, dtype=float), 0.0)
        name = "quadratic"
    else:
        c = 1.0 / ((p - 1.0) * (p - 2.0))

        def theta(z):
            with np.errstate(divide="ignore"):
                return c * np.power(z, 2.0 - p)

        def dtheta(z):
            with np.errstate(divide="ignore"):
                return -np.power(z, 1.0 - p) / (p - 1.0)

        if p > 1.0:
            def dtheta_inv(u):
                u = np.asarray(u, dtype=float)
                with np.errstate(divide="ignore", invalid="ignore"):
                    return np.where(u < 0, np.power((p - 1.0) * -np.minimum(u, -1e-300),
                                                    -1.0 / (p - 1.0)), np.inf)
        else:
            def dtheta_inv(u):
                u = np.asarray(u, dtype=float)
                return np.power((1.0 - p) * np.maximum(u, 0.0), 1.0 / (1.0 - p))
        name = "power"

    def d2theta(z):
        with np.errstate(divide="ignore"):
            return np.power(np.asarray(z, dtype=float), -p) if p else np.ones_like(z, dtype=float)

    return HessianPotential(theta, dtheta, d2theta, dtheta_inv, steep=p >= 1.0, p=p, name=name)


def entropy() -> HessianPotential:
    return potential_p(1.0)


# -- Bregman divergence -------------------------------------------------------------

def _bregman_terms(hp: HessianPotential, x_star, x):
    """Index mask of summed terms; infinite-at-boundary potentials only sum
    over the support of the base point."""
    if hp.finite_at_boundary:
        return np.ones(len(x_star), dtype=bool)
    return x_star > SUPPORT_TOL


def bregman(hp: HessianPotential, x_star, x) -> float:
    """``h(x*) - h(x) - h'(x; x* - x)``; ``inf`` off the domain of ``x*``."""
    x_star = np.asarray(x_star, dtype=float)
    x = np.asarray(x, dtype=float)
    on_star = x_star > SUPPORT_TOL
    on_x = x > SUPPORT_TOL
    if hp.steep and np.any(on_star & ~on_x):
        return float("inf")
    terms = _bregman_terms(hp, x_star, x)
    xs, xx = x_star[terms], x[terms]
    with np.errstate(divide="ignore", invalid="ignore"):
        th_s = hp.theta(xs)
        th_x = hp.theta(xx)
        d = hp.dtheta(xx)
        lin = np.where(xs - xx == 0.0, 0.0, d * (xs - xx))
        # the one-sided derivative at 0 is finite for the coordinates kept here
        val = np.where(xs == xx, 0.0, th_s - th_x - lin)
    out = float(np.sum(val))
    if not np.isfinite(out):
        return float("inf")
    return max(out, 0.0)


def bregman_series(hp: HessianPotential, x_star, X) -> np.ndarray:
    """Row-wise :func:`bregman` over an array of states."""
    x_star = np.asarray(x_star, dtype=float)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    terms = _bregman_terms(hp, x_star, x_star)
    xs, XX = x_star[terms], X[:, terms]
    with np.errstate(divide="ignore", invalid="ignore"):
        th_s = hp.theta(xs)
        lin = np.where(xs - XX == 0.0, 0.0, hp.dtheta(XX) * (xs - XX))
        val = np.where(xs == XX, 0.0, th_s - hp.theta(XX) - lin)
    out = val.sum(axis=1)
    out[~np.isfinite(out)] = np.inf
    if hp.steep:
        on_star = x_star > SUPPORT_TOL
        out[np.any(on_star & (X <= SUPPORT_TOL), axis=1)] = np.inf
    return np.maximum(out, 0.0)


def bregman_rate(hp: HessianPotential, x_star, x, xdot) -> float:
    """Time derivative of ``bregman(hp, x_star, x(t))`` along ``xdot``:
    ``<xdot, x - x*>_x`` under ``g = Hess h``."""
    x_star = np.asarray(x_star, dtype=float)
    x = np.asarray(x, dtype=float)
    xdot = np.asarray(xdot, dtype=float)
    on = x > SUPPORT_TOL
    if hp.steep and np.any(np.abs(xdot[~on]) > 1e-10):
        raise OutsideDomain("velocity leaves the face of the current state")
    if hp.steep and np.any((x_star > SUPPORT_TOL) & ~on):
        raise OutsideDomain("state is outside the domain of the base point")
    m = on & _bregman_terms(hp, x_star, x)
    return float(np.sum(hp.d2theta(x[m]) * xdot[m] * (x[m] - x_star[m])))


def kl_divergence(x_star, x) -> float:
    x_star = np.asarray(x_star, dtype=float)
    x = np.asarray(x, dtype=float)
    on = x_star > 0
    if np.any(x[on] <= 0):
        return float("inf")
    return float(np.sum(x_star[on] * np.log(x_star[on] / x[on])))


# -- conjugates and choice maps -------------------------------------------------------

def _multiplier(hp: HessianPotential, y: np.ndarray) -> float:
    n = y.size
    top = y.max()
    lo = top - float(hp.dtheta(np.array([1.0]))[0])
    hi = top - float(hp.dtheta(np.array([1.0 / n]))[0])

    def excess(lam):
        return float(np.sum(hp.dtheta_inv(y - lam))) - 1.0

    if excess(hi) == 0.0:
        return hi
    return brentq(excess, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def choice_map(hp: HessianPotential, y, allow_nonsteep: bool = False) -> np.ndarray:
    """Maximizer of ``<y, x> - h(x)`` over the simplex.

    Closed-form logit for the entropy; otherwise the multiplier of the mass
    constraint is found by root bracketing.
    """
    y = np.asarray(y, dtype=float)
    if not hp.steep and not allow_nonsteep:
        raise NonSteep("choice map of a nonsteep potential may sit on the boundary")
    if hp.p == 1.0:
        e = np.exp(y - y.max())
        return e / e.sum()
    lam = _multiplier(hp, y)
    x = hp.dtheta_inv(y - lam)
    return x / x.sum()


def conjugate_value(hp: HessianPotential, y, allow_nonsteep: bool = False) -> float:
    """``max_x <y, x> - h(x)`` over the simplex."""
    y = np.asarray(y, dtype=float)
    x = choice_map(hp, y, allow_nonsteep=allow_nonsteep)
    return float(y @ x - hp.value(x))


def orthant_choice(hp: HessianPotential, y) -> np.ndarray:
    """Gradient of the conjugate of ``h`` over the whole positive orthant."""
    return hp.dtheta_inv(np.asarray(y, dtype=float))


def legendre_hessian_check(hp: HessianPotential, y, h: float = 1e-5) -> float:
    """Frobenius gap between a finite-difference ``Hess h*(y)`` and
    ``(Hess h)^-1`` at ``Q(y)``, on the full orthant."""
    if not hp.steep:
        raise NonSteep("Legendre duality on the orthant needs a steep potential")
    y = np.asarray(y, dtype=float)
    q = orthant_choice(hp, y)
    if not np.all(np.isfinite(q)):
        raise OutsideDomain("score outside the domain of the orthant conjugate")
    fd = finite_diff_jacobian(lambda u: orthant_choice(hp, u), y, h)
    return float(np.linalg.norm(fd - np.linalg.inv(hp.hess(q))))


def steepness_profile(hp: HessianPotential, offsets=None) -> np.ndarray:
    """``|theta'(z)|`` along boundary offsets ``z = 1e-1 ... 1e-8``."""
    z = np.logspace(-1, -8, 8) if offsets is None else np.asarray(offsets, dtype=float)
    return np.abs(hp.dtheta(z))


def looks_steep(hp: HessianPotential) -> bool:
    prof = steepness_profile(hp)
    return bool(prof[-1] > 10 * prof[0] and np.all(np.diff(prof) > 0))
