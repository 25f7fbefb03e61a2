"""Machine-readable audit report aggregating the analysis checks."""
from __future__ import annotations

import math

import numpy as np

from . import analysis
from .dynamics import (DynamicsSpec, mean_dynamics, normalized_field, riemannian_protocol, speed,
                       vector_field_hopkins)
from .errors import GeoflowError
from .games import classify_contractive, enumerate_nash, enumerate_restricted_equilibria
from .integrator import IntegratorConfig, Trajectory, integrate
from .rl_bridge import integrate_rl
from .simplex import SUPPORT_TOL, random_simplex_points

REPORT_SCHEMA_VERSION = 1
REST_TOL = 1e-9


def _clean(v):
    """JSON-safe copy: arrays to lists, non-finite floats to strings."""
    if isinstance(v, dict):
        return {str(k): _clean(a) for k, a in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(a) for a in v]
    if isinstance(v, np.ndarray):
        return _clean(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def _check(name, passed, margin, **details):
    return {"name": name, "pass": bool(passed), "margin": float(margin), "details": details}


def _interior_samples(rng, n, count):
    return random_simplex_points(rng, n, count, boundary_fraction=0.0)


def check_positive_correlation(spec, rng, samples=500):
    r = analysis.positive_correlation_audit(spec, samples, rng)
    margin = min(r.min_margin + 1e-8, r.min_correlation + 1e-9)
    return _check("positive_correlation", margin >= 0 and r.implication_holds, margin,
                  min_margin=r.min_margin, min_correlation=r.min_correlation,
                  implication_holds=r.implication_holds, samples=r.samples)


def check_rest_points(spec):
    game = spec.game
    re = enumerate_restricted_equilibria(game)
    nash = enumerate_nash(game)
    speeds = [speed(spec, x) for x in re.points]
    rest = [x for x, s in zip(re.points, speeds) if s < REST_TOL]
    details = {"restricted_equilibria": re.points, "nash": nash.points, "rest_points": rest,
               "speeds": speeds, "degenerate_supports": [list(S) for S in re.degenerate_supports]}
    if spec.regime == "continuous":
        worst = max(speeds) if speeds else 0.0
        return _check("rest_points_match_restricted", worst < REST_TOL, REST_TOL - worst, **details)
    rest_is_nash = [nash.contains(x) for x in rest]
    nash_speed = max((speed(spec, x) for x in nash.points), default=0.0)
    off = [s for x, s in zip(re.points, speeds) if not nash.contains(x)]
    margin = min(REST_TOL - nash_speed, (min(off) - REST_TOL) if off else np.inf)
    ok = all(rest_is_nash) and len(rest) == len(nash)
    return _check("rest_points_match_nash", ok, margin, **details)


def check_potential(spec, trajs):
    worst = 0.0
    for tr in trajs:
        f = spec.game.potential.values(tr.states)
        worst = max(worst, float(-np.diff(f).min(initial=0.0)))
    return _check("potential_monotone", worst < 1e-9, 1e-9 - worst, max_decrease=worst)


def _in_domain(x, x_star):
    return bool(np.all(x[x_star > SUPPORT_TOL] > 0))


def check_bregman(spec, trajs, x_star):
    hp = spec.metric.potential
    worst, used = 0.0, 0
    for tr in trajs:
        if not _in_domain(tr.states[0], x_star):
            continue
        used += 1
        D = analysis.monitor(tr, spec, "bregman_to", x_star).values
        inc = np.diff(D) - 1e-12 * np.maximum(1.0, D[:-1])
        inc = inc[np.isfinite(inc)]
        if inc.size:
            worst = max(worst, float(inc.max()))
    return _check("bregman_monotone", used > 0 and worst <= 0, 0.0 - worst, x_star=x_star,
                  runs=used, potential=hp.name)


def check_conservation(spec, trajs, x_star, tol=5e-4):
    drifts = []
    for tr in trajs:
        if not np.all(tr.states[0] > 0):
            continue
        drifts.append(analysis.monitor(tr, spec, "bregman_to", x_star).max_drift())
    drift = max(drifts) if drifts else np.inf
    return _check("conservation_drift", drift < tol, tol - drift, drift=drift, x_star=x_star, runs=len(drifts))


def check_protocols(spec, rng, samples=50, tol=1e-9):
    X = _interior_samples(rng, spec.n, samples)
    worst, kinds = 0.0, []
    for kind in ("payoff_attraction", "payoff_aversion", "pairwise_comparison"):
        try:
            proto = riemannian_protocol(spec.metric, kind)
            for x in X:
                ref = normalized_field(spec, x)
                gap = np.abs(mean_dynamics(proto, spec.game, x) - ref).max() / max(1.0, np.abs(ref).max())
                worst = max(worst, float(gap))
            kinds.append(kind)
        except (ValueError, GeoflowError):
            continue
    return _check("protocol_equivalence", worst < tol, tol - worst, residual=worst, protocols=kinds)


def check_hopkins(spec, rng, samples=50, tol=1e-8):
    X = _interior_samples(rng, spec.n, samples)
    worst = max(vector_field_hopkins(spec, x).deviation for x in X)
    return _check("hopkins_residual", worst < tol, tol - worst, residual=worst)


def check_rl(spec, trajs, scenario, tol=1e-4):
    start = next((tr.states[0] for tr in trajs if np.all(tr.states[0] > 0)), None)
    if start is None:
        return None
    t_end = min(scenario.t_end, 20.0)
    cfg = IntegratorConfig(step=scenario.step, t_end=t_end)
    _, induced = integrate_rl(spec.metric.potential, spec.game, x0=start, cfg=cfg)
    ref = integrate(DynamicsSpec(spec.game, spec.metric, "projected"), start, cfg)
    gap = float(np.abs(induced.states - ref.states).max())
    return _check("rl_equivalence", gap < tol, tol - gap, sup_gap=gap, start=start, t_end=t_end)


def build_report(scenario, spec: DynamicsSpec, trajs: list[Trajectory]) -> dict:
    rng = np.random.default_rng(scenario.seed)
    checks = [check_positive_correlation(spec, rng)]
    game, metric = spec.game, spec.metric
    nash = None
    if game.matrix is not None:
        checks.append(check_rest_points(spec))
        nash = enumerate_nash(game)
    if game.potential is not None:
        checks.append(check_potential(spec, trajs))

    x_star = None if scenario.x_star is None else np.array(scenario.x_star)
    if x_star is None and nash is not None and len(nash) == 1:
        x_star = nash.points[0]
    kind = classify_contractive(game, rng=rng).kind if game.matrix is not None else "none"
    if metric.potential is not None and x_star is not None:
        if kind in ("strictly_contractive", "contractive") or scenario.x_star is not None:
            checks.append(check_bregman(spec, trajs, x_star))
        if kind == "conservative" and np.all(x_star > 0):
            checks.append(check_conservation(spec, trajs, x_star))
    checks.append(check_protocols(spec, rng))
    checks.append(check_hopkins(spec, rng))
    if metric.potential is not None and metric.potential.steep:
        c = check_rl(spec, trajs, scenario)
        if c is not None:
            checks.append(c)

    summary = {}
    for c in checks:
        d = c["details"]
        for key in ("drift", "residual", "sup_gap"):
            if key in d:
                summary[c["name"]] = d[key]
                break
        else:
            summary[c["name"]] = c["pass"]
    return _clean({
        "schema_version": REPORT_SCHEMA_VERSION,
        "scenario_hash": scenario.digest(),
        "game": game.name,
        "metric": metric.descriptor,
        "game_class": kind,
        "checks": checks,
        "summary": summary,
    })
