import numpy as np
import pytest

from geoflow import games
from geoflow.dynamics import DynamicsSpec
from geoflow.games import PopulationGame
from geoflow.integrator import (IntegratorConfig, Trajectory, extinction_profile, integrate, orbit_closure,
                                read_trajectory_csv, time_average, write_trajectory_csv)
from geoflow.metrics import euclidean, log_barrier, prep, shahshahani

B3 = np.ones(3) / 3


def logistic(t, a=0.5):
    return a / (a + (1 - a) * np.exp(-t))


def piecewise(t):
    return np.minimum(t / 2, 1.0)


def black_box(game):
    """Same game without the matrix tag, forcing the generic integration path."""
    return PopulationGame(n=game.n, payoff_fn=game.payoff_fn, name=game.name + "-bb")


def test_toy_replicator():
    tr = integrate(DynamicsSpec(games.toy_game(), shahshahani(2)), [0.5, 0.5], IntegratorConfig(t_end=10))
    i = int(np.argmin(np.abs(tr.times - 1.0)))
    assert tr.states[i, 0] == pytest.approx(1 / (1 + np.exp(-1)), abs=1e-6)
    assert np.abs(tr.states[:, 0] - logistic(tr.times)).max() < 1e-6


def test_toy_projection():
    tr = integrate(DynamicsSpec(games.toy_game(), euclidean(2)), [0.0, 1.0], IntegratorConfig(t_end=10))
    assert tr.scheme == "euler_projected"
    assert np.abs(tr.states[:, 0] - piecewise(tr.times)).max() < 1e-3


def test_rest_point_is_constant():
    tr = integrate(DynamicsSpec(games.rps(), shahshahani(3)), B3, IntegratorConfig(t_end=5))
    assert np.abs(tr.states - B3).max() < 1e-15
    assert orbit_closure(tr) == pytest.approx(0.501, abs=1e-9)


def test_mass_and_support_invariance(rng):
    spec = DynamicsSpec(games.rps_dominated(), log_barrier(4))
    for x0 in ([0.2, 0.3, 0.0, 0.5], rng.dirichlet(np.ones(4))):
        tr = integrate(spec, x0, IntegratorConfig(step=1e-2, t_end=20))
        assert np.abs(tr.states.sum(axis=1) - 1).max() < 1e-10
        assert tr.support_changes() == 0
        assert np.all(tr.supports == (np.asarray(x0) > 0))


def test_rk4_order():
    spec = DynamicsSpec(games.toy_game(), shahshahani(2))
    errs = []
    for h in (0.2, 0.1):
        tr = integrate(spec, [0.5, 0.5], IntegratorConfig(step=h, t_end=4))
        errs.append(abs(tr.states[-1, 0] - logistic(4.0)))
    ratio = errs[0] / errs[1]
    assert 8 <= ratio <= 32


def test_discontinuous_runs_merge():
    spec = DynamicsSpec(games.toy_game(), euclidean(2))
    cfg = IntegratorConfig(step=1e-3, t_end=5)
    a = integrate(spec, [0.0, 1.0], cfg)
    b = integrate(spec, [0.5, 0.5], cfg)
    late = a.times > 2.0
    assert np.abs(a.states[late] - b.states[late]).max() <= 2 * cfg.step
    assert a.support_changes() == 2


@pytest.mark.parametrize("metric,x0", [(shahshahani(3), [0.5, 0.25, 0.25]), (prep(3, 2.5), [0.6, 0.3, 0.1]),
                                       (euclidean(3), [0.0, 0.3, 0.7]), (euclidean(3), [0.5, 0.25, 0.25])])
def test_compiled_path_matches_generic(metric, x0):
    cfg = IntegratorConfig(step=1e-2, t_end=15)
    fast = integrate(DynamicsSpec(games.rps(), metric), x0, cfg)
    slow = integrate(DynamicsSpec(black_box(games.rps()), metric), x0, cfg)
    assert np.abs(fast.states - slow.states).max() < 1e-12
    assert np.allclose(fast.speeds, slow.speeds, rtol=1e-10, atol=1e-14)
    assert fast.support_changes() == slow.support_changes()


def test_time_average_examples():
    const = Trajectory(np.linspace(0, 1, 11), np.tile([0.2, 0.8], (11, 1)), np.zeros(11))
    assert np.allclose(time_average(const), [0.2, 0.8])
    two = Trajectory(np.array([0.0, 1.0]), np.eye(2), np.zeros(2))
    assert np.allclose(time_average(two)[-1], [0.5, 0.5])


def test_replicator_time_average():
    tr = integrate(DynamicsSpec(games.rps(), shahshahani(3)), [0.5, 0.25, 0.25], IntegratorConfig(step=1e-2, t_end=500))
    assert np.abs(time_average(tr)[-1] - B3).max() < 1e-2


def test_orbit_closure_examples():
    rps = integrate(DynamicsSpec(games.rps(), shahshahani(3)), [0.5, 0.25, 0.25], IntegratorConfig(t_end=50))
    assert orbit_closure(rps, eps=1e-3) is not None
    coord = integrate(DynamicsSpec(games.coordination(3), shahshahani(3)), [0.5, 0.3, 0.2],
                      IntegratorConfig(t_end=50, step=1e-2))
    assert orbit_closure(coord, eps=1e-3) is None


def test_extinction_examples():
    cfg = IntegratorConfig(step=1e-2, t_end=200)
    const = integrate(DynamicsSpec(games.rps(), shahshahani(3)), B3, cfg)
    assert extinction_profile(const, 1) == pytest.approx(1 / 3)
    dom = integrate(DynamicsSpec(games.rps_dominated(), shahshahani(4)), np.ones(4) / 4, cfg)
    assert extinction_profile(dom, 3) < 1e-3
    rps = integrate(DynamicsSpec(games.rps(), shahshahani(3)), [0.5, 0.25, 0.25], cfg)
    assert all(extinction_profile(rps, a) > 0.01 for a in range(3))


def test_non_lipschitz_boundary_start_warns():
    with pytest.warns(RuntimeWarning):
        tr = integrate(DynamicsSpec(games.toy_game(), prep(2, 0.5)), [0.0, 1.0], IntegratorConfig(t_end=1))
    assert tr.warnings and np.all(tr.states[:, 0] == 0.0)


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(step=2.0, t_end=1.0)
    with pytest.raises(ValueError):
        IntegratorConfig(scheme="leapfrog")


def test_csv_round_trip(tmp_path):
    tr = integrate(DynamicsSpec(games.toy_game(), euclidean(2)), [0.0, 1.0], IntegratorConfig(step=0.1, t_end=3))
    path = tmp_path / "t.csv"
    write_trajectory_csv(tr, path, {"f": tr.states[:, 0]})
    raw = path.read_bytes()
    assert raw.startswith(b"t,x_1,x_2,speed,support_mask,f\r\n")
    header, data = read_trajectory_csv(path)
    assert header == ["t", "x_1", "x_2", "speed", "f"]
    assert np.array_equal(data[:, 1:3], tr.states)
    assert raw.split(b"\r\n")[1].endswith(b",01,0.0")
