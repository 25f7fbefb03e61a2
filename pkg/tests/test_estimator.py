import numpy as np
import pytest
from sklearn.base import clone

from geoflow.estimator import GameFlow, check_simplex_array

X0 = np.array([[0.5, 0.25, 0.25], [0.2, 0.3, 0.5]])


def test_fit_predict_transform():
    est = GameFlow(game="coordination", metric="replicator", t_end=20, step=1e-2).fit(X0)
    assert est.n_features_in_ == 3
    assert est.terminal_states_.shape == (2, 3)
    # coordination from a start favouring strategy 1 goes to e1
    np.testing.assert_allclose(est.terminal_states_[0], [1, 0, 0], atol=1e-3)
    np.testing.assert_allclose(est.predict(X0), est.terminal_states_)
    V = est.transform(X0)
    np.testing.assert_allclose(V.sum(axis=1), 0, atol=1e-14)


def test_time_average_of_rps_orbit():
    est = GameFlow(t_end=60, step=1e-2).fit(X0[:1])
    np.testing.assert_allclose(est.time_averages_[0], [1 / 3] * 3, atol=0.02)


def test_clone_and_params():
    est = GameFlow(metric="prep:2", step=0.05)
    c = clone(est)
    assert c.get_params() == est.get_params()
    c.set_params(metric="projection")
    assert est.metric == "prep:2"


def test_unfitted_and_bad_input():
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        GameFlow().transform(X0)
    with pytest.raises(ValueError):
        check_simplex_array([[0.5, 0.6, -0.1]])
    with pytest.raises(ValueError):
        check_simplex_array([[0.5, 0.6, 0.1]])
    np.testing.assert_array_equal(check_simplex_array([[1e-15, 0.5, 0.5]]), [[0, 0.5, 0.5]])
