import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from geoflow.errors import OutsideDomain, ZeroSalience
from geoflow.metrics import (FULL_RANK, MINIMAL_RANK, NEITHER, classify_extendability, custom_metric,
                             euclidean, inner, log_barrier, normal_vector, prep, separable_metric,
                             shahshahani, sharp, similarity)
from geoflow.simplex import random_simplex_points

from strategies import simplex_points

X = np.array([0.5, 0.25, 0.25])
EDGE = np.array([0.0, 0.5, 0.5])


def _wild(z):
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(z > 0, 1.0 / (1.0 + np.sin(1.0 / z) ** 2 / z), 0.0)


def test_sharp_examples():
    w = np.array([3.0, -1.0, 2.5])
    assert np.array_equal(sharp(euclidean(3), X, w), w)
    assert np.allclose(sharp(shahshahani(3), X, [4, 0, 8]), [2, 0, 2])
    assert np.allclose(sharp(shahshahani(3), EDGE, [7, 2, 2]), [0, 1, 1])


def test_normal_examples(rng):
    assert np.array_equal(normal_vector(euclidean(3), X), np.ones(3))
    for x in random_simplex_points(rng, 3, 5, boundary_fraction=0.4):
        assert np.allclose(normal_vector(shahshahani(3), x), x)
    assert np.allclose(normal_vector(prep(3, 2), X), [0.25, 1 / 16, 1 / 16])


def test_inner_examples():
    assert inner(euclidean(3), X, [1, -1, 0], [1, -1, 0]) == pytest.approx(2.0)
    assert inner(shahshahani(3), X, [0, 1, -1], [0, 1, -1]) == pytest.approx(8.0)
    with pytest.raises(OutsideDomain):
        inner(shahshahani(3), EDGE, [1, 0, -1], [1, 0, -1])


def test_separable_constructors():
    for z in (np.array([0.0, 0.2, 0.8]), X):
        assert np.array_equal(separable_metric(lambda t: t, 3).g_sharp(z), shahshahani(3).g_sharp(z))
        assert np.array_equal(separable_metric(lambda t: np.ones_like(t), 3).g_sharp(z),
                              euclidean(3).g_sharp(z))
        assert np.allclose(separable_metric(lambda t: t ** 3.5, 3).g_sharp(z), prep(3, 3.5).g_sharp(z))
        assert np.array_equal(prep(3, 1).g_sharp(z), shahshahani(3).g_sharp(z))
        assert np.array_equal(prep(3, 0).g_sharp(z), euclidean(3).g_sharp(z))
    assert separable_metric(lambda t: t, 3).extendability == MINIMAL_RANK
    assert separable_metric(lambda t: 1 + t, 3).extendability == FULL_RANK
    assert not prep(3, 0.5).lipschitz and prep(3, 0.5).extendability == MINIMAL_RANK


def test_similarity_examples():
    assert similarity(prep(3, 1.5), X, 0, 1) == 0.0
    assert similarity(prep(3, 1.5), X, 2, 2) == 1.0
    G = np.array([[4.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    assert similarity(custom_metric(lambda x: G, 3, FULL_RANK), X, 0, 1) == pytest.approx(1.0)
    with pytest.raises(ZeroSalience):
        similarity(shahshahani(3), EDGE, 0, 1)


def test_extendability_examples():
    assert classify_extendability(euclidean(3)) == FULL_RANK
    assert classify_extendability(shahshahani(3)) == MINIMAL_RANK
    assert classify_extendability(log_barrier(4)) == MINIMAL_RANK
    assert classify_extendability(prep(3, 0.1)) == MINIMAL_RANK
    assert classify_extendability(separable_metric(_wild, 3, vanishing_at_zero=True)) == NEITHER


@given(simplex_points(interior=True), st.data())
def test_sharp_inner_duality(x, data):
    n = x.size
    w = data.draw(arrays(np.float64, n, elements=st.floats(-2, 2)))
    om = data.draw(arrays(np.float64, n, elements=st.floats(-2, 2)))
    for g in (shahshahani(n), euclidean(n), prep(n, 2.5)):
        assert inner(g, x, sharp(g, x, om), w) == pytest.approx(om @ w, abs=1e-9)


@given(simplex_points(interior=True), st.data())
def test_duality_for_dense_metric(x, data):
    n = x.size
    B = data.draw(arrays(np.float64, (n, n), elements=st.floats(-1, 1)))
    G = B @ B.T + np.eye(n)
    g = custom_metric(lambda y: G, n, FULL_RANK)
    om = data.draw(arrays(np.float64, n, elements=st.floats(-2, 2)))
    w = data.draw(arrays(np.float64, n, elements=st.floats(-2, 2)))
    assert inner(g, x, sharp(g, x, om), w) == pytest.approx(om @ w, abs=1e-8)


@given(simplex_points(), st.data())
def test_normal_orthogonal_to_tangents(x, data):
    n = x.size
    on = x > 0
    z = np.where(on, data.draw(arrays(np.float64, n, elements=st.floats(-1, 1))), 0.0)
    z[on] -= z[on].mean()
    for g in (shahshahani(n), prep(n, 2), euclidean(n)):
        assert abs(inner(g, x, normal_vector(g, x), z)) < 1e-9


def test_inner_continuous_up_to_boundary(rng):
    g = shahshahani(3), prep(3, 2.0), prep(3, 0.5)
    for metric in g:
        for x in random_simplex_points(rng, 3, 10, boundary_fraction=1.0):
            on = x > 0
            if on.sum() < 2:
                x = np.array([0.0, 0.3, 0.7])
                on = x > 0
            w = np.where(on, rng.normal(size=3), 0.0)
            w2 = np.where(on, rng.normal(size=3), 0.0)
            here = inner(metric, x, w, w2)
            b = np.ones(3) / 3
            seq = [inner(metric, (1 - t) * x + t * b, w, w2) for t in np.logspace(-1, -6, 6)]
            gaps = np.abs(np.array(seq) - here) / max(1.0, abs(here))
            assert np.all(np.diff(gaps) <= 1e-12) and gaps[-1] < 1e-4
