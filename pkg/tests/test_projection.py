import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from geoflow.errors import DimensionalityLimit, OutsideDomain
from geoflow.metrics import constant_metric, euclidean, inner, norm, normal_vector, prep, shahshahani
from geoflow.projection import project, project_cone, project_interior
from geoflow.simplex import in_tangent_cone, in_tangent_space, random_simplex_points, vertex

from oracles import euclid_cone_max_average, kkt_cone_projection, random_spd, slsqp_cone_projection
from strategies import simplex_points

X = np.array([0.5, 0.25, 0.25])
EDGE = np.array([0.0, 0.5, 0.5])


def test_interior_examples():
    assert np.allclose(project_interior(euclidean(3), X, [1, 0, 0]).vector, [2 / 3, -1 / 3, -1 / 3])
    w = np.array([0, 1 / 16, -1 / 16])
    assert np.allclose(project_interior(shahshahani(3), X, w).vector, w)
    for g in (euclidean(3), shahshahani(3), prep(3, 2.5)):
        assert np.allclose(project_interior(g, X, normal_vector(g, X)).vector, 0.0, atol=1e-15)


def test_interior_rejects_off_support_mass():
    with pytest.raises(OutsideDomain):
        project_interior(shahshahani(3), EDGE, [1.0, 0.0, -1.0])


def test_cone_examples():
    r = project_cone(euclidean(3), EDGE, np.array([3.0, 1.0, 0.0]))
    assert np.allclose(r.vector, [5 / 3, -1 / 3, -4 / 3])
    assert r.active_support == (0, 1, 2)
    r = project_cone(euclidean(3), EDGE, np.array([-3.0, 1.0, 0.0]))
    assert np.allclose(r.vector, [0, 0.5, -0.5])
    assert r.active_support == (1, 2)
    z = np.array([0.2, 0.3, -0.5])
    assert np.allclose(project_cone(euclidean(3), EDGE, z).vector, z)


def test_dispatch_examples():
    w = np.array([0.3, -1.0, 2.0])
    assert np.array_equal(project(prep(3, 1.5), X, w).vector, project_interior(prep(3, 1.5), X, w).vector)
    assert np.allclose(project(shahshahani(3), EDGE, [0, 1, -1]).vector, [0, 1, -1])


def test_vertex_example_against_oracle():
    """Independent KKT enumeration gives (-3/2, 3/2, 0) here."""
    w = np.array([-1.0, 2.0, 0.0])
    z_ref, _ = kkt_cone_projection(np.eye(3), vertex(3, 0), w)
    assert np.allclose(z_ref, [-1.5, 1.5, 0.0])
    assert np.allclose(project(euclidean(3), vertex(3, 0), w).vector, z_ref)


def test_dimension_limit():
    x = np.zeros(22)
    x[0] = 1.0
    with pytest.raises(DimensionalityLimit):
        project_cone(euclidean(22), x, np.ones(22))


def test_euclidean_matches_max_average(rng):
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        x = random_simplex_points(rng, n, 1, boundary_fraction=1.0)[0]
        w = rng.normal(size=n)
        r = project_cone(euclidean(n), x, w)
        assert np.abs(r.vector - euclid_cone_max_average(x, w)).max() < 1e-10
        assert r.kkt_residual <= 1e-8


def test_full_rank_matches_enumeration_and_slsqp(rng):
    for _ in range(100):
        n = int(rng.integers(2, 6))
        G = random_spd(rng, n)  # metric tensor g(x), held constant
        g = constant_metric(np.linalg.inv(G))
        x = random_simplex_points(rng, n, 1, boundary_fraction=1.0)[0]
        w = rng.normal(size=n)
        r = project_cone(g, x, w)
        d = (r.vector - w) @ G @ (r.vector - w)
        _, d_kkt = kkt_cone_projection(G, x, w)
        _, d_qp = slsqp_cone_projection(G, x, w)
        assert abs(d - d_kkt) < 1e-9
        assert d <= d_qp + 1e-7
        assert in_tangent_cone(x, r.vector)
        assert r.kkt_residual <= 1e-8


@given(simplex_points(max_n=5), st.data())
def test_idempotent_and_admissible(x, data):
    n = x.size
    w = data.draw(arrays(np.float64, n, elements=st.floats(-3, 3)))
    for g in (euclidean(n), prep(n, 2)):
        wg = np.where(x > 0, w, 0.0) if g.regime == "continuous" else w
        z = project(g, x, wg).vector
        assert np.allclose(project(g, x, z).vector, z, atol=1e-9)
        if g.regime == "continuous":
            assert in_tangent_space(x, z)
        else:
            assert in_tangent_cone(x, z)


@given(simplex_points(max_n=5), st.data())
def test_nonexpansive_full_rank(x, data):
    n = x.size
    w1 = data.draw(arrays(np.float64, n, elements=st.floats(-3, 3)))
    w2 = data.draw(arrays(np.float64, n, elements=st.floats(-3, 3)))
    G = np.diag(np.linspace(1.0, 2.0, n))
    g = constant_metric(G)
    z1, z2 = project(g, x, w1).vector, project(g, x, w2).vector
    assert norm(g, x, z1 - z2) <= norm(g, x, w1 - w2) + 1e-9


@given(simplex_points(max_n=5), st.data())
def test_moreau_orthogonality_subspace(x, data):
    n = x.size
    w = np.where(x > 0, data.draw(arrays(np.float64, n, elements=st.floats(-3, 3))), 0.0)
    g = shahshahani(n)
    z = project(g, x, w).vector
    scale = max(1.0, norm(g, x, w) ** 2)
    assert abs(inner(g, x, w - z, z)) <= 1e-9 * scale
