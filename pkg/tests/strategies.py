"""Hypothesis strategies shared by the property tests."""
import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


@st.composite
def simplex_points(draw, n=None, min_n=2, max_n=6, interior=False, min_share=1e-3):
    n = draw(st.integers(min_n, max_n)) if n is None else n
    w = draw(arrays(np.float64, n, elements=st.floats(min_share, 1.0)))
    if not interior:
        zero = draw(arrays(np.bool_, n))
        if zero.all():
            zero[draw(st.integers(0, n - 1))] = False
        w = np.where(zero, 0.0, w)
    return w / w.sum()


@st.composite
def square_matrices(draw, n):
    return draw(arrays(np.float64, (n, n), elements=finite))


@st.composite
def spd_matrices(draw, n, cond=1e3):
    B = draw(arrays(np.float64, (n, n), elements=st.floats(-1, 1)))
    return B @ B.T + np.eye(n) * (1.0 / np.sqrt(cond) + 0.1)
