import math

import pytest
from hypothesis import given, strategies as st

from minkrot.errors import DegenerateVector
from minkrot.lorentz import Vec4, causal_character, minkowski_dot, minkowski_dot_array, minkowski_normalize

finite = st.floats(-1e3, 1e3, allow_nan=False)
vecs = st.builds(Vec4, finite, finite, finite, finite)


@pytest.mark.parametrize("a,b,want", [
    ((1, 0, 0, 0), (1, 0, 0, 0), 1.0),
    ((0, 0, 0, 1), (0, 0, 0, 1), -1.0),
    ((1, 1, 1, 1), (1, 1, 1, 1), 2.0),
])
def test_dot_examples(a, b, want):
    assert minkowski_dot(Vec4(*a), Vec4(*b)) == want


@pytest.mark.parametrize("a,want", [
    ((1, 0, 0, 0), "spacelike"),
    ((0, 0, 0, 1), "timelike"),
    ((1, 0, 0, 1), "lightlike"),
])
def test_causal_character(a, want):
    assert causal_character(Vec4(*a), 1e-12) == want


def test_causal_character_rejects_bad_tol():
    with pytest.raises(ValueError):
        causal_character(Vec4(1, 0, 0, 0), 0.0)


def test_normalize_examples():
    assert minkowski_normalize(Vec4(2, 0, 0, 0)) == Vec4(1, 0, 0, 0)
    assert minkowski_normalize(Vec4(0, 0, 0, 3)) == Vec4(0, 0, 0, 1)
    with pytest.raises(DegenerateVector):
        minkowski_normalize(Vec4(1, 0, 0, 1))


def test_vec4_rejects_nonfinite():
    with pytest.raises(ValueError):
        Vec4(0, math.nan, 0, 0)
    with pytest.raises(ValueError):
        Vec4(math.inf, 0, 0, 0)


def test_vec4_arithmetic_and_array_roundtrip():
    a = Vec4(1, 2, 3, 4)
    assert a + a == 2 * a
    assert a - a == Vec4(0, 0, 0, 0)
    assert -a == a * -1
    assert a / 2 == Vec4(0.5, 1, 1.5, 2)
    assert Vec4.from_array(a.as_array()) == a
    assert list(a) == [1, 2, 3, 4]


@given(vecs, vecs)
def test_dot_symmetric(a, b):
    assert minkowski_dot(a, b) == minkowski_dot(b, a)


def _abs_dot(a, b):
    return sum(abs(x * y) for x, y in zip(a, b))


@given(vecs, vecs, vecs, st.floats(-10, 10), st.floats(-10, 10))
def test_dot_bilinear(a, b, c, s, t):
    lhs = minkowski_dot(s * a + t * b, c)
    rhs = s * minkowski_dot(a, c) + t * minkowski_dot(b, c)
    # relative to the magnitude of the terms summed, which is what rounding scales with
    scale = abs(s) * _abs_dot(a, c) + abs(t) * _abs_dot(b, c)
    assert abs(lhs - rhs) <= 1e-12 * max(scale, 1e-300)


@given(vecs)
def test_normalize_gives_unit(a):
    q = minkowski_dot(a, a)
    if abs(q) <= 1e-12:
        with pytest.raises(DegenerateVector):
            minkowski_normalize(a)
        return
    r = minkowski_normalize(a)
    # cancellation in <a, a> limits the attainable accuracy to |a|^2 / |<a, a>|
    cond = _abs_dot(a, a) / abs(q)
    assert abs(abs(minkowski_dot(r, r)) - 1.0) <= 1e-12 * max(1.0, cond)


def test_dot_array_matches_scalar():
    import numpy as np

    rng = np.random.default_rng(1)
    A = rng.normal(size=(7, 4))
    B = rng.normal(size=(7, 4))
    got = minkowski_dot_array(A, B)
    want = [minkowski_dot(Vec4.from_array(a), Vec4.from_array(b)) for a, b in zip(A, B)]
    assert np.allclose(got, want, rtol=0, atol=1e-15)
