import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from h1minimal.h1core import (
    IDENTITY,
    FrameCoefficients,
    HeisenbergPoint,
    cartesian_to_frame,
    dilate,
    frame_to_cartesian,
    group_inv,
    group_mul,
)

coord = st.floats(-50, 50, allow_nan=False)
points = st.builds(HeisenbergPoint, coord, coord, coord)
scales = st.floats(0.01, 20)


def close(g, h, tol=1e-9):
    scale = 1 + max(abs(v) for v in (*g, *h))
    return np.allclose(g.as_array(), h.as_array(), rtol=0, atol=tol * scale * scale)


@given(points, points, points)
def test_associative(a, b, c):
    assert close(group_mul(group_mul(a, b), c), group_mul(a, group_mul(b, c)))


@given(points)
def test_identity_and_inverse(g):
    assert group_mul(g, IDENTITY) == g
    assert group_mul(IDENTITY, g) == g
    assert close(group_mul(g, group_inv(g)), IDENTITY)
    assert close(group_mul(group_inv(g), g), IDENTITY)


@given(points, points)
def test_commutator_is_vertical(a, b):
    ab, ba = a @ b, b @ a
    assert ab.x == ba.x and ab.y == ba.y
    assert np.isclose(ab.t - ba.t, a.x * b.y - b.x * a.y, atol=1e-9 * (1 + abs(ab.t)))


@given(scales, points, points)
def test_dilation_is_homomorphism(lam, a, b):
    assert close(dilate(lam, a @ b), dilate(lam, a) @ dilate(lam, b), tol=1e-8)


def test_dilation_rejects_nonpositive():
    import pytest

    with pytest.raises(ValueError):
        dilate(0.0, HeisenbergPoint(1, 1, 1))


def test_group_law_concrete():
    g = HeisenbergPoint(1.0, 0.0, 0.0) @ HeisenbergPoint(0.0, 1.0, 0.0)
    assert (g.x, g.y, g.t) == (1.0, 1.0, 0.5)


@given(points, coord, coord, coord)
def test_frame_roundtrip(base, a, b, c):
    v = frame_to_cartesian(FrameCoefficients(a, b, c), base)
    back = cartesian_to_frame(v, base)
    assert np.allclose([back.a, back.b, back.c], [a, b, c], atol=1e-9 * (1 + abs(base.x) + abs(base.y)) * 100)


@given(points, coord, coord)
def test_frame_is_left_invariant(base, a, b):
    # X_i at g is the derivative of g o exp(h e_i) at h = 0
    h = 1e-6
    for coeff, step in (((1, 0, 0), HeisenbergPoint(h, 0, 0)), ((0, 1, 0), HeisenbergPoint(0, h, 0))):
        fd = ((base @ step).as_array() - base.as_array()) / h
        assert np.allclose(frame_to_cartesian(FrameCoefficients(*coeff), base), fd, atol=1e-6 * (1 + abs(base.t)))


def test_broadcasting():
    xs = np.linspace(-1, 1, 5)
    g = HeisenbergPoint(xs, 2 * xs, xs) @ HeisenbergPoint(1.0, 0.0, 0.0)
    assert np.allclose(g.t, xs - 0.5 * 2 * xs)
