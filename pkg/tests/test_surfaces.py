import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as si

from h1minimal.errors import CharacteristicPointError, NotMinimalError, NotOnSurfaceError, TraceError
from h1minimal.h1core import HeisenbergPoint, dilate, group_mul
from h1minimal.surfaces import (
    ImplicitSurface,
    IntrinsicGraph,
    Rect,
    TGraph,
    burger,
    char_locus_scan,
    check_minimal,
    horizontal_data_implicit,
    horizontal_data_tgraph,
    mean_curvature,
    minimality_residual,
    perimeter,
    rule_line_through,
    seed_from_tgraph,
)

X, Y, T, U, V = sympy.symbols("x y t u v", real=True)


def sympy_tgraph_curvature(g):
    """X1(p/W) + X2(q/W) with p = g_x + y/2, q = g_y - x/2, done symbolically."""
    p = sympy.diff(g, X) + Y / 2
    q = sympy.diff(g, Y) - X / 2
    W = sympy.sqrt(p * p + q * q)
    # on a t-graph the frame acts on functions of (x, y) as plain partials
    return sympy.diff(p / W, X) + sympy.diff(q / W, Y)


UNIT = Rect(-1, 1, -1, 1)


@pytest.mark.parametrize(
    "text, sym",
    [
        ("x^3*y - y^2/3", X**3 * Y - Y**2 / 3),
        ("sin(x)*cos(2*y) + x*y", sympy.sin(X) * sympy.cos(2 * Y) + X * Y),
        ("exp(x/2 - y)", sympy.exp(X / 2 - Y)),
    ],
)
def test_tgraph_curvature_against_sympy(text, sym, rng):
    s = TGraph(text, UNIT)
    H = sympy.lambdify((X, Y), sympy_tgraph_curvature(sym))
    x, y = rng.uniform(-1, 1, (2, 200))
    got = mean_curvature(s, (x, y))
    assert np.allclose(got, H(x, y), rtol=1e-9, atol=1e-9)


def test_tgraph_and_implicit_agree(rng):
    s = TGraph("x^3*y - y^2/3 + x", UNIT)
    imp = s.as_implicit()
    x, y = rng.uniform(-1, 1, (2, 100))
    t = s.value(x, y)
    assert np.allclose(mean_curvature(s, (x, y)), mean_curvature(imp, (x, y, t)), rtol=1e-10, atol=1e-10)


def test_xy_half_values():
    s = TGraph("x*y/2", UNIT)
    h = horizontal_data_tgraph(s, 0.0, 1.0)
    assert (float(h.p), float(h.q), float(h.W)) == (1.0, 0.0, 1.0)
    assert mean_curvature(s, (1.0, 2.0)) == 0.0
    with pytest.raises(CharacteristicPointError):
        mean_curvature(s, (0.3, 0.0))


def test_paraboloid_curvature_and_dilation():
    s = TGraph("(x^2+y^2)/4", Rect(-3, 3, -3, 3))
    assert math.isclose(mean_curvature(s, (1.0, 1.0)), 0.5, rel_tol=1e-13)
    # the paraboloid is dilation invariant and H scales like 1/lambda
    for lam in (0.5, 2.0):
        g = dilate(lam, HeisenbergPoint(1.0, 1.0, 0.5))
        assert math.isclose(mean_curvature(s, (g.x, g.y)), 0.5 / lam, rel_tol=1e-12)


CATENOID = "t^2-((x^2+y^2)-1)/4"


def catenoid_points(rng, n):
    r = rng.uniform(1.0, 3.0, n)
    a = rng.uniform(0, 2 * np.pi, n)
    t = np.sqrt((r * r - 1) / 4) * rng.choice([-1, 1], n)
    return r * np.cos(a), r * np.sin(a), t


def test_implicit_catenoid_is_minimal(rng):
    s = ImplicitSurface(CATENOID, HeisenbergPoint(1.0, 0.0, 0.0))
    x, y, t = catenoid_points(rng, 1000)
    assert np.max(np.abs(mean_curvature(s, (x, y, t)))) <= 1e-12
    h = horizontal_data_implicit(s, (1.0, 0.0, 0.0))
    assert math.isclose(float(h.p), -0.5)


def test_left_translation_preserves_minimality(rng):
    # the translated catenoid f(g0^{-1} * p) = 0 is again minimal
    g0 = HeisenbergPoint(0.4, -0.7, 0.3)
    gi = HeisenbergPoint(-0.4, 0.7, -0.3)
    xs = f"(x + ({gi.x}))"
    ys = f"(y + ({gi.y}))"
    ts = f"(t + ({gi.t}) + 0.5*(({gi.x})*y - x*({gi.y})))"
    f = CATENOID.replace("t", "T").replace("x", "X").replace("y", "Y")
    f = f.replace("X", xs).replace("Y", ys).replace("T", ts)
    s = ImplicitSurface(f)
    x, y, t = catenoid_points(rng, 200)
    p = group_mul(g0, HeisenbergPoint(x, y, t))
    assert np.max(np.abs(mean_curvature(s, (p.x, p.y, p.t)))) <= 1e-11


def test_off_surface_point_rejected():
    s = ImplicitSurface(CATENOID)
    with pytest.raises(NotOnSurfaceError):
        mean_curvature(s, (1.0, 0.0, 1.0))


def test_char_scan():
    assert char_locus_scan(ImplicitSurface(CATENOID, HeisenbergPoint(1.0, 0.0, 0.0))) == []
    pts = char_locus_scan(TGraph("x*y/2", UNIT), n=9)
    assert pts and all(abs(p.point[1]) < 1e-12 for p in pts)


# -- intrinsic graphs -------------------------------------------------------

def sympy_double_burger(phi):
    B = lambda f: sympy.diff(f, U) + phi * sympy.diff(f, V)
    return B(B(phi))


@pytest.mark.parametrize(
    "text, sym",
    [
        ("u*v + v^2", U * V + V**2),
        ("sin(u) + v/3", sympy.sin(U) + V / 3),
        ("(u*v)/(1+u^2/2)", U * V / (1 + U**2 / 2)),
    ],
)
def test_double_burger_against_sympy(text, sym, rng):
    g = IntrinsicGraph(text)
    ref = sympy.lambdify((U, V), sympy_double_burger(sym))
    u, v = rng.uniform(-2, 2, (2, 300))
    assert np.allclose(minimality_residual(g, (u, v)), ref(u, v) * np.ones_like(u), rtol=1e-10, atol=1e-10)


def test_minimal_examples_and_negative_control():
    u, v = np.meshgrid(np.linspace(-3, 3, 30), np.linspace(-3, 3, 30))
    for text in ("(u*v)/(1+u^2/2)", "0", "2 - u/3", "(v+1)/(u+5)"):
        assert check_minimal(IntrinsicGraph(text), u, v, tol=1e-12) <= 1e-12
    with pytest.raises(NotMinimalError) as info:
        check_minimal(IntrinsicGraph("u^2"), u, v)
    assert info.value.residual == pytest.approx(2.0)


def test_embedding_is_group_product(rng):
    g = IntrinsicGraph("sin(u)*v")
    u, v = rng.uniform(-2, 2, (2, 50))
    phi = np.sin(u) * v
    want = group_mul(HeisenbergPoint(0 * u, u, v), HeisenbergPoint(phi, 0 * u, 0 * u))
    got = g.embed(u, v)
    assert np.allclose([got.x, got.y, got.t], [want.x, want.y, want.t])


def test_burger_operator():
    g = IntrinsicGraph("v")
    assert burger(g, "u*v", (2.0, 3.0)) == pytest.approx(3.0 + 3.0 * 2.0)


def test_perimeter_against_scipy():
    g = IntrinsicGraph("v + u*v/4")
    region = Rect(-1, 1, 0, 1)
    ours = perimeter(g, region, rtol=1e-11)

    def density(v, u):
        phi, pu, pv = v + u * v / 4, v / 4, 1 + u / 4
        return math.sqrt(1 + (pu + phi * pv) ** 2)

    ref, _ = si.dblquad(density, -1, 1, 0, 1, epsabs=1e-13, epsrel=1e-12)
    assert math.isclose(ours, ref, rel_tol=1e-10)


# -- rule lines and seeds ---------------------------------------------------

def test_rule_line_through_xy_half():
    s = TGraph("x*y/2", UNIT)
    line = rule_line_through(s, (1.0, 1.0))
    assert line.direction == pytest.approx((0.0, -1.0))
    assert line.t_slope == pytest.approx(-0.5)
    assert np.max(np.abs(line.residual(np.linspace(-10, 10, 41)))) == 0.0
    assert line.velocity_frame().c == pytest.approx(0.0)


def test_rule_line_needs_minimal_point():
    with pytest.raises(NotMinimalError):
        rule_line_through(TGraph("(x^2+y^2)/4", Rect(0.5, 2, 0.5, 2)), (1.0, 1.0))


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.9, 0.9), st.floats(0.05, 0.9), st.sampled_from([-1.0, 1.0]))
def test_rule_lines_stay_on_minimal_graph(x, y, sign):
    s = TGraph("x*y/2 + 3*x + 1", UNIT)
    line = rule_line_through(s, (x, sign * y))
    assert np.max(np.abs(line.residual(np.linspace(-10, 10, 21)))) <= 1e-10


def test_seed_trace_is_unit_speed_and_leaves_domain():
    s = TGraph("x*y/2", Rect(-2, 2, -2, 2))
    tr = seed_from_tgraph(s, (0.0, 1.0), 1.5)
    assert np.allclose(tr.gamma[-1], (1.5, 1.0), atol=1e-12)
    assert np.max(np.abs(tr.speed - 1)) <= 1e-12
    assert tr.h0[-1] == pytest.approx(0.75)
    # the ruled map of the traced seed lands back on the surface
    for i in (0, 1000, 4096):
        P = tr.ruled_point(i, np.linspace(-1, 1, 5))
        assert np.allclose(s.value(P.x, P.y), P.t, atol=1e-10)
    with pytest.raises(TraceError) as info:
        seed_from_tgraph(s, (0.0, 1.0), 3.0)
    assert info.value.partial.gamma[-1][0] <= 2.0
