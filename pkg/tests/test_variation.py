import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as si

from h1minimal import strips as S
from h1minimal import variation as V
from h1minimal.errors import NotMinimalError, NotStrictError
from h1minimal.surfaces import IntrinsicGraph, Rect


@pytest.fixture(scope="module")
def catenoid():
    return S.catenoid_strip(0.1)


@pytest.fixture(scope="module")
def bump():
    return V.BumpSpec(0.5 * 0.2 / 2 * 0.99)


# -- cutoff ----------------------------------------------------------------

def test_bump_shape():
    b = V.BumpSpec(0.3)
    s = np.linspace(-1, 1, 2001)
    c = b.chi(s)
    assert np.all(c[np.abs(s) <= 0.3] == 1.0)
    assert np.all(c[np.abs(s) >= 0.6] == 0.0)
    assert np.all((c >= 0) & (c <= 1))
    assert np.allclose(c, b.chi(-s))
    fd = np.gradient(c, s)
    assert np.allclose(b.chi_prime(s), fd, atol=2e-3)


def test_bump_rejects_bad_delta():
    with pytest.raises(ValueError):
        V.BumpSpec(0.0)


def test_psik_guards(catenoid):
    with pytest.raises(ValueError):
        V.TestFunctionPsiK(catenoid, V.BumpSpec(0.06), 4)
    with pytest.raises(ValueError):
        V.TestFunctionPsiK(catenoid, V.BumpSpec(0.01), 0)
    flipped = S.strip_from_expressions("-sec(s)", "-tan(s)", "-tan(s)/2", (-0.1, 0.1))
    with pytest.raises(NotStrictError):
        V.TestFunctionPsiK(flipped, V.BumpSpec(0.01), 4)


def test_psik_derivatives(catenoid, bump):
    t = V.TestFunctionPsiK(catenoid, bump, 3.0)
    u, s, h = 1.3, 0.02, 1e-6
    p, pu, ps = t(u, s)
    assert pu == pytest.approx((t(u + h, s)[0] - t(u - h, s)[0]) / (2 * h), rel=1e-6)
    assert ps == pytest.approx((t(u, s + h)[0] - t(u, s - h)[0]) / (2 * h), rel=1e-6)


# -- kernel and limits -----------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 10), st.floats(-5, 5), st.floats(0.1, 10))
def test_kernel_closed_form_vs_scipy(A, B, C):
    C = max(C, (B * B + 0.1) / (4 * A))
    ref, _ = si.quad(lambda u: 1 / (A * u * u + B * u + C) ** 2, -np.inf, np.inf, epsrel=1e-12, epsabs=0, limit=400)
    assert V.kernel_integral(A, B, C) == pytest.approx(ref, rel=1e-8)


def test_kernel_rejects_degenerate():
    with pytest.raises(ValueError):
        V.kernel_integral(1.0, 2.0, 1.0)


def test_catenoid_limit_is_cos_squared_integral(catenoid, bump):
    ref, _ = si.quad(lambda s: float(bump.chi(s)) ** 2 * math.cos(s) ** 2, -0.1, 0.1, epsabs=1e-14, points=[-0.099, -0.0495, 0.0495, 0.099])
    assert V.instability_limit(catenoid, bump) == pytest.approx(-1.5 * math.pi * ref, rel=1e-10)
    assert V.instability_limit(catenoid, bump) == pytest.approx(-0.6547122385, rel=1e-9)


def test_limit_terms_ratio(catenoid, bump):
    lt = V.limit_terms_numeric(catenoid, bump)
    assert lt.ratio == pytest.approx(-0.25, abs=1e-9)
    assert lt.term1 + lt.term2 == pytest.approx(V.instability_limit(catenoid, bump), rel=1e-9)


# -- the sweep -------------------------------------------------------------

def test_catenoid_sweep_turns_negative(catenoid, bump):
    res = V.instability_search(catenoid, bump, k_max=64)
    assert res.k_star == 32
    totals = [r.total for r in res.reports]
    assert totals[0] > 0 > totals[-1]
    gaps = [abs(t - res.limit) for t in totals]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_potential_term_converges_faster(catenoid, bump):
    lt = V.limit_terms_numeric(catenoid, bump)
    r = V.second_variation_strip(catenoid, V.TestFunctionPsiK(catenoid, bump, 64))
    assert r.term2 == pytest.approx(lt.term2, rel=5e-3)
    assert abs(r.term1 / lt.term1 - 1) > 0.5


def test_report_verdicts():
    assert V.VariationReport.build(1.0, -1.0 - 1e-8).verdict == V.UNSTABLE
    assert V.VariationReport.build(1.0, -1.0).verdict == V.STABLE


# -- cross-checks between forms and against finite differences --------------

def _pulled_back(d, b, k):
    t = V.TestFunctionPsiK(d, b, k)
    (u0, u1), (s0, s1) = t.support
    return t, V.PulledBackPsi(t, d), S.StripPatch(d, u0, u1, max(s0, d.J[0]), min(s1, d.J[1]))


def test_intrinsic_and_strip_forms_agree(catenoid, bump):
    t, psi, patch = _pulled_back(catenoid, bump, 2)
    strip = V.second_variation_strip(catenoid, t)
    g = S.as_intrinsic_graph(catenoid)
    br = [bump.breaks(0.0, 2), bump.breaks(catenoid.midpoint)]
    intr = V.second_variation_intrinsic(g, psi, patch, breaks=br)
    assert intr.term1 == pytest.approx(strip.term1, rel=1e-9)
    assert intr.term2 == pytest.approx(strip.term2, rel=1e-9)


def test_fd_oracle_on_saddle():
    g = IntrinsicGraph("(u*v)/(1+u^2/2)")
    psi = V.TensorBump(0.3, -0.2, 0.4, 0.5, amplitude=2.0)
    box = psi.box
    br = [np.linspace(box.xmin, box.xmax, 5), np.linspace(box.ymin, box.ymax, 5)]
    exact = V.second_variation_intrinsic(g, psi, box, rtol=1e-11, breaks=br).total
    fd = V.fd_second_variation(g, psi, box, breaks=br)
    assert fd == pytest.approx(exact, rel=1e-6)
    assert abs(V.fd_first_variation(g, psi, box, breaks=br)) <= 1e-9


def test_nonminimal_graph_rejected():
    with pytest.raises(NotMinimalError):
        V.second_variation_intrinsic(IntrinsicGraph("u^2"), V.TensorBump(0, 0, 0.5, 0.5), Rect(-1, 1, -1, 1))


@settings(max_examples=25, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.1, 1), st.floats(0.1, 1))
def test_vertical_plane_nonnegative(u0, v0, a, b):
    psi = V.TensorBump(u0, v0, a, b)
    r = V.second_variation_intrinsic(IntrinsicGraph("0"), psi, psi.box, breaks=[[u0], [v0]])
    assert r.term2 == 0.0
    assert r.total >= 0.0


# -- generic search --------------------------------------------------------

def test_spline_basis_partition_of_unity():
    x = np.linspace(-2, 2, 101)
    N, dN = V._basis_1d(x, -2, 2, 10)
    # interior functions vanish at the ends, so the sum is 1 only inside the middle knots
    inner = np.abs(x) <= 2 - 3 * 4 / 13
    assert np.all(N >= 0)
    assert np.allclose(N[:, :].sum(axis=1)[inner], 1.0)
    assert np.allclose(N[[0, -1]], 0.0) and np.allclose(dN[[0, -1]], 0.0)


def test_generic_search_saddle_witness():
    g = IntrinsicGraph("(u*v)/(1+u^2/2)")
    box = Rect(-2, 2, -2, 2)
    res = V.generic_instability_search(g, box)
    assert res.verdict == V.UNSTABLE and res.minimum < 0
    assert res.gram_condition < 1e4
    w = res.witness()
    total = V.second_variation_intrinsic(g, w, box, breaks=w.knots(), rtol=1e-10).total
    assert total == pytest.approx(res.minimum, rel=1e-6)
    assert np.sum(res.coefficients**2) == pytest.approx(1.0)


def test_generic_search_vertical_plane():
    res = V.generic_instability_search(IntrinsicGraph("0"), Rect(-1, 1, -1, 1), n=8)
    assert res.minimum >= -1e-9
    assert res.verdict == V.STABLE


def test_generic_search_on_strip_patch(catenoid):
    g = S.as_intrinsic_graph(catenoid)
    res = V.generic_instability_search(g, S.StripPatch(catenoid, -4, 4, -0.1, 0.1), n=12)
    assert res.minimum < 0
    with pytest.raises(TypeError):
        res.witness()
