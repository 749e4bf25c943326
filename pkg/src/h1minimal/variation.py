"""Second variation of horizontal perimeter under deformations ``psi X1``.

For an intrinsic graph of ``phi`` with ``B = B_phi(phi)`` the second
variation is the quadratic form

    V(psi) = int B_phi(psi)^2 w  -  int psi^2 (2 B_v - phi_v^2) w,
    w = (1 + B^2)^(-3/2),

which on a strict strip, written in the chart coordinates ``(u, s)``, reads

    V(psi) = int psi_u^2 Q w  +  int psi^2 (F'^2 - 2 sigma' G') w / Q,
    w = (1 + G^2)^(-3/2).

The test functions ``psi_k = chi(s) chi(u/k) Q^(-1/2)`` drive ``V`` to the
negative limit ``(pi/2 - 2 pi) j`` with
``j = int chi^2 (1 + G^2)^(-3/2) G' (2 sigma' G' - F'^2)^(-1/2) ds``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import NotMinimalError, NotStrictError, SearchFailure
from .quadrature import integrate_box
from .strips import StripData, StripPatch, invert_s, psi_jacobian, psi_map, strict_condition
from .surfaces import IntrinsicGraph, Rect, check_minimal

UNSTABLE_THRESHOLD = -1e-9
STABLE = "stable-at-this-test"
UNSTABLE = "UNSTABLE"


# ---------------------------------------------------------------------------
# Cutoffs and the test family


def _B(x):
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)


def _B_prime(x):
    safe = np.where(x > 0, x, 1.0)
    return np.where(x > 0, _B(x) / (safe * safe), 0.0)


@dataclass(frozen=True)
class BumpSpec:
    """Smooth even cutoff: 1 on ``|s| <= delta``, 0 on ``|s| >= 2 delta``."""

    delta: float

    def __post_init__(self):
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be positive, got {self.delta!r}")

    def _parts(self, s):
        r = np.abs(np.asarray(s, dtype=float))
        a = (2.0 * self.delta - r) / self.delta
        b = (r - self.delta) / self.delta
        return r, a, b

    def chi(self, s):
        _, a, b = self._parts(s)
        Ba, Bb = _B(a), _B(b)
        return Ba / (Ba + Bb)

    def chi_prime(self, s):
        r, a, b = self._parts(s)
        Ba, Bb = _B(a), _B(b)
        dr = -(_B_prime(a) * Bb + Ba * _B_prime(b)) / (self.delta * (Ba + Bb) ** 2)
        return np.sign(np.asarray(s, dtype=float)) * dr

    def breaks(self, center: float = 0.0, scale: float = 1.0):
        d = self.delta * scale
        return [center + x for x in (-2 * d, -d, 0.0, d, 2 * d)]


@dataclass(frozen=True)
class TestFunctionPsiK:
    """``psi_k(u, s) = chi(s - c) chi(u / k) / sqrt(Q(u, s))``, ``c`` the middle of ``J``."""

    __test__ = False  # not a pytest class

    strip: StripData
    bump: BumpSpec
    k: float

    def __post_init__(self):
        d = self.strip
        if not self.k > 0:
            raise ValueError(f"k must be positive, got {self.k!r}")
        limit = 0.5 * d.width * 0.99
        if 2.0 * self.bump.delta > limit * (1 + 1e-12):
            raise ValueError(
                f"2*delta = {2 * self.bump.delta:.6g} exceeds |J|/2 * 0.99 = {limit:.6g}"
            )
        if not float(d.G.jet(d.midpoint, 1).c[1]) > 0:
            raise NotStrictError("psi_k needs G' > 0; normalize the orientation first", 0.0)

    @property
    def center(self) -> float:
        return self.strip.midpoint

    @property
    def support(self):
        """``((u0, u1), (s0, s1))`` containing the support."""
        du = 2.0 * self.bump.delta * self.k
        c, ds = self.center, 2.0 * self.bump.delta
        return (-du, du), (c - ds, c + ds)

    def __call__(self, u, s):
        """``(psi, psi_u, psi_s)`` at chart coordinates ``(u, s)``."""
        u = np.asarray(u, dtype=float)
        s = np.asarray(s, dtype=float)
        j = self.strip.jets(s)
        Q = 0.5 * j.G1 * u * u + j.F1 * u + j.S1
        D = j.F1 + u * j.G1
        E = 0.5 * j.G2 * u * u + j.F2 * u + j.S2
        b = self.bump
        cs, cs1 = b.chi(s - self.center), b.chi_prime(s - self.center)
        ck, ck1 = b.chi(u / self.k), b.chi_prime(u / self.k) / self.k
        root = np.sqrt(Q)
        q32 = Q * root
        psi = cs * ck / root
        psi_u = cs * (2.0 * ck1 * Q - ck * D) / (2.0 * q32)
        psi_s = (cs1 * ck * Q - 0.5 * cs * ck * E) / q32
        return psi, psi_u, psi_s


def psi_k_eval(t: TestFunctionPsiK, u, s):
    """``(psi_k, d psi_k / du)`` at ``(u, s)``."""
    psi, psi_u, _ = t(u, s)
    return psi, psi_u


@dataclass(frozen=True)
class PulledBackPsi:
    """A chart-coordinate test function viewed as a function of ``(u, v)``."""

    psi: Callable
    strip: StripData

    def __call__(self, u, v):
        u = np.asarray(u, dtype=float)
        s = invert_s(self.strip, u, v)
        F, G, _ = self.strip.values(s)
        Q = psi_jacobian(self.strip, u, s)
        val, pu, ps = self.psi(u, s)
        return val, pu - ps * (F + u * G) / Q, ps / Q


@dataclass(frozen=True)
class TensorBump:
    """``chi_a(u - u0) chi_b(v - v0)`` with smooth cutoffs of half-widths ``2 a``, ``2 b``."""

    u0: float
    v0: float
    a: float
    b: float
    amplitude: float = 1.0

    def __call__(self, u, v):
        bu, bv = BumpSpec(self.a), BumpSpec(self.b)
        du = np.asarray(u, dtype=float) - self.u0
        dv = np.asarray(v, dtype=float) - self.v0
        cu, cv = bu.chi(du), bv.chi(dv)
        A = self.amplitude
        return A * cu * cv, A * bu.chi_prime(du) * cv, A * cu * bv.chi_prime(dv)

    @property
    def box(self) -> Rect:
        return Rect(self.u0 - 2 * self.a, self.u0 + 2 * self.a, self.v0 - 2 * self.b, self.v0 + 2 * self.b)


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class VariationReport:
    k: float | None
    term1: float
    term2: float
    total: float
    limit_prediction: float | None
    verdict: str

    @classmethod
    def build(cls, term1, term2, k=None, limit=None, threshold=UNSTABLE_THRESHOLD):
        total = term1 + term2
        verdict = UNSTABLE if total < threshold else STABLE
        return cls(k, float(term1), float(term2), float(total), limit, verdict)


def _minimality_sample(graph: IntrinsicGraph, region, n: int = 256):
    rng = np.random.default_rng(12345)
    u, v = region.sample(rng, n)
    return check_minimal(graph, u, v, tol=1e-6)


def second_variation_intrinsic(graph: IntrinsicGraph, psi, region, rtol: float = 1e-8, atol: float = 1e-13, k=None, **kw) -> VariationReport:
    """Both terms of the second variation of an intrinsic graph.

    ``psi(u, v)`` returns ``(psi, psi_u, psi_v)`` and must vanish near the
    boundary of ``region`` (a :class:`Rect` or a strip patch).
    """
    _minimality_sample(graph, region)

    def integrand(u, v):
        j = graph.jet(u, v)
        B = j.u + j.phi * j.v
        Bv = j.uv + j.v * j.v + j.phi * j.vv
        w = (1.0 + B * B) ** -1.5
        p, pu, pv = psi(u, v)
        bpsi = pu + j.phi * pv
        return np.stack([bpsi * bpsi * w, -p * p * (2.0 * Bv - j.v * j.v) * w])

    res = region.integrate(integrand, rtol=rtol, atol=atol, **kw)
    return VariationReport.build(res.value[0], res.value[1], k=k)


def _strip_terms(d: StripData, psi, u, s):
    j = d.jets(s)
    Q = 0.5 * j.G1 * u * u + j.F1 * u + j.S1
    w = (1.0 + j.G * j.G) ** -1.5
    out = psi(u, s)
    p, pu = out[0], out[1]
    return np.stack([pu * pu * Q * w, p * p * (j.F1 * j.F1 - 2.0 * j.S1 * j.G1) * w / Q])


def second_variation_strip(d: StripData, psi, region=None, rtol: float = 1e-8, atol: float = 1e-13, breaks=None) -> VariationReport:
    """Second variation in chart coordinates.

    ``psi(u, s)`` returns at least ``(psi, psi_u)``; ``region`` is the box
    ``((u0, u1), (s0, s1))`` containing its support, taken from
    ``psi.support`` when omitted.
    """
    k = getattr(psi, "k", None)
    limit = None
    if isinstance(psi, TestFunctionPsiK):
        region = region or psi.support
        if breaks is None:
            breaks = [psi.bump.breaks(0.0, psi.k), psi.bump.breaks(psi.center)]
        limit = instability_limit(d, psi.bump)
    if region is None:
        raise ValueError("region is required for a general test function")
    (u0, u1), (s0, s1) = region
    s0, s1 = max(s0, d.J[0]), min(s1, d.J[1])
    res = integrate_box(lambda u, s: _strip_terms(d, psi, u, s), [(u0, u1), (s0, s1)], rtol=rtol, atol=atol, breaks=breaks)
    return VariationReport.build(res.value[0], res.value[1], k=k, limit=limit)


# ---------------------------------------------------------------------------
# Limits


def kernel_integral(A: float, B: float, C: float) -> float:
    """``int_R du / (A u^2 + B u + C)^2 = 4 pi A / (4 A C - B^2)^(3/2)``."""
    disc = 4.0 * A * C - B * B
    if not A > 0 or not disc > 0:
        raise ValueError(f"need A > 0 and 4AC - B^2 > 0, got A={A!r}, 4AC-B^2={disc!r}")
    return 4.0 * np.pi * A / disc**1.5


def limit_weight(d: StripData, b: BumpSpec, s):
    """``chi^2 (1 + G^2)^(-3/2) G' (2 sigma' G' - F'^2)^(-1/2)``."""
    j = d.jets(s)
    return b.chi(s - d.midpoint) ** 2 * (1 + j.G**2) ** -1.5 * j.G1 / np.sqrt(2 * j.S1 * j.G1 - j.F1**2)


def limit_integral(d: StripData, b: BumpSpec, rtol: float = 1e-12) -> float:
    c = d.midpoint
    lo, hi = max(c - 2 * b.delta, d.J[0]), min(c + 2 * b.delta, d.J[1])
    return integrate_box(lambda s: limit_weight(d, b, s), [(lo, hi)], rtol=rtol, breaks=[b.breaks(c)]).value


def instability_limit(d: StripData, b: BumpSpec) -> float:
    """Large-``k`` limit of the second variation along ``psi_k``: ``(pi/2 - 2 pi) j``."""
    return (0.5 * np.pi - 2.0 * np.pi) * limit_integral(d, b)


@dataclass(frozen=True)
class LimitTerms:
    term1: float
    term2: float

    @property
    def ratio(self) -> float:
        return self.term1 / self.term2


def limit_terms_numeric(d: StripData, b: BumpSpec, rtol: float = 1e-11) -> LimitTerms:
    """The ``k -> infinity`` limits of both terms by direct quadrature.

    With ``chi(u/k) -> 1`` the gradient term tends to
    ``int chi^2 w int (Q_u)^2 / (4 Q^2) du ds`` and the potential term to
    ``int chi^2 w (F'^2 - 2 sigma' G') int Q^(-2) du ds``.  The inner
    integrals over the whole line are computed numerically, after centering
    and scaling ``u`` at the vertex of ``Q`` and mapping ``u = tan(theta)``.
    """
    c = d.midpoint

    def integrand(s, theta):
        j = d.jets(s)
        a, bb, cc = 0.5 * j.G1, j.F1, j.S1
        m = np.sqrt(4 * a * cc - bb * bb) / (2 * a)
        u = -bb / (2 * a) + m * np.tan(theta)
        du = m / np.cos(theta) ** 2
        Q = a * u * u + bb * u + cc
        Qu = 2 * a * u + bb
        w = b.chi(s - c) ** 2 * (1 + j.G**2) ** -1.5
        return np.stack([
            w * Qu * Qu / (4 * Q * Q) * du,
            w * (bb * bb - 2 * cc * j.G1) / (Q * Q) * du,
        ])

    lo, hi = max(c - 2 * b.delta, d.J[0]), min(c + 2 * b.delta, d.J[1])
    half = 0.5 * np.pi
    res = integrate_box(integrand, [(lo, hi), (-half, half)], rtol=rtol, breaks=[b.breaks(c), [0.0]])
    return LimitTerms(float(res.value[0]), float(res.value[1]))


# ---------------------------------------------------------------------------
# Searches


@dataclass(frozen=True)
class InstabilitySearch:
    k_star: float | None
    reports: list
    limit: float

    @property
    def found(self) -> bool:
        return self.k_star is not None


def instability_search(d: StripData, b: BumpSpec, k_max: int = 256, rtol: float = 1e-8, stop_at_first: bool = False) -> InstabilitySearch:
    """Evaluate ``psi_k`` for ``k = 1, 2, 4, ..., k_max``; report the first negative ``k``.

    Raises :class:`SearchFailure` when no ``k`` gives a negative value and the
    distance to the predicted limit is not decreasing over the last steps.
    """
    limit = instability_limit(d, b)
    reports = []
    k_star = None
    k = 1
    while k <= k_max:
        rep = second_variation_strip(d, TestFunctionPsiK(d, b, k), rtol=rtol)
        reports.append(rep)
        if k_star is None and rep.verdict == UNSTABLE:
            k_star = k
            if stop_at_first:
                break
        k *= 2
    if k_star is None:
        gaps = [abs(r.total - limit) for r in reports[-3:]]
        if not all(x > y for x, y in zip(gaps, gaps[1:])):
            raise SearchFailure(
                f"no negative value up to k = {k_max} and the totals are not approaching the limit {limit:.6g}"
            )
    return InstabilitySearch(k_star, reports, limit)


# ---------------------------------------------------------------------------
# Finite-difference oracles


def _density_increments(graph: IntrinsicGraph, psi, u, v, lam):
    """``rho(phi + lam psi) - rho(phi)`` and the same for ``-lam``, where
    ``rho = sqrt(1 + B^2)`` is the perimeter density.  Differences of
    ``B`` are expanded exactly so no cancellation occurs."""
    j = graph.jet(u, v)
    p, pu, pv = psi(u, v)
    B0 = j.u + j.phi * j.v
    rho0 = np.sqrt(1.0 + B0 * B0)
    lin = pu + j.phi * pv + p * j.v
    quad = p * pv
    out = []
    for sgn in (1.0, -1.0):
        dB = sgn * lam * lin + lam * lam * quad
        B = B0 + dB
        rho = np.sqrt(1.0 + B * B)
        out.append(dB * (B + B0) / (rho + rho0))
    return out


def fd_second_variation(graph: IntrinsicGraph, psi, region, lambda_step: float = 1e-3, rtol: float = 1e-10, atol: float = 1e-13, **kw) -> float:
    """Central second difference of the perimeter along ``phi + lam psi``,
    with one Richardson step from ``lam`` and ``lam / 2``.

    The differences are formed pointwise in the perimeter density and then
    integrated, which equals differencing the integrated perimeters.
    """
    lam = lambda_step

    def integrand(u, v):
        vals = []
        for h in (lam, 0.5 * lam):
            plus, minus = _density_increments(graph, psi, u, v, h)
            vals.append((plus + minus) / (h * h))
        return (4.0 * vals[1] - vals[0]) / 3.0

    return float(region.integrate(integrand, rtol=rtol, atol=atol, **kw).value)


def fd_first_variation(graph: IntrinsicGraph, psi, region, lambda_step: float = 1e-3, rtol: float = 1e-10, atol: float = 1e-13, **kw) -> float:
    """Central first difference of the perimeter with one Richardson step."""
    lam = lambda_step

    def integrand(u, v):
        vals = []
        for h in (lam, 0.5 * lam):
            plus, minus = _density_increments(graph, psi, u, v, h)
            vals.append((plus - minus) / (2.0 * h))
        return (4.0 * vals[1] - vals[0]) / 3.0

    return float(region.integrate(integrand, rtol=rtol, atol=atol, **kw).value)


# ---------------------------------------------------------------------------
# Generic search over a spline basis


def _cubic_bspline(t):
    """Uniform cubic B-spline on [0, 4] and its derivative."""
    t = np.asarray(t, dtype=float)
    val = np.zeros_like(t)
    der = np.zeros_like(t)
    m = (t >= 0) & (t < 1)
    val[m] = t[m] ** 3 / 6
    der[m] = t[m] ** 2 / 2
    m = (t >= 1) & (t < 2)
    x = t[m] - 1
    val[m] = (-3 * x**3 + 3 * x**2 + 3 * x + 1) / 6
    der[m] = (-9 * x**2 + 6 * x + 3) / 6
    m = (t >= 2) & (t < 3)
    x = t[m] - 2
    val[m] = (3 * x**3 - 6 * x**2 + 4) / 6
    der[m] = (9 * x**2 - 12 * x) / 6
    m = (t >= 3) & (t < 4)
    x = 4 - t[m]
    val[m] = x**3 / 6
    der[m] = -(x**2) / 2
    return val, der


def _basis_1d(x, lo, hi, n):
    """``n`` cubic B-splines on ``[lo, hi]`` with ``n + 3`` knot intervals,
    all vanishing to second order at both ends.  Returns values and
    derivatives with shape ``(len(x), n)``."""
    h = (hi - lo) / (n + 3)
    t = (np.asarray(x)[:, None] - lo) / h - np.arange(n)[None, :]
    val, der = _cubic_bspline(t)
    return val, der / h


def _gauss_points(lo, hi, cells, order=4):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, cells + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return pts, wts


@dataclass(frozen=True)
class SplinePsi:
    """``sum c_ij N_i(u) N_j(v)`` on a rectangle, as a ``(u, v)`` evaluator."""

    coefficients: np.ndarray
    box: Rect

    def __call__(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        shape = np.broadcast_shapes(u.shape, v.shape)
        u = np.broadcast_to(u, shape).ravel()
        v = np.broadcast_to(v, shape).ravel()
        n = self.coefficients.shape[0]
        b = self.box
        Nu, dNu = _basis_1d(u, b.xmin, b.xmax, n)
        Nv, dNv = _basis_1d(v, b.ymin, b.ymax, n)
        c = self.coefficients
        val = np.einsum("pi,ij,pj->p", Nu, c, Nv)
        du = np.einsum("pi,ij,pj->p", dNu, c, Nv)
        dv = np.einsum("pi,ij,pj->p", Nu, c, dNv)
        return val.reshape(shape), du.reshape(shape), dv.reshape(shape)

    def knots(self):
        """Knot lines per axis; pass as ``breaks`` to quadrature."""
        n = self.coefficients.shape[0]
        b = self.box
        return [np.linspace(b.xmin, b.xmax, n + 4), np.linspace(b.ymin, b.ymax, n + 4)]


@dataclass(frozen=True)
class GenericSearchResult:
    minimum: float
    coefficients: np.ndarray
    rayleigh_l2: float
    gram_condition: float
    n: int
    verdict: str = field(default=STABLE)
    region: object = None

    def witness(self) -> SplinePsi:
        """The minimizing test function, for rectangular regions."""
        if not isinstance(self.region, Rect):
            raise TypeError("witness evaluation is available for rectangular regions only")
        return SplinePsi(self.coefficients, self.region)


def _chart_of(graph: IntrinsicGraph, region):
    """Box in chart coordinates ``(a, b)`` and a function returning, at chart
    points, ``(u, v, area weight, (du_a, du_b), (dv_a, dv_b))`` where the last two
    give ``d/du`` and ``d/dv`` in terms of ``d/da`` and ``d/db``."""
    if isinstance(region, Rect):
        def chart(a, b):
            one, zero = np.ones_like(a), np.zeros_like(a)
            return a, b, one, (one, zero), (zero, one)
        return ((region.xmin, region.xmax), (region.ymin, region.ymax)), chart
    if isinstance(region, StripPatch):
        d = region.strip

        def chart(a, s):
            _, v = psi_map(d, a, s)
            F, G, _ = d.values(s)
            Q = psi_jacobian(d, a, s)
            one = np.ones_like(a)
            return a, v, np.abs(Q), (one, -(F + a * G) / Q), (np.zeros_like(a), 1.0 / Q)
        return ((region.u0, region.u1), (region.s0, region.s1)), chart
    raise TypeError(f"unsupported region type {type(region).__name__}")


def generic_instability_search(graph: IntrinsicGraph, region, n: int = 16, gram_limit: float = 1e12) -> GenericSearchResult:
    """Minimize the second variation over ``n x n`` tensor cubic B-splines.

    The quadratic form ``K`` and the L2 Gram matrix ``M`` are assembled with
    4-point Gauss rules per knot cell.  ``minimum`` is the smallest eigenvalue
    of ``K`` (coefficients normalized to unit Euclidean norm); ``rayleigh_l2``
    is the smallest generalized eigenvalue of ``(K, M)``.
    """
    (a0, a1), (b0, b1) = _chart_of(graph, region)[0]
    chart = _chart_of(graph, region)[1]
    pa, wa = _gauss_points(a0, a1, n + 3)
    pb, wb = _gauss_points(b0, b1, n + 3)
    A, B = np.meshgrid(pa, pb, indexing="ij")
    W = np.outer(wa, wb).ravel()
    A, B = A.ravel(), B.ravel()
    u, v, area, (du_a, du_b), (dv_a, dv_b) = chart(A, B)
    check_minimal(graph, u, v, tol=1e-6)

    j = graph.jet(u, v)
    Bphi = j.u + j.phi * j.v
    Bv = j.uv + j.v * j.v + j.phi * j.vv
    w = (1.0 + Bphi * Bphi) ** -1.5 * area * W
    pot = (2.0 * Bv - j.v * j.v) * w

    Na, dNa = _basis_1d(pa, a0, a1, n)
    Nb, dNb = _basis_1d(pb, b0, b1, n)
    na, nb = len(pa), len(pb)
    # values and chart derivatives of every basis function at every point
    val = (Na[:, None, :, None] * Nb[None, :, None, :]).reshape(na * nb, n * n)
    d_a = (dNa[:, None, :, None] * Nb[None, :, None, :]).reshape(na * nb, n * n)
    d_b = (Na[:, None, :, None] * dNb[None, :, None, :]).reshape(na * nb, n * n)
    bu = du_a[:, None] * d_a + du_b[:, None] * d_b
    bv = dv_a[:, None] * d_a + dv_b[:, None] * d_b
    burger_basis = bu + j.phi[:, None] * bv

    K = burger_basis.T @ (w[:, None] * burger_basis) - val.T @ (pot[:, None] * val)
    K = 0.5 * (K + K.T)
    M = val.T @ ((area * W)[:, None] * val)
    M = 0.5 * (M + M.T)
    cond = float(np.linalg.cond(M))
    if not cond < gram_limit:
        raise SearchFailure(f"Gram matrix is ill-conditioned (condition number {cond:.3e})")
    evals, evecs = scipy.linalg.eigh(K)
    gen = scipy.linalg.eigh(K, M, eigvals_only=True, subset_by_index=[0, 0])
    minimum = float(evals[0])
    verdict = UNSTABLE if minimum < UNSTABLE_THRESHOLD else STABLE
    return GenericSearchResult(minimum, evecs[:, 0].reshape(n, n), float(gen[0]), cond, n, verdict, region)
