"""Surfaces in H1 and their horizontal geometry.

Three representations are supported:

* :class:`TGraph`, the graph ``t = g(x, y)``;
* :class:`ImplicitSurface`, a level set ``f(x, y, t) = 0``;
* :class:`IntrinsicGraph`, the set ``{(phi, u, v - u*phi/2)}`` over a domain of the
  ``(u, v)`` plane.  These never have characteristic points.

For t-graphs and level sets we compute ``p``, ``q`` (the horizontal parts of
the normal), ``W = |(p, q)|``, the unit horizontal normal ``(p_bar, q_bar)`` and
the horizontal mean curvature.  Intrinsic graphs are handled through the
Burger operator ``B_phi(f) = f_u + phi f_v``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

from .errors import (
    CharacteristicPointError,
    NotMinimalError,
    NotOnSurfaceError,
    SingularSurfaceError,
    TraceError,
)
from .exprlang import Expression, eval_jet, evaluate, parse
from .h1core import HeisenbergPoint, frame_to_cartesian
from .quadrature import QuadResult, integrate_box

CHAR_THRESHOLD = 1e-8
ON_SURFACE_TOL = 1e-8


def _expr(e, variables) -> Expression:
    return e if isinstance(e, Expression) else parse(e, variables)


# ---------------------------------------------------------------------------
# Regions


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle; also the region type used by integrals."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        vals = (self.xmin, self.xmax, self.ymin, self.ymax)
        if not all(np.isfinite(vals)) or self.xmin >= self.xmax or self.ymin >= self.ymax:
            raise ValueError(f"empty or unbounded rectangle {vals}")

    @property
    def area(self) -> float:
        return (self.xmax - self.xmin) * (self.ymax - self.ymin)

    def contains(self, x, y, slack: float = 0.0):
        return (
            (x >= self.xmin - slack) & (x <= self.xmax + slack)
            & (y >= self.ymin - slack) & (y <= self.ymax + slack)
        )

    def grid(self, n: int):
        """``n x n`` grid including the boundary, flattened."""
        xs = np.linspace(self.xmin, self.xmax, n)
        ys = np.linspace(self.ymin, self.ymax, n)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return X.ravel(), Y.ravel()

    def sample(self, rng: np.random.Generator, n: int):
        return (
            rng.uniform(self.xmin, self.xmax, n),
            rng.uniform(self.ymin, self.ymax, n),
        )

    def integrate(self, f, rtol: float = 1e-8, atol: float = 0.0, **kw) -> QuadResult:
        return integrate_box(
            f, [(self.xmin, self.xmax), (self.ymin, self.ymax)], rtol=rtol, atol=atol, **kw
        )


class Region(Protocol):
    def integrate(self, f, rtol: float = 1e-8, atol: float = 0.0, **kw) -> QuadResult: ...


# ---------------------------------------------------------------------------
# Horizontal data


@dataclass(frozen=True)
class HorizontalData:
    p: np.ndarray
    q: np.ndarray
    W: np.ndarray
    omega: np.ndarray
    p_bar: np.ndarray
    q_bar: np.ndarray
    omega_bar: np.ndarray
    characteristic: np.ndarray

    @property
    def nu_h(self):
        """Unit horizontal normal, as (X1, X2) components."""
        return self.p_bar, self.q_bar

    @property
    def nu_h_perp(self):
        """Horizontal tangent direction ``q_bar X1 - p_bar X2``."""
        return self.q_bar, -self.p_bar


def _horizontal(p, q, omega, threshold=CHAR_THRESHOLD) -> HorizontalData:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    omega = np.broadcast_to(np.asarray(omega, dtype=float), p.shape)
    W = np.hypot(p, q)
    char = W <= threshold
    with np.errstate(divide="ignore", invalid="ignore"):
        safe = np.where(char, np.nan, W)
        pb, qb, ob = p / safe, q / safe, omega / safe
    return HorizontalData(p, q, W, omega, pb, qb, ob, char)


# ---------------------------------------------------------------------------
# t-graphs


@dataclass(frozen=True)
class GraphDerivs:
    g: np.ndarray
    gx: np.ndarray
    gy: np.ndarray
    gxx: np.ndarray
    gxy: np.ndarray
    gyy: np.ndarray


@dataclass(frozen=True)
class TGraph:
    """The graph ``t = g(x, y)`` over a rectangle."""

    g: Expression
    domain: Rect

    def __init__(self, g, domain: Rect):
        object.__setattr__(self, "g", _expr(g, ("x", "y")))
        object.__setattr__(self, "domain", domain)

    def value(self, x, y):
        return evaluate(self.g, {"x": x, "y": y})

    def derivs(self, x, y) -> GraphDerivs:
        b = {"x": x, "y": y}
        jx = eval_jet(self.g, b, "x")
        jy = eval_jet(self.g, b, "y")
        jd = eval_jet(self.g, b, {"x": 1.0, "y": 1.0})
        gxx = 2.0 * jx.c[2]
        gyy = 2.0 * jy.c[2]
        gxy = 0.5 * (2.0 * jd.c[2] - gxx - gyy)
        return GraphDerivs(jx.c[0], jx.c[1], jy.c[1], gxx, gxy, gyy)

    def gradient(self, x, y):
        b = {"x": x, "y": y}
        return eval_jet(self.g, b, "x", order=1).c[1], eval_jet(self.g, b, "y", order=1).c[1]

    def as_implicit(self) -> "ImplicitSurface":
        f = parse(f"({self.g}) - t", ("x", "y", "t"))
        x0 = 0.5 * (self.domain.xmin + self.domain.xmax)
        y0 = 0.5 * (self.domain.ymin + self.domain.ymax)
        return ImplicitSurface(f, HeisenbergPoint(x0, y0, float(self.value(x0, y0))))


def horizontal_data_tgraph(s: TGraph, x, y) -> HorizontalData:
    gx, gy = s.gradient(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return _horizontal(gx + 0.5 * y, gy - 0.5 * x, -1.0)


def _mean_curvature_tgraph(s: TGraph, x, y):
    d = s.derivs(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    p = d.gx + 0.5 * y
    q = d.gy - 0.5 * x
    W = np.hypot(p, q)
    _require_noncharacteristic(W)
    # p_x = g_xx, p_y = g_xy + 1/2, q_x = g_xy - 1/2, q_y = g_yy
    px, qy = d.gxx, d.gyy
    W3 = W**3
    return (px + qy) / W - (p * p * px + p * q * 2.0 * d.gxy + q * q * qy) / W3


# ---------------------------------------------------------------------------
# Implicit surfaces


@dataclass(frozen=True)
class ImplicitDerivs:
    f: np.ndarray
    grad: tuple  # (f_x, f_y, f_t)
    hess: dict   # keys "xx", "xy", ...


@dataclass(frozen=True)
class ImplicitSurface:
    """The level set ``f(x, y, t) = 0``; ``ref`` is a point on it."""

    f: Expression
    ref: HeisenbergPoint

    def __init__(self, f, ref: HeisenbergPoint | None = None):
        object.__setattr__(self, "f", _expr(f, ("x", "y", "t")))
        object.__setattr__(self, "ref", ref)

    def value(self, x, y, t):
        return evaluate(self.f, {"x": x, "y": y, "t": t})

    def derivs(self, x, y, t) -> ImplicitDerivs:
        b = {"x": x, "y": y, "t": t}
        axes = ("x", "y", "t")
        pure = {a: eval_jet(self.f, b, a) for a in axes}
        grad = tuple(pure[a].c[1] for a in axes)
        hess = {a + a: 2.0 * pure[a].c[2] for a in axes}
        for i, a in enumerate(axes):
            for c in axes[i + 1:]:
                j = eval_jet(self.f, b, {a: 1.0, c: 1.0})
                hess[a + c] = 0.5 * (2.0 * j.c[2] - hess[a + a] - hess[c + c])
        return ImplicitDerivs(pure["x"].c[0], grad, hess)

    def gradient(self, x, y, t):
        b = {"x": x, "y": y, "t": t}
        return (
            eval_jet(self.f, b, "x", order=1).c,
            eval_jet(self.f, b, "y", order=1).c[1],
            eval_jet(self.f, b, "t", order=1).c[1],
        )

    def project(self, x, y, t, steps: int = 1):
        """Newton steps along the Euclidean gradient toward ``f = 0``."""
        x, y, t = (np.asarray(v, dtype=float) for v in (x, y, t))
        for _ in range(steps):
            (fv, fx), fy, ft = self.gradient(x, y, t)
            n2 = fx * fx + fy * fy + ft * ft
            if np.any(n2 == 0):
                raise SingularSurfaceError("the defining function has zero gradient")
            step = fv / n2
            x, y, t = x - step * fx, y - step * fy, t - step * ft
        return x, y, t


def _point_arrays(at):
    x, y, t = at
    return tuple(np.asarray(v, dtype=float) for v in (x, y, t))


def _on_surface(s: ImplicitSurface, at, tol=ON_SURFACE_TOL):
    x, y, t = _point_arrays(at)
    f0 = s.value(x, y, t)
    if np.all(np.abs(f0) <= tol):
        return x, y, t
    x, y, t = s.project(x, y, t, steps=1)
    f1 = s.value(x, y, t)
    if not np.all(np.abs(f1) <= tol):
        raise NotOnSurfaceError(
            f"point is not on the surface: |f| = {float(np.max(np.abs(f0))):.3e}"
            " and one projection step did not fix it"
        )
    return x, y, t


def _implicit_pq(d: ImplicitDerivs, x, y):
    fx, fy, ft = d.grad
    if np.any((fx == 0) & (fy == 0) & (ft == 0)):
        raise SingularSurfaceError("the defining function has zero gradient")
    return fx - 0.5 * y * ft, fy + 0.5 * x * ft, ft


def horizontal_data_implicit(s: ImplicitSurface, at) -> HorizontalData:
    x, y, t = _on_surface(s, at)
    p, q, w = _implicit_pq(s.derivs(x, y, t), x, y)
    return _horizontal(p, q, w)


def _mean_curvature_implicit(s: ImplicitSurface, at):
    x, y, t = _on_surface(s, at)
    d = s.derivs(x, y, t)
    p, q, ft = _implicit_pq(d, x, y)
    W = np.hypot(p, q)
    _require_noncharacteristic(W)
    h = d.hess
    X1p = h["xx"] - y * h["xt"] + 0.25 * y * y * h["tt"]
    X2q = h["yy"] + x * h["yt"] + 0.25 * x * x * h["tt"]
    X2p = h["xy"] - 0.5 * ft - 0.5 * y * h["yt"] + 0.5 * x * (h["xt"] - 0.5 * y * h["tt"])
    X1q = h["xy"] + 0.5 * ft + 0.5 * x * h["xt"] - 0.5 * y * (h["yt"] + 0.5 * x * h["tt"])
    return (X1p + X2q) / W - (p * (p * X1p + q * X1q) + q * (p * X2p + q * X2q)) / W**3


def _require_noncharacteristic(W):
    if np.any(W <= CHAR_THRESHOLD):
        raise CharacteristicPointError("mean curvature is undefined at a characteristic point", float(np.min(W)))


def mean_curvature(s, at):
    """Horizontal mean curvature ``X1 p_bar + X2 q_bar``.

    ``at`` is ``(x, y)`` for a :class:`TGraph` and ``(x, y, t)`` or a
    :class:`HeisenbergPoint` for an :class:`ImplicitSurface`; arrays broadcast.
    """
    if isinstance(s, TGraph):
        x, y = at
        return _scalarize(_mean_curvature_tgraph(s, x, y))
    return _scalarize(_mean_curvature_implicit(s, at))


def _scalarize(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


# ---------------------------------------------------------------------------
# Characteristic locus


@dataclass(frozen=True)
class CharPoint:
    point: tuple
    W: float


def char_locus_scan(s, n: int = 65, threshold: float = CHAR_THRESHOLD, box: float = 2.0, newton_steps: int = 30):
    """Grid points of ``s`` with ``W < threshold``.

    t-graphs use an ``n x n`` grid on their domain.  Implicit surfaces use an
    ``n``-per-axis box grid of half-width ``box`` around ``ref``, projected onto
    the surface by Newton steps; points that fail to converge are dropped.
    """
    if isinstance(s, TGraph):
        x, y = s.domain.grid(n)
        h = horizontal_data_tgraph(s, x, y)
        idx = np.flatnonzero(h.W < threshold)
        return [CharPoint((float(x[i]), float(y[i])), float(h.W[i])) for i in idx]
    ref = s.ref or HeisenbergPoint(0.0, 0.0, 0.0)
    axes = [np.linspace(c - box, c + box, n) for c in ref]
    X, Y, T = (a.ravel() for a in np.meshgrid(*axes, indexing="ij"))
    with np.errstate(all="ignore"):
        try:
            X, Y, T = s.project(X, Y, T, steps=newton_steps)
        except SingularSurfaceError:
            return []
        fv = s.value(X, Y, T)
    good = np.isfinite(fv) & (np.abs(fv) <= ON_SURFACE_TOL)
    X, Y, T = X[good], Y[good], T[good]
    if X.size == 0:
        return []
    d = s.derivs(X, Y, T)
    p, q, _ = _implicit_pq(d, X, Y)
    W = np.hypot(p, q)
    idx = np.flatnonzero(W < threshold)
    return [CharPoint((float(X[i]), float(Y[i]), float(T[i])), float(W[i])) for i in idx]


# ---------------------------------------------------------------------------
# Intrinsic graphs


@dataclass(frozen=True)
class PhiJet:
    """Value and partial derivatives of ``phi`` up to second order."""

    phi: np.ndarray
    u: np.ndarray
    v: np.ndarray
    uu: np.ndarray
    uv: np.ndarray
    vv: np.ndarray


def expression_phi_jet(e: Expression, u, v) -> PhiJet:
    b = {"u": u, "v": v}
    ju = eval_jet(e, b, "u")
    jv = eval_jet(e, b, "v")
    jd = eval_jet(e, b, {"u": 1.0, "v": 1.0})
    uu = 2.0 * ju.c[2]
    vv = 2.0 * jv.c[2]
    uv = 0.5 * (2.0 * jd.c[2] - uu - vv)
    shape = np.broadcast_shapes(np.shape(u), np.shape(v))
    return PhiJet(*(np.broadcast_to(a, shape) for a in (ju.c[0], ju.c[1], jv.c[1], uu, uv, vv)))


@dataclass(frozen=True)
class IntrinsicGraph:
    """The intrinsic graph of ``phi`` over ``domain``.

    ``phi`` is an expression in ``u, v`` or a callable ``(u, v) -> PhiJet``.
    """

    phi: object
    domain: object = None
    _jet: Callable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        phi = self.phi
        if isinstance(phi, str):
            phi = parse(phi, ("u", "v"))
            object.__setattr__(self, "phi", phi)
        if isinstance(phi, Expression):
            object.__setattr__(self, "_jet", lambda u, v: expression_phi_jet(phi, u, v))
        else:
            object.__setattr__(self, "_jet", phi)

    def jet(self, u, v) -> PhiJet:
        return self._jet(np.asarray(u, dtype=float), np.asarray(v, dtype=float))

    def embed(self, u, v) -> HeisenbergPoint:
        phi = self.jet(u, v).phi
        return HeisenbergPoint(phi, np.asarray(u, float), np.asarray(v, float) - 0.5 * np.asarray(u) * phi)

    def burger_phi(self, u, v):
        """``B_phi(phi)`` and its ``v``-derivative."""
        j = self.jet(u, v)
        b = j.u + j.phi * j.v
        b_v = j.uv + j.v * j.v + j.phi * j.vv
        return b, b_v


def _first_derivs(f, u, v):
    """``(f, f_u, f_v)`` for an expression in ``u, v`` or a callable."""
    if isinstance(f, str):
        f = parse(f, ("u", "v"))
    if isinstance(f, Expression):
        b = {"u": u, "v": v}
        ju = eval_jet(f, b, "u", order=1)
        jv = eval_jet(f, b, "v", order=1)
        return ju.c[0], ju.c[1], jv.c[1]
    out = f(u, v)
    if isinstance(out, PhiJet):
        return out.phi, out.u, out.v
    return out[0], out[1], out[2]


def burger(graph: IntrinsicGraph, f, at):
    """``f_u + phi f_v`` at ``at = (u, v)``; ``f`` as for :func:`_first_derivs`."""
    u, v = (np.asarray(a, dtype=float) for a in at)
    _, fu, fv = _first_derivs(f, u, v)
    return _scalarize(fu + graph.jet(u, v).phi * fv)


def minimality_residual(graph: IntrinsicGraph, at):
    """``B_phi(B_phi(phi))``; zero exactly where the graph is minimal."""
    u, v = (np.asarray(a, dtype=float) for a in at)
    j = graph.jet(u, v)
    res = j.uu + 2.0 * j.phi * j.uv + j.phi**2 * j.vv + j.v * (j.u + j.phi * j.v)
    return _scalarize(res)


def check_minimal(graph: IntrinsicGraph, u, v, tol: float = 1e-6) -> float:
    worst = float(np.max(np.abs(minimality_residual(graph, (u, v)))))
    if not worst <= tol:
        raise NotMinimalError("surface is not minimal on the region", worst)
    return worst


def perimeter(graph: IntrinsicGraph, region, rtol: float = 1e-8, **kw) -> float:
    """Horizontal perimeter ``int sqrt(1 + B_phi(phi)^2) du dv`` over ``region``."""

    def density(u, v):
        b, _ = graph.burger_phi(u, v)
        return np.sqrt(1.0 + b * b)

    return region.integrate(density, rtol=rtol, **kw).value


# ---------------------------------------------------------------------------
# Rule lines and seed curves of t-graphs


@dataclass(frozen=True)
class RuleLine:
    """Horizontal line ``r -> base + r (a, b, t_slope)`` in Cartesian form."""

    base: HeisenbergPoint
    direction: tuple
    t_slope: float
    graph: TGraph | None = None

    def point(self, r):
        a, b = self.direction
        return HeisenbergPoint(self.base.x + a * r, self.base.y + b * r, self.base.t + self.t_slope * r)

    def velocity_frame(self):
        """Frame components of the constant velocity; the T part is zero."""
        from .h1core import cartesian_to_frame

        a, b = self.direction
        return cartesian_to_frame((a, b, self.t_slope), self.base)

    def residual(self, r):
        """``g(x(r), y(r)) - t(r)``: how far the line leaves the graph."""
        pt = self.point(np.asarray(r, dtype=float))
        return self.graph.value(pt.x, pt.y) - pt.t


def rule_line_through(s: TGraph, at, tol: float = 1e-8) -> RuleLine:
    x, y = (float(a) for a in at)
    h = horizontal_data_tgraph(s, x, y)
    if bool(h.characteristic):
        raise CharacteristicPointError("no rule line through a characteristic point", float(h.W))
    H = mean_curvature(s, (x, y))
    if abs(H) > tol:
        raise NotMinimalError("rule lines exist only through points where the surface is minimal", abs(H))
    a, b = float(h.q_bar), float(-h.p_bar)
    base = HeisenbergPoint(x, y, float(s.value(x, y)))
    return RuleLine(base, (a, b), 0.5 * (b * x - a * y), s)


@dataclass(frozen=True)
class SeedTrace:
    """Samples of a traced seed curve: ``gamma(s)``, its unit tangent and the height."""

    s: np.ndarray
    gamma: np.ndarray        # (N, 2)
    gamma_prime: np.ndarray  # (N, 2)
    h0: np.ndarray
    richardson_error: float = np.nan

    @property
    def speed(self) -> np.ndarray:
        return np.hypot(self.gamma_prime[:, 0], self.gamma_prime[:, 1])

    def ruled_point(self, i: int, r):
        """``L(r, s_i) = (gamma + r gamma'^perp, h0 - (r/2) gamma . gamma')``."""
        g = self.gamma[i]
        gp = self.gamma_prime[i]
        perp = np.array([gp[1], -gp[0]])
        r = np.asarray(r, dtype=float)
        return HeisenbergPoint(
            g[0] + r * perp[0], g[1] + r * perp[1], self.h0[i] - 0.5 * r * float(g @ gp)
        )


def _unit_field(s: TGraph, pts):
    x, y = pts[..., 0], pts[..., 1]
    inside = s.domain.contains(x, y)
    h = horizontal_data_tgraph(s, x, y)
    return np.stack([h.p_bar, h.q_bar], axis=-1), inside & ~h.characteristic


def _rk4(s: TGraph, start, span: float, steps: int):
    h = span / steps
    pts = np.empty((steps + 1, 2))
    pts[0] = start
    for i in range(steps):
        z = pts[i]
        stages = []
        for c, prev in ((0.0, None), (0.5, 0), (0.5, 1), (1.0, 2)):
            arg = z if prev is None else z + c * h * stages[prev]
            k, ok = _unit_field(s, arg)
            if not ok:
                return pts[: i + 1], i
            stages.append(k)
        pts[i + 1] = z + h / 6.0 * (stages[0] + 2 * stages[1] + 2 * stages[2] + stages[3])
    return pts, steps


def seed_from_tgraph(s: TGraph, start, span: float, steps: int = 4096) -> SeedTrace:
    """Trace the integral curve of the unit horizontal normal from ``start``.

    Classical RK4 with ``steps`` fixed steps over arclength ``span`` (negative
    spans trace backwards).  A run with half the steps gives a Richardson
    error estimate.  Raises :class:`TraceError` carrying the partial trace if
    the curve leaves the domain or meets the characteristic locus.
    """
    start = np.asarray(start, dtype=float)
    pts, reached = _rk4(s, start, span, steps)
    ds = np.linspace(0.0, span, steps + 1)[: len(pts)]

    def package(pts, ds, err=np.nan):
        gp, _ = _unit_field(s, pts)
        return SeedTrace(ds, pts, gp, np.asarray(s.value(pts[:, 0], pts[:, 1]), dtype=float) * np.ones(len(pts)), err)

    if reached < steps:
        partial = package(pts, ds) if len(pts) > 1 else None
        where = "left the domain or reached a characteristic point"
        raise TraceError(f"seed curve {where} after arclength {ds[-1]:.6g}", partial)
    coarse, _ = _rk4(s, start, span, steps // 2)
    err = float(np.max(np.abs(pts[::2][: len(coarse)] - coarse))) / 15.0
    return package(pts, ds, err)
