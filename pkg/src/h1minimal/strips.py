"""Strict intrinsic graphical strips.

A strip is given by functions ``F, G, sigma`` of ``s`` on an interval ``J``.
The chart ``(u, s) -> (u, v)`` with ``v = G(s) u^2/2 + F(s) u + sigma(s)``
has Jacobian ``Q = G' u^2/2 + F' u + sigma'``, and the surface is the
intrinsic graph of ``phi(u, v) = F(s) + u G(s)`` where ``s = s(u, v)``
inverts the chart.  The strip is strict when ``F'^2 - 2 sigma' G' < 0`` on
``J``; then ``Q`` has no real roots in ``u`` and the chart is a
diffeomorphism onto its image.

Strips can be given directly or built from a seed curve: a unit-speed plane
curve ``gamma`` with height ``h0``, which generates the ruled surface
``L(r, s) = (gamma + r gamma'^perp, h0 - (r/2) gamma . gamma')`` with the
clockwise convention ``(a, b)^perp = (b, -a)``.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field
from typing import Protocol

import numpy as np

from .errors import InjectivityError, NotStrictError, OutOfDomainError
from .exprlang import Expression, eval_jet, parse
from .h1core import HeisenbergPoint
from .jets import Jet
from .jets import cos as jcos
from .jets import sin as jsin
from .quadrature import QuadResult, integrate_box
from .surfaces import IntrinsicGraph, PhiJet

CHECK_GRID = 1024
UNIT_SPEED_TOL = 1e-8
GAMMA1_FLOOR = 1e-6


# ---------------------------------------------------------------------------
# Scalar functions of s with derivatives


class ScalarFunction(Protocol):
    def jet(self, s, order: int = 2) -> Jet:
        """Taylor jet at ``s``: ``c[k] = f^(k)(s) / k!``."""


def _broadcast_jet(j: Jet, s) -> Jet:
    tail = np.broadcast_shapes(j.c.shape[1:], np.shape(s))
    c = j.c.reshape(j.c.shape[:1] + (1,) * (len(tail) - j.c.ndim + 1) + j.c.shape[1:])
    return Jet(np.broadcast_to(c, j.c.shape[:1] + tail).copy())


@dataclass(frozen=True)
class ExprFunction:
    expr: Expression

    def __post_init__(self):
        if isinstance(self.expr, str):
            object.__setattr__(self, "expr", parse(self.expr, ("s",)))

    def jet(self, s, order: int = 2) -> Jet:
        s = np.asarray(s, dtype=float)
        return _broadcast_jet(eval_jet(self.expr, {"s": s}, "s", order), s)

    def __str__(self) -> str:
        return str(self.expr)


@dataclass(frozen=True)
class Reflected:
    """``s -> f(-s)``."""

    base: ScalarFunction

    def jet(self, s, order: int = 2) -> Jet:
        return self.base.jet(-np.asarray(s, dtype=float), order).reflect()

    def __str__(self) -> str:
        return f"reflect({self.base})"


def _as_function(f) -> ScalarFunction:
    if isinstance(f, (str, Expression)):
        return ExprFunction(f)
    return f


# ---------------------------------------------------------------------------
# Strip data


@dataclass(frozen=True)
class StripJet:
    """Values of F, G, sigma and their first two derivatives."""

    F: np.ndarray
    F1: np.ndarray
    F2: np.ndarray
    G: np.ndarray
    G1: np.ndarray
    G2: np.ndarray
    S: np.ndarray
    S1: np.ndarray
    S2: np.ndarray


@dataclass(frozen=True)
class StripData:
    """``(F, G, sigma)`` on the interval ``J = (J[0], J[1])``.

    With ``check=True`` (the default) strictness is verified on a grid of
    ``grid`` points plus the endpoints and :class:`NotStrictError` is raised
    otherwise.  ``reflected`` records that the data was mirrored to make
    ``G' > 0``.  ``vertex_bound`` optionally records a lower bound for
    ``|v|`` at the vertices of the chart parabolas ``u -> v(u, s)``.
    """

    F: ScalarFunction
    G: ScalarFunction
    sigma: ScalarFunction
    J: tuple[float, float]
    reflected: bool = False
    seed: object = None
    vertex_bound: float | None = None
    check: InitVar[bool] = True
    grid: InitVar[int] = CHECK_GRID

    def __post_init__(self, check: bool, grid: int):
        object.__setattr__(self, "F", _as_function(self.F))
        object.__setattr__(self, "G", _as_function(self.G))
        object.__setattr__(self, "sigma", _as_function(self.sigma))
        s0, s1 = (float(a) for a in self.J)
        if not (np.isfinite(s0) and np.isfinite(s1) and s0 < s1):
            raise ValueError(f"interval J = {self.J} is empty or unbounded")
        object.__setattr__(self, "J", (s0, s1))
        if check:
            worst = float(np.max(strict_condition(self, self.grid_points(grid))))
            if not worst < 0.0:
                raise NotStrictError(
                    f"not strict: max of F'^2 - 2 sigma' G' over J is {worst:.6g} (needs < 0)", worst
                )

    def grid_points(self, n: int = CHECK_GRID) -> np.ndarray:
        return np.linspace(self.J[0], self.J[1], n)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.J[0] + self.J[1])

    @property
    def width(self) -> float:
        return self.J[1] - self.J[0]

    def jets(self, s) -> StripJet:
        f = self.F.jet(s, 2).c
        g = self.G.jet(s, 2).c
        h = self.sigma.jet(s, 2).c
        return StripJet(f[0], f[1], 2 * f[2], g[0], g[1], 2 * g[2], h[0], h[1], 2 * h[2])

    def values(self, s):
        """``(F, G, sigma)`` at ``s``."""
        s = np.asarray(s, dtype=float)
        return self.F.jet(s, 0).c[0], self.G.jet(s, 0).c[0], self.sigma.jet(s, 0).c[0]

    def in_J(self, s):
        return (s >= self.J[0]) & (s <= self.J[1])


def strip_from_expressions(F: str, G: str, sigma: str, J, **kw) -> StripData:
    return StripData(ExprFunction(F), ExprFunction(G), ExprFunction(sigma), tuple(J), **kw)


def strict_condition(d: StripData, s):
    """``F'(s)^2 - 2 sigma'(s) G'(s)``; negative exactly where the strip is strict."""
    s = np.asarray(s, dtype=float)
    F1 = d.F.jet(s, 1).c[1]
    G1 = d.G.jet(s, 1).c[1]
    S1 = d.sigma.jet(s, 1).c[1]
    out = F1 * F1 - 2.0 * S1 * G1
    return float(out) if out.ndim == 0 else out


def psi_map(d: StripData, u, s):
    """The chart ``(u, s) -> (u, G u^2/2 + F u + sigma)``."""
    F, G, S = d.values(s)
    u = np.asarray(u, dtype=float)
    return u, 0.5 * G * u * u + F * u + S


def psi_jacobian(d: StripData, u, s):
    """``Q = G' u^2/2 + F' u + sigma'``."""
    s = np.asarray(s, dtype=float)
    u = np.asarray(u, dtype=float)
    F1 = d.F.jet(s, 1).c[1]
    G1 = d.G.jet(s, 1).c[1]
    S1 = d.sigma.jet(s, 1).c[1]
    return 0.5 * G1 * u * u + F1 * u + S1


def invert_s(d: StripData, u, v, max_iter: int = 200):
    """The ``s`` in ``J`` with ``psi_map(d, u, s) = (u, v)``.

    Safeguarded Newton iteration inside a bisection bracket, on the monotone
    map ``s -> v(u, s)``.  Raises :class:`OutOfDomainError` if ``(u, v)`` is
    not in the image of ``R x J``.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    shape = np.broadcast_shapes(u.shape, v.shape)
    u = np.broadcast_to(u, shape).ravel()
    v = np.broadcast_to(v, shape).ravel()
    s0, s1 = d.J
    lo = np.full(u.shape, s0)
    hi = np.full(u.shape, s1)
    _, v_lo = psi_map(d, u, lo)
    _, v_hi = psi_map(d, u, hi)
    sign = np.sign(v_hi - v_lo)
    tol = 1e-12 * np.maximum(1.0, np.abs(v))
    r_lo = sign * (v_lo - v)
    r_hi = sign * (v_hi - v)
    outside = ~((r_lo <= tol) & (r_hi >= -tol))
    if np.any(outside):
        i = int(np.flatnonzero(outside)[0])
        raise OutOfDomainError(
            f"(u, v) = ({u[i]!r}, {v[i]!r}) is outside the strip image over J = {d.J}"
        )
    s = np.where(np.abs(v_hi - v_lo) > 0, lo + (v - v_lo) / np.where(v_hi != v_lo, v_hi - v_lo, 1.0) * (hi - lo), lo)
    s = np.clip(s, lo, hi)
    done = np.zeros(u.shape, dtype=bool)
    for _ in range(max_iter):
        _, vs = psi_map(d, u, s)
        r = sign * (vs - v)
        done = np.abs(vs - v) <= tol
        if np.all(done):
            break
        lo = np.where(r < 0, s, lo)
        hi = np.where(r > 0, s, hi)
        q = psi_jacobian(d, u, s)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = s - (vs - v) / q
        bad = ~np.isfinite(newton) | (newton <= lo) | (newton >= hi)
        nxt = np.where(bad, 0.5 * (lo + hi), newton)
        # converged bracket without meeting the residual test: accept
        stuck = (hi - lo) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(s))
        s = np.where(done | stuck, s, nxt)
        if np.all(done | stuck):
            break
    return s.reshape(shape) if shape else float(s[0])


def strip_phi(d: StripData, u, v) -> PhiJet:
    """``phi = F(s) + u G(s)`` at ``s = s(u, v)`` with first and second partials."""
    u = np.asarray(u, dtype=float)
    s = invert_s(d, u, v)
    return strip_phi_us(d, u, s)


def strip_phi_us(d: StripData, u, s) -> PhiJet:
    """As :func:`strip_phi`, with the chart coordinate ``s`` already known."""
    u = np.asarray(u, dtype=float)
    j = d.jets(s)
    phi = j.F + u * j.G
    Q = 0.5 * j.G1 * u * u + j.F1 * u + j.S1
    D = j.F1 + u * j.G1            # dQ/du
    E = 0.5 * j.G2 * u * u + j.F2 * u + j.S2   # dQ/ds
    Ds = j.F2 + u * j.G2
    su = -phi / Q
    sv = 1.0 / Q
    phi_u = j.G + D * su
    phi_v = D / Q
    Q2 = Q * Q
    A_u = -((j.G1 * phi + D * j.G) * Q - D * D * phi) / Q2
    A_s = j.G1 - ((Ds * phi + D * D) * Q - D * phi * E) / Q2
    B_s = (Ds * Q - D * E) / Q2
    return PhiJet(phi, phi_u, phi_v, A_u + A_s * su, A_s * sv, B_s * sv)


def normalize_orientation(d: StripData) -> StripData:
    """Mirror ``s -> -s`` when needed so that ``G' > 0`` on ``J``."""
    if float(d.G.jet(d.midpoint, 1).c[1]) > 0:
        return d
    worst = float(np.max(strict_condition(d, d.grid_points())))
    if not worst < 0:
        raise NotStrictError("orientation is defined only for strict data", worst)
    return StripData(
        Reflected(d.F), Reflected(d.G), Reflected(d.sigma), (-d.J[1], -d.J[0]),
        reflected=not d.reflected, seed=d.seed, vertex_bound=d.vertex_bound,
    )


def embed(d: StripData, u, v) -> HeisenbergPoint:
    """The surface point ``(phi, u, v - u phi / 2)`` over ``(u, v)``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    s = invert_s(d, u, v)
    F, G, _ = d.values(s)
    phi = F + u * G
    return HeisenbergPoint(phi, u, v - 0.5 * u * phi)


def as_intrinsic_graph(d: StripData) -> IntrinsicGraph:
    return IntrinsicGraph(lambda u, v: strip_phi(d, u, v), domain=d)


def check_monotone(d: StripData, us, n: int = CHECK_GRID) -> float:
    """Smallest value of ``Q`` over the ``s`` grid and the given ``u`` values
    (after orientation by the sign of ``G'``); positive means ``v(u, .)`` is
    strictly increasing, hence the chart is injective on those lines."""
    ss = d.grid_points(n)
    U, S = np.meshgrid(np.asarray(us, dtype=float), ss, indexing="ij")
    sign = np.sign(float(d.G.jet(d.midpoint, 1).c[1]))
    return float(np.min(sign * psi_jacobian(d, U, S)))


@dataclass(frozen=True)
class StripPatch:
    """The image of ``[u0, u1] x [s0, s1]`` under the chart, as an integration region."""

    strip: StripData
    u0: float
    u1: float
    s0: float
    s1: float

    def __post_init__(self):
        if not (self.J_contains(self.s0) and self.J_contains(self.s1) and self.s0 < self.s1 and self.u0 < self.u1):
            raise OutOfDomainError(f"patch [{self.u0}, {self.u1}] x [{self.s0}, {self.s1}] is not inside R x J")

    def J_contains(self, s) -> bool:
        return bool(self.strip.J[0] <= s <= self.strip.J[1])

    def integrate(self, f, rtol: float = 1e-8, atol: float = 0.0, **kw) -> QuadResult:
        d = self.strip

        def pulled(u, s):
            _, v = psi_map(d, u, s)
            return np.asarray(f(u, v)) * np.abs(psi_jacobian(d, u, s))

        return integrate_box(pulled, [(self.u0, self.u1), (self.s0, self.s1)], rtol=rtol, atol=atol, **kw)

    def sample(self, rng: np.random.Generator, n: int):
        u = rng.uniform(self.u0, self.u1, n)
        s = rng.uniform(self.s0, self.s1, n)
        return psi_map(self.strip, u, s)


# ---------------------------------------------------------------------------
# Seed curves


class SeedCurve(Protocol):
    interval: tuple[float, float]

    def jets(self, s, order: int = 3) -> tuple[Jet, Jet, Jet]:
        """Jets of ``gamma1``, ``gamma2`` and ``h0`` at ``s``."""


def _check_unit_speed(seed, n: int = CHECK_GRID):
    ss = np.linspace(seed.interval[0], seed.interval[1], n)
    g1, g2, _ = seed.jets(ss, 1)
    dev = float(np.max(np.abs(np.hypot(g1.c[1], g2.c[1]) - 1.0)))
    if dev > UNIT_SPEED_TOL:
        raise ValueError(f"seed curve is not unit speed: max ||gamma'| - 1| = {dev:.3e}")


@dataclass(frozen=True)
class ExpressionSeed:
    """Seed curve with ``gamma1, gamma2, h0`` given as expressions in ``s``."""

    gamma1: Expression
    gamma2: Expression
    h0: Expression
    interval: tuple[float, float]

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "h0"):
            e = getattr(self, name)
            if isinstance(e, str):
                object.__setattr__(self, name, parse(e, ("s",)))
        object.__setattr__(self, "interval", (float(self.interval[0]), float(self.interval[1])))
        if not self.interval[0] < self.interval[1]:
            raise ValueError(f"empty seed interval {self.interval}")
        _check_unit_speed(self)

    def jets(self, s, order: int = 3):
        s = np.asarray(s, dtype=float)
        return tuple(
            _broadcast_jet(eval_jet(e, {"s": s}, "s", order), s)
            for e in (self.gamma1, self.gamma2, self.h0)
        )


@dataclass(frozen=True)
class AngleSeed:
    """Unit-speed seed with tangent ``(cos alpha(s), sin alpha(s))``.

    ``gamma(s) = origin + int_{s0}^{s} (cos alpha, sin alpha)`` is computed by
    composite Gauss-Legendre panels, accurate to rounding for smooth ``alpha``.
    """

    alpha: Expression
    h0: Expression
    interval: tuple[float, float]
    origin: tuple[float, float] = (0.0, 0.0)
    _table: tuple = field(init=False, repr=False, compare=False)

    PANEL = 0.02
    NODES = 12

    def __post_init__(self):
        for name in ("alpha", "h0"):
            e = getattr(self, name)
            if isinstance(e, str):
                object.__setattr__(self, name, parse(e, ("s",)))
        s0, s1 = (float(a) for a in self.interval)
        object.__setattr__(self, "interval", (s0, s1))
        n = max(1, int(np.ceil((s1 - s0) / self.PANEL)))
        edges = np.linspace(s0, s1, n + 1)
        x, w = np.polynomial.legendre.leggauss(self.NODES)
        mids = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1:] - edges[:-1])
        pts = mids[:, None] + half[:, None] * x[None, :]
        a = self._alpha(pts)
        inc = np.stack([(np.cos(a) * w).sum(axis=1) * half, (np.sin(a) * w).sum(axis=1) * half], axis=1)
        starts = np.vstack([np.zeros(2), np.cumsum(inc, axis=0)]) + np.asarray(self.origin, dtype=float)
        object.__setattr__(self, "_table", (edges, starts, x, w))

    def _alpha(self, s):
        return np.asarray(eval_jet(self.alpha, {"s": s}, "s", 0).c[0]) * np.ones(np.shape(s))

    def gamma(self, s):
        edges, starts, x, w = self._table
        s = np.asarray(s, dtype=float)
        flat = s.ravel()
        i = np.clip(np.searchsorted(edges, flat, side="right") - 1, 0, len(edges) - 2)
        a = edges[i]
        half = 0.5 * (flat - a)
        pts = (a + half)[:, None] + half[:, None] * x[None, :]
        al = self._alpha(pts)
        g1 = starts[i, 0] + (np.cos(al) @ w) * half
        g2 = starts[i, 1] + (np.sin(al) @ w) * half
        return g1.reshape(s.shape), g2.reshape(s.shape)

    def jets(self, s, order: int = 3):
        s = np.asarray(s, dtype=float)
        al = _broadcast_jet(eval_jet(self.alpha, {"s": s}, "s", max(order - 1, 0)), s)
        g1, g2 = self.gamma(s)
        if order == 0:
            return Jet(g1[None]), Jet(g2[None]), _broadcast_jet(eval_jet(self.h0, {"s": s}, "s", 0), s)
        d1, d2 = jcos(al), jsin(al)
        h0 = _broadcast_jet(eval_jet(self.h0, {"s": s}, "s", order), s)
        return d1.integrate(g1), d2.integrate(g2), h0


def seed_quantities(c: SeedCurve, s):
    """``W0 = h0' + gamma' . gamma^perp / 2``, ``kappa = gamma'' . gamma'^perp``
    and ``1 - 2 W0 kappa`` (negative means no characteristic points), plus the
    ``r`` values of the characteristic points on each rule line when it is positive."""
    g1, g2, h = c.jets(s, 2)
    a1, a2 = g1.c[1], g2.c[1]
    b1, b2 = 2 * g1.c[2], 2 * g2.c[2]
    W0 = h.c[1] + 0.5 * (a1 * g2.c[0] - a2 * g1.c[0])
    kappa = b1 * a2 - b2 * a1
    nc = 1.0 - 2.0 * W0 * kappa
    with np.errstate(invalid="ignore", divide="ignore"):
        root = np.sqrt(np.where(nc >= 0, nc, np.nan))
        roots = ((1 - root) / (2 * W0), (1 + root) / (2 * W0))
    out = {"W0": W0, "kappa": kappa, "noncharacteristic": nc, "char_r": roots}
    if np.ndim(W0) == 0:
        out = {k: (tuple(float(x) for x in v) if isinstance(v, tuple) else float(v)) for k, v in out.items()}
    return out


@dataclass(frozen=True)
class SeedDerived:
    """One of ``F = gamma.gamma'/gamma1'``, ``G = -gamma2'/gamma1'``,
    ``sigma = h0 - gamma2 F / 2`` computed from the seed's jets."""

    seed: object
    which: str

    def jet(self, s, order: int = 2) -> Jet:
        g1, g2, h = self.seed.jets(s, order + 1)
        d1, d2 = g1.diff(), g2.diff()
        g1, g2, h = g1.truncate(order), g2.truncate(order), h.truncate(order)
        F = (g1 * d1 + g2 * d2) / d1
        if self.which == "F":
            return F
        if self.which == "G":
            return -d2 / d1
        return h - 0.5 * g2 * F

    def __str__(self) -> str:
        return f"{self.which}[seed]"


def seed_functions(c: SeedCurve):
    return SeedDerived(c, "F"), SeedDerived(c, "G"), SeedDerived(c, "sigma")


def _gamma1_window(c: SeedCurve, n: int):
    ss = np.linspace(c.interval[0], c.interval[1], n)
    g1, _, _ = c.jets(ss, 1)
    good = np.abs(g1.c[1]) >= GAMMA1_FLOOR
    best, start = (0, -1, -1), None
    for i, ok in enumerate(np.append(good, False)):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            if i - start > best[0]:
                best = (i - start, start, i - 1)
            start = None
    if best[0] < 2:
        raise OutOfDomainError("no subinterval where |gamma1'| stays away from zero")
    _, i0, i1 = best
    a, b = ss[i0], ss[i1]
    shrink = 0.01 * (b - a)
    if i0 > 0:
        a += shrink
    if i1 < n - 1:
        b -= shrink
    return a, b


def seed_to_strip(c: SeedCurve, grid: int = CHECK_GRID) -> StripData:
    """Strip data of the surface generated by ``c``.

    ``J`` is the longest run of the seed interval where ``|gamma1'| >= 1e-6``,
    pulled in by 1% of its length on each side that borders a zero of
    ``gamma1'``.  The result is normalized to ``G' > 0``.
    """
    a, b = _gamma1_window(c, grid)
    ss = np.linspace(a, b, grid)
    nc = seed_quantities(c, ss)["noncharacteristic"]
    if not np.all(nc < 0):
        raise NotStrictError(
            f"seed generates characteristic points: max of 1 - 2 W0 kappa is {float(np.max(nc)):.6g}",
            float(np.max(nc)),
        )
    F, G, S = seed_functions(c)
    return normalize_orientation(StripData(F, G, S, (a, b), seed=c, grid=grid))


def ruled_map(c: SeedCurve, r, s) -> HeisenbergPoint:
    """``L(r, s) = (gamma + r gamma'^perp, h0 - (r/2) gamma . gamma')``."""
    g1, g2, h = c.jets(s, 1)
    r = np.asarray(r, dtype=float)
    a1, a2 = g1.c[1], g2.c[1]
    x1, x2 = g1.c[0], g2.c[0]
    return HeisenbergPoint(x1 + r * a2, x2 - r * a1, h.c[0] - 0.5 * r * (x1 * a1 + x2 * a2))


def seed_chart_coords(d: StripData, r, s):
    """Chart coordinates ``(u, s_J)`` of the ruled point ``L(r, s)`` of the seed of ``d``."""
    g1, g2, _ = d.seed.jets(s, 1)
    u = g2.c[0] - np.asarray(r, dtype=float) * g1.c[1]
    return u, (-np.asarray(s, dtype=float) if d.reflected else np.asarray(s, dtype=float))


def intrinsic_projection(g: HeisenbergPoint) -> HeisenbergPoint:
    """Slide ``g`` along the X1 line through it to the plane ``x = 0``."""
    return HeisenbergPoint(0.0 * g.x, g.y, g.t + 0.5 * g.x * g.y)


# ---------------------------------------------------------------------------
# Catenoid


def catenoid_theta(r, s) -> HeisenbergPoint:
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    return HeisenbergPoint(r * np.sin(s) + np.cos(s), r * np.cos(s) - np.sin(s), 0.5 * r)


def catenoid_lambda(r, s):
    """Chart coordinates ``(u, s)`` of ``theta(r, s)``."""
    return np.asarray(r) * np.cos(s) - np.sin(s), np.asarray(s, dtype=float)


def catenoid_delta(eps: float) -> float:
    """``cot(eps)/2``: every chart parabola of the catenoid strip on
    ``(-eps, eps)`` has its vertex at ``|v| >= cot(eps)/2``.

    This does not make the horizontal band ``|v| < cot(eps)/2`` part of the
    chart image; on the line ``u = 0`` the image is only ``|v| < tan(eps)/2``.
    """
    return 0.5 / np.tan(eps)


def catenoid_strip(eps: float = 0.1, grid: int = CHECK_GRID) -> StripData:
    """``F = sec``, ``G = tan``, ``sigma = tan/2`` on ``(-eps, eps)``.

    Injectivity of the chart is checked on an ``s`` grid: two chart lines
    meet iff ``u^2 + 2 m u + 1 = 0`` has a real root, with ``m`` the difference
    quotient of ``F`` over ``G``.
    """
    if not 0.0 < eps < 0.25 * np.pi:
        raise ValueError(f"epsilon must lie in (0, pi/4), got {eps!r}")
    ss = np.linspace(-eps, eps, grid)
    F, G = 1.0 / np.cos(ss), np.tan(ss)
    dF = F[:, None] - F[None, :]
    dG = G[:, None] - G[None, :]
    off = ~np.eye(grid, dtype=bool)
    m2 = np.where(off, (dF / np.where(off, dG, 1.0)) ** 2, 0.0)
    i, j = np.unravel_index(np.argmax(m2), m2.shape)
    if m2[i, j] >= 1.0:
        raise InjectivityError("chart is not injective", (float(ss[i]), float(ss[j])))
    return StripData("sec(s)", "tan(s)", "tan(s)/2", (-eps, eps), vertex_bound=catenoid_delta(eps), grid=grid)
