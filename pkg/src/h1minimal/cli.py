"""Command-line front end.

Usage: ``h1minimal <command> <config> [options]``.  Exit codes: 0 success,
1 mathematical verdict failed (not minimal, not strict), 2 bad configuration
or arguments, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from contextlib import contextmanager

import numpy as np

from . import strips as st
from . import surfaces as sf
from . import variation as vr
from .config import ConfigError, JobConfig, load_config
from .errors import (
    CharacteristicPointError,
    EvalDomainError,
    ExprSyntaxError,
    H1Error,
    InjectivityError,
    NotMinimalError,
    NotStrictError,
    NumericalFailure,
    OutOfDomainError,
    TraceError,
    UnboundVariableError,
)
from .h1core import HeisenbergPoint

EXIT_OK, EXIT_VERDICT, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
STRIP_KINDS = ("strip", "seed", "catenoid")
TRACE_STRIDE = 16


class UsageError(H1Error):
    pass


def fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(path: str, header, rows) -> None:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(r if isinstance(r, str) else fmt(r) for r in row) + "\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(buf.getvalue())


@contextmanager
def _report_stream(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _floats(text: str, n: int, flag: str):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag} expects {n} comma-separated numbers") from None
    if len(vals) != n or not all(math.isfinite(v) for v in vals):
        raise UsageError(f"{flag} expects {n} comma-separated finite numbers")
    return vals


# ---------------------------------------------------------------------------
# Object builders


def _rect(cfg: JobConfig, a: str, b: str, c: str, d: str) -> sf.Rect:
    n = cfg.numbers
    return sf.Rect(n[a], n[b], n[c], n[d])


def build_strip(cfg: JobConfig, grid: int, check: bool = True):
    """``(strip, notes)`` for strip-like kinds."""
    notes = []
    if cfg.kind == "catenoid":
        eps = cfg.option("epsilon")
        d = st.catenoid_strip(eps, grid=grid)
        notes.append(f"vertex bound delta(eps) = cot(eps)/2 = {fmt(st.catenoid_delta(eps))}")
        return d, notes
    if cfg.kind == "seed":
        e = cfg.expressions
        seed = st.ExpressionSeed(e["gamma1"], e["gamma2"], e["h0"], cfg.interval("smin", "smax"))
        d = st.seed_to_strip(seed, grid=grid)
        if d.reflected:
            notes.append("G' < 0 on J: data reflected s -> -s so that G' > 0")
        return d, notes
    if cfg.kind == "strip":
        e = cfg.expressions
        d = st.StripData(e["F"], e["G"], e["sigma"], cfg.interval("smin", "smax"), check=False)
        worst = float(np.max(st.strict_condition(d, d.grid_points(grid))))
        if worst < 0:
            d = st.normalize_orientation(d)
            if d.reflected:
                notes.append("G' < 0 on J: data reflected s -> -s so that G' > 0")
        elif check:
            raise NotStrictError(f"not strict: max of F'^2 - 2 sigma' G' over J is {worst:.6g}", worst)
        return d, notes
    raise UsageError(f"command needs a strip, seed or catenoid config, got type {cfg.kind}")


def _graph_side(n: int) -> int:
    return max(2, int(math.ceil(math.sqrt(n))))


def _default_delta(d: st.StripData) -> float:
    return d.width / 4.0 * 0.99


# ---------------------------------------------------------------------------
# Commands


def cmd_check_minimal(cfg: JobConfig, args, out) -> int:
    tol = cfg.option("tol", args.tol)
    side = _graph_side(cfg.option("grid", args.grid))
    skipped = 0
    if cfg.kind == "tgraph":
        s = sf.TGraph(cfg.expressions["g"], _rect(cfg, "xmin", "xmax", "ymin", "ymax"))
        x, y = s.domain.grid(side)
        h = sf.horizontal_data_tgraph(s, x, y)
        keep = ~h.characteristic
        skipped = int(np.sum(~keep))
        x, y = x[keep], y[keep]
        res = np.abs(sf.mean_curvature(s, (x, y))) if x.size else np.zeros(0)
        pts = np.stack([x, y], axis=1)
        what = "|H|"
    elif cfg.kind == "implicit":
        n = cfg.numbers
        ref = HeisenbergPoint(n["x0"], n["y0"], n["t0"])
        s = sf.ImplicitSurface(cfg.expressions["f"], ref)
        axes = [np.linspace(c - 1.0, c + 1.0, max(2, int(round(side ** (2 / 3))))) for c in ref]
        X, Y, T = (a.ravel() for a in np.meshgrid(*axes, indexing="ij"))
        with np.errstate(all="ignore"):
            X, Y, T = s.project(X, Y, T, steps=30)
            ok = np.isfinite(X + Y + T) & (np.abs(s.value(X, Y, T)) <= sf.ON_SURFACE_TOL)
        X, Y, T = X[ok], Y[ok], T[ok]
        h = sf.horizontal_data_implicit(s, (X, Y, T))
        keep = ~h.characteristic
        skipped = int(np.sum(~keep))
        X, Y, T = X[keep], Y[keep], T[keep]
        res = np.abs(sf.mean_curvature(s, (X, Y, T))) if X.size else np.zeros(0)
        pts = np.stack([X, Y, T], axis=1)
        what = "|H|"
    elif cfg.kind == "intrinsic":
        g = sf.IntrinsicGraph(cfg.expressions["phi"])
        u, v = _rect(cfg, "umin", "umax", "vmin", "vmax").grid(side)
        res = np.abs(sf.minimality_residual(g, (u, v)))
        pts = np.stack([u, v], axis=1)
        what = "|B(B(phi))|"
    else:
        d, _ = build_strip(cfg, cfg.option("grid", args.grid))
        us = np.linspace(-2.0, 2.0, side)
        ss = np.linspace(d.J[0], d.J[1], side)
        U, S = (a.ravel() for a in np.meshgrid(us, ss, indexing="ij"))
        _, V = st.psi_map(d, U, S)
        res = np.abs(sf.minimality_residual(st.as_intrinsic_graph(d), (U, V)))
        pts = np.stack([U, V], axis=1)
        what = "|B(B(phi))|"

    if res.size == 0:
        raise NumericalFailure("no noncharacteristic sample points on the surface")
    i = int(np.argmax(res))
    worst = float(res[i])
    verdict = "PASS" if worst <= tol else "FAIL"
    print(f"kind: {cfg.kind}", file=out)
    print(f"samples: {res.size} (skipped {skipped} characteristic)", file=out)
    print(f"max {what} = {fmt(worst)} at ({', '.join(fmt(c) for c in pts[i])})", file=out)
    print(f"{verdict} (tolerance {fmt(tol)})", file=out)
    if args.csv:
        names = {"tgraph": ["x", "y"], "implicit": ["x", "y", "t"]}.get(cfg.kind, ["u", "v"])
        write_csv(args.csv, [*names, "residual"], [(*p, r) for p, r in zip(pts, res)])
    return EXIT_OK if verdict == "PASS" else EXIT_VERDICT


def cmd_strip(cfg: JobConfig, args, out) -> int:
    grid = cfg.option("grid", args.grid)
    d, notes = build_strip(cfg, grid, check=False)
    ss = d.grid_points(grid)
    F, G, S = d.values(ss)
    strict = st.strict_condition(d, ss)
    if d.seed is not None:
        seed_s = -ss if d.reflected else ss
        nc = st.seed_quantities(d.seed, seed_s)["noncharacteristic"]
    else:
        nc = np.full(ss.shape, np.nan)
    if args.csv:
        write_csv(args.csv, ["s", "F", "G", "sigma", "strict", "noncharacteristic"],
                  zip(ss, F, G, S, strict, nc))
    print(f"kind: {cfg.kind}", file=out)
    print(f"J = ({fmt(d.J[0])}, {fmt(d.J[1])})", file=out)
    for note in notes:
        print(note, file=out)
    worst = float(np.max(strict))
    print(f"max F'^2 - 2 sigma' G' = {fmt(worst)}", file=out)
    if worst < 0:
        print("strict: yes", file=out)
        return EXIT_OK
    if np.all(strict == 0):
        print("not strict: F'^2 - 2 sigma' G' = 0 identically on J", file=out)
    else:
        print("not strict: F'^2 - 2 sigma' G' >= 0 somewhere on J", file=out)
    return EXIT_VERDICT


def _k_values(text) -> list[float]:
    if text is None:
        return [64]
    try:
        ks = [float(x) for x in str(text).split(",")]
    except ValueError:
        raise UsageError("--k expects a number or a comma-separated list") from None
    if not all(k > 0 and math.isfinite(k) for k in ks):
        raise UsageError("--k values must be positive")
    return ks


def _bump(cfg, args, d) -> vr.BumpSpec:
    delta = cfg.option("delta", args.delta)
    delta = _default_delta(d) if delta is None else delta
    if not 0 < 2 * delta <= 0.5 * d.width * 0.99 * (1 + 1e-12):
        raise UsageError(f"delta = {delta!r} must satisfy 0 < 2*delta <= |J|/2*0.99 = {0.5 * d.width * 0.99!r}")
    return vr.BumpSpec(delta)


def cmd_second_variation(cfg: JobConfig, args, out) -> int:
    d, notes = build_strip(cfg, cfg.option("grid", args.grid))
    b = _bump(cfg, args, d)
    ks = _k_values(args.k if args.k is not None else cfg.options.get("k"))
    for note in notes:
        print(note, file=out)
    print(f"delta = {fmt(b.delta)}", file=out)
    rows = []
    for k in ks:
        r = vr.second_variation_strip(d, vr.TestFunctionPsiK(d, b, k))
        rows.append((k, r.term1, r.term2, r.total, r.limit_prediction, r.verdict))
        print(
            f"k={fmt(k)} term1={fmt(r.term1)} term2={fmt(r.term2)} total={fmt(r.total)} "
            f"limit={fmt(r.limit_prediction)} verdict={r.verdict}",
            file=out,
        )
    if args.csv:
        write_csv(args.csv, ["k", "term1", "term2", "total", "limit", "verdict"], rows)
    return EXIT_OK


def cmd_instability_search(cfg: JobConfig, args, out) -> int:
    d, notes = build_strip(cfg, cfg.option("grid", args.grid))
    b = _bump(cfg, args, d)
    kmax = int(cfg.option("kmax", args.kmax))
    for note in notes:
        print(note, file=out)
    res = vr.instability_search(d, b, kmax)
    print(f"delta = {fmt(b.delta)} limit = {fmt(res.limit)}", file=out)
    for r in res.reports:
        print(f"k={fmt(r.k)} total={fmt(r.total)} verdict={r.verdict}", file=out)
    if args.csv:
        write_csv(args.csv, ["k", "term1", "term2", "total", "limit"],
                  [(r.k, r.term1, r.term2, r.total, res.limit) for r in res.reports])
    if res.found:
        rep = next(r for r in res.reports if r.k == res.k_star)
        print(f"UNSTABLE k={int(res.k_star)} V={fmt(rep.total)}", file=out)
    else:
        print("NO-WITNESS", file=out)
    return EXIT_OK


def cmd_generic_search(cfg: JobConfig, args, out) -> int:
    n = int(args.grid) if args.grid is not None else 16
    if cfg.kind == "intrinsic":
        g = sf.IntrinsicGraph(cfg.expressions["phi"])
        if args.region:
            region = sf.Rect(*_floats(args.region, 4, "--region"))
        else:
            region = _rect(cfg, "umin", "umax", "vmin", "vmax")
    elif cfg.kind in STRIP_KINDS:
        d, _ = build_strip(cfg, cfg.option("grid", None))
        g = st.as_intrinsic_graph(d)
        u0, u1 = _floats(args.region, 2, "--region") if args.region else (-4.0, 4.0)
        region = st.StripPatch(d, u0, u1, d.J[0], d.J[1])
    else:
        raise UsageError(f"generic-search needs an intrinsic or strip-like config, got type {cfg.kind}")
    res = vr.generic_instability_search(g, region, n=n)
    print(f"basis: {n}x{n} cubic B-splines", file=out)
    print(f"minimum eigenvalue = {fmt(res.minimum)}", file=out)
    print(f"L2 Rayleigh minimum = {fmt(res.rayleigh_l2)}", file=out)
    print(f"Gram condition number = {fmt(res.gram_condition)}", file=out)
    if args.csv:
        write_csv(args.csv, ["i", "j", "coefficient"],
                  [(i, j, res.coefficients[i, j]) for i in range(n) for j in range(n)])
    if res.verdict == vr.UNSTABLE:
        print(f"UNSTABLE basis={n}x{n} V={fmt(res.minimum)}", file=out)
    else:
        print("NO-WITNESS", file=out)
    return EXIT_OK


def cmd_trace(cfg: JobConfig, args, out) -> int:
    if cfg.kind != "tgraph":
        raise UsageError(f"trace needs a tgraph config, got type {cfg.kind}")
    s = sf.TGraph(cfg.expressions["g"], _rect(cfg, "xmin", "xmax", "ymin", "ymax"))
    start = _floats(args.start, 2, "--start") if args.start else (
        0.5 * (s.domain.xmin + s.domain.xmax), 0.5 * (s.domain.ymin + s.domain.ymax))
    span = args.span if args.span is not None else 1.0
    tol = cfg.option("tol", args.tol)
    warning = None
    try:
        trace = sf.seed_from_tgraph(s, start, span)
    except TraceError as exc:
        trace, warning = exc.partial, str(exc)

    rows = []
    worst = 0.0
    if trace is not None:
        rs = np.linspace(-1.0, 1.0, 21)
        for i in range(0, len(trace.s), TRACE_STRIDE):
            g = trace.gamma[i]
            try:
                line = sf.rule_line_through(s, g, tol=max(tol, 1e-8))
                res = float(np.max(np.abs(line.residual(rs))))
                a, b = line.direction
                slope = line.t_slope
            except (CharacteristicPointError, NotMinimalError) as exc:
                warning = warning or f"no rule line at s = {fmt(trace.s[i])}: {exc}"
                a = b = slope = res = float("nan")
            worst = max(worst, res) if np.isfinite(res) else worst
            rows.append((trace.s[i], g[0], g[1], trace.h0[i], trace.speed[i], a, b, slope, res))
    if args.csv:
        write_csv(args.csv, ["s", "gamma1", "gamma2", "h0", "speed", "dir_a", "dir_b", "t_slope", "residual"], rows)
    print(f"samples: {len(rows)}", file=out)
    if trace is not None:
        print(f"max ||gamma'| - 1| = {fmt(np.max(np.abs(trace.speed - 1.0)))}", file=out)
        print(f"max rule-line residual = {fmt(worst)}", file=out)
        if np.isfinite(trace.richardson_error):
            print(f"Richardson error estimate = {fmt(trace.richardson_error)}", file=out)
    if warning:
        print(f"warning: {warning}", file=sys.stderr)
        if out is not sys.stdout:
            print(f"warning: {warning}", file=out)
    return EXIT_OK


COMMANDS = {
    "check-minimal": cmd_check_minimal,
    "strip": cmd_strip,
    "second-variation": cmd_second_variation,
    "instability-search": cmd_instability_search,
    "generic-search": cmd_generic_search,
    "trace": cmd_trace,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="h1minimal", description="Minimal surfaces in the Heisenberg group H1.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("config", help="path to a key = value configuration file")
    p.add_argument("--tol", type=float, help="pass/fail tolerance (default 1e-8)")
    p.add_argument("--grid", type=int, help="sample count (default 1024); basis size per axis for generic-search (default 16)")
    p.add_argument("--delta", type=float, help="cutoff width delta (default |J|/4*0.99)")
    p.add_argument("--k", help="k value or comma-separated list for second-variation (default 64)")
    p.add_argument("--kmax", type=int, help="largest k for instability-search (default 256)")
    p.add_argument("--start", help="trace start point x,y (default: domain center)")
    p.add_argument("--span", type=float, help="trace arclength (default 1)")
    p.add_argument("--region", help="generic-search region: umin,umax,vmin,vmax or u0,u1 for strips")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--csv", help="write CSV data here")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        with _report_stream(args.out) as out:
            return COMMANDS[args.command](cfg, args, out)
    except (ConfigError, UsageError, ExprSyntaxError, EvalDomainError, UnboundVariableError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NotStrictError, NotMinimalError, InjectivityError) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_VERDICT
    except (NumericalFailure, OutOfDomainError, CharacteristicPointError, H1Error, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
