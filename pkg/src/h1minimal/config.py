"""Job configuration files.

One object per file, as ``key = value`` lines; ``#`` starts a comment.
``type`` selects the kind.  Expressions are quoted strings; numbers may be
bare literals or quoted constant expressions such as ``"pi/2 - 0.3"``.

=========  ==============================================  =================
kind       required keys                                   variables
=========  ==============================================  =================
tgraph     g, xmin, xmax, ymin, ymax                       x, y
implicit   f, x0, y0, t0                                   x, y, t
intrinsic  phi, umin, umax, vmin, vmax                     u, v
seed       gamma1, gamma2, h0, smin, smax                  s
strip      F, G, sigma, smin, smax                         s
catenoid   epsilon (optional, default 0.1)                 -
=========  ==============================================  =================

Any kind may also set the numeric options ``tol``, ``grid``, ``delta``,
``kmax`` and ``k``; command-line flags override them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import H1Error
from .exprlang import Expression, evaluate, parse

DEFAULTS = {
    "tol": 1e-8,
    "grid": 1024,
    "kmax": 256,
    "epsilon": 0.1,
}

KINDS = {
    "tgraph": ({"g": ("x", "y")}, ("xmin", "xmax", "ymin", "ymax")),
    "implicit": ({"f": ("x", "y", "t")}, ("x0", "y0", "t0")),
    "intrinsic": ({"phi": ("u", "v")}, ("umin", "umax", "vmin", "vmax")),
    "seed": ({"gamma1": ("s",), "gamma2": ("s",), "h0": ("s",)}, ("smin", "smax")),
    "strip": ({"F": ("s",), "G": ("s",), "sigma": ("s",)}, ("smin", "smax")),
    "catenoid": ({}, ()),
}

OPTIONS = ("tol", "grid", "delta", "kmax", "k", "epsilon")
INTEGER_OPTIONS = ("grid", "kmax")


class ConfigError(H1Error):
    """Malformed or incomplete configuration."""


@dataclass(frozen=True)
class JobConfig:
    kind: str
    expressions: dict = field(default_factory=dict)
    numbers: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    source: str = ""

    def option(self, name: str, override=None):
        if override is not None:
            return override
        if name in self.options:
            return self.options[name]
        return DEFAULTS.get(name)

    def interval(self, lo: str, hi: str) -> tuple[float, float]:
        return self.numbers[lo], self.numbers[hi]


def _unquote(raw: str, lineno: int) -> tuple[str, bool]:
    raw = raw.strip()
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
        return raw[1:-1], True
    if raw[:1] in "\"'":
        raise ConfigError(f"line {lineno}: unterminated string")
    return raw, False


def _number(text: str, key: str, lineno: int) -> float:
    try:
        value = evaluate(parse(text, ()), {})
    except H1Error as exc:
        raise ConfigError(f"line {lineno}: {key}: {exc}") from None
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"line {lineno}: {key} is not finite")
    return value


def parse_config(text: str, source: str = "") -> JobConfig:
    raw: dict[str, tuple[str, bool, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        # allow trailing comments after unquoted values
        if value.strip()[:1] not in "\"'" and "#" in value:
            value = value.split("#", 1)[0]
        elif value.strip()[:1] in "\"'":
            q = value.strip()[0]
            body = value.strip()
            end = body.find(q, 1)
            if end > 0:
                value = body[: end + 1]
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        text_value, quoted = _unquote(value, lineno)
        raw[key] = (text_value, quoted, lineno)

    if "type" not in raw:
        raise ConfigError("missing 'type' key")
    kind = raw.pop("type")[0].strip()
    if kind not in KINDS:
        raise ConfigError(f"unknown type '{kind}' (expected one of {', '.join(KINDS)})")
    expr_keys, num_keys = KINDS[kind]

    expressions: dict[str, Expression] = {}
    numbers: dict[str, float] = {}
    options: dict[str, float] = {}
    for key, (value, _, lineno) in raw.items():
        if key in expr_keys:
            try:
                expressions[key] = parse(value, expr_keys[key])
            except H1Error as exc:
                raise ConfigError(f"line {lineno}: {key}: {exc}") from None
        elif key in num_keys:
            numbers[key] = _number(value, key, lineno)
        elif key in OPTIONS:
            v = _number(value, key, lineno)
            if key in INTEGER_OPTIONS:
                if v != int(v) or v < 1:
                    raise ConfigError(f"line {lineno}: {key} must be a positive integer")
                v = int(v)
            options[key] = v
        else:
            raise ConfigError(f"line {lineno}: unknown key '{key}' for type {kind}")

    missing = [k for k in (*expr_keys, *num_keys) if k not in expressions and k not in numbers]
    if missing:
        raise ConfigError(f"type {kind} is missing {', '.join(missing)}")
    for lo, hi in zip(num_keys[::2], num_keys[1::2]):
        if kind != "implicit" and not numbers[lo] < numbers[hi]:
            raise ConfigError(f"empty interval: {lo} = {numbers[lo]} is not below {hi} = {numbers[hi]}")
    return JobConfig(kind, expressions, numbers, options, source)


def load_config(path: str | Path) -> JobConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text, str(path))
