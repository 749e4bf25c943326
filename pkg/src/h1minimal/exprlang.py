"""A small expression language for curves and surfaces.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := atom ('^' factor)?
    atom   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' factor

Unary minus takes a whole ``factor``, so ``-x^2`` means ``-(x^2)``.  The
constant ``pi`` is predefined.  Evaluation works on floats, NumPy arrays and
:class:`~h1minimal.jets.Jet` values, which gives exact forward-mode
derivatives through :func:`eval_dual` and :func:`eval_jet`.

>>> e = parse("x*y/2")
>>> evaluate(e, {"x": 3.0, "y": 4.0})
6.0
>>> eval_dual(parse("s*s"), {"s": 3.0}, "s")
DualNumber(value=9.0, first=6.0, second=2.0)
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from . import jets
from .errors import EvalDomainError, ExprSyntaxError, UnboundVariableError
from .jets import Jet

MAX_DEPTH = 200

CONSTANTS = {"pi": math.pi}

FUNCTIONS: dict[str, Callable] = {
    "sin": jets.sin,
    "cos": jets.cos,
    "tan": jets.tan,
    "sec": jets.sec,
    "cot": jets.cot,
    "csc": jets.csc,
    "exp": jets.exp,
    "ln": jets.log,
    "sqrt": jets.sqrt,
    "tanh": jets.tanh,
    "atan": jets.atan,
    "abs": jets.fabs,
}


# ---------------------------------------------------------------------------
# AST


def _value(x):
    return x.c[0] if isinstance(x, Jet) else x


def _any(mask) -> bool:
    return bool(np.any(mask))


class Node:
    def evaluate(self, env):
        raise NotImplementedError

    def variables(self) -> set[str]:
        return set()


@dataclass(frozen=True)
class Num(Node):
    value: float

    def evaluate(self, env):
        return self.value

    def __str__(self) -> str:
        text = repr(float(self.value))
        return f"({text})" if self.value < 0 else text


@dataclass(frozen=True)
class Const(Node):
    name: str

    def evaluate(self, env):
        return CONSTANTS[self.name]

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Var(Node):
    name: str

    def evaluate(self, env):
        try:
            return env[self.name]
        except KeyError:
            raise UnboundVariableError(f"variable '{self.name}' is not bound") from None

    def variables(self) -> set[str]:
        return {self.name}

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Neg(Node):
    operand: Node

    def evaluate(self, env):
        return -self.operand.evaluate(env)

    def variables(self) -> set[str]:
        return self.operand.variables()

    def __str__(self) -> str:
        return f"(-{self.operand})"


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def evaluate(self, env):
        a = self.left.evaluate(env)
        b = self.right.evaluate(env)
        op = self.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if _any(_value(b) == 0):
                raise EvalDomainError("division by zero", str(self))
            if isinstance(a, Jet) or isinstance(b, Jet):
                return a / b
            return np.divide(a, b)
        return self._power(a, b)

    def _power(self, a, b):
        base = _value(a)
        if isinstance(b, Jet):
            if _any(np.asarray(base) <= 0):
                raise EvalDomainError("power with variable exponent needs a positive base", str(self))
            return jets.power(a, b)
        integral = np.all(np.mod(b, 1.0) == 0)
        if not integral and _any(np.asarray(base) < 0):
            raise EvalDomainError("non-integer power of a negative number", str(self))
        if _any((np.asarray(base) == 0) & (np.asarray(b) < 0)):
            raise EvalDomainError("division by zero", str(self))
        if isinstance(a, Jet) and not (np.ndim(b) == 0 and integral) and _any(np.asarray(base) == 0):
            raise EvalDomainError("derivative of a fractional power at zero", str(self))
        return jets.power(a, b)

    def variables(self) -> set[str]:
        return self.left.variables() | self.right.variables()

    def __str__(self) -> str:
        return f"({self.left} {self.op} {self.right})"


_DOMAIN_CHECKS: dict[str, tuple[Callable, str]] = {
    "ln": (lambda v: v <= 0, "logarithm of a nonpositive number"),
    "sqrt": (lambda v: v < 0, "square root of a negative number"),
    "sec": (lambda v: np.cos(v) == 0, "division by zero"),
    "tan": (lambda v: np.cos(v) == 0, "division by zero"),
    "csc": (lambda v: np.sin(v) == 0, "division by zero"),
    "cot": (lambda v: np.sin(v) == 0, "division by zero"),
}


@dataclass(frozen=True)
class Call(Node):
    func: str
    arg: Node

    def evaluate(self, env):
        x = self.arg.evaluate(env)
        check = _DOMAIN_CHECKS.get(self.func)
        if check is not None and _any(check[0](_value(x))):
            raise EvalDomainError(check[1], str(self))
        if self.func == "sqrt" and isinstance(x, Jet) and _any(_value(x) == 0):
            raise EvalDomainError("derivative of sqrt at zero", str(self))
        return FUNCTIONS[self.func](x)

    def variables(self) -> set[str]:
        return self.arg.variables()

    def __str__(self) -> str:
        return f"{self.func}({self.arg})"


# ---------------------------------------------------------------------------
# Parser

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int  # byte offset


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    byte = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", byte, text)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            tokens.append(_Token(kind if kind != "op" else chunk, chunk, byte))
        byte += len(chunk.encode("utf-8"))
        pos = m.end()
    tokens.append(_Token("end", "", byte))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: frozenset[str] | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.depth = 0
        self.variables = variables

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(f"{message}, found {found}", tok.offset, self.text)

    def expect(self, kind: str):
        if self.tok.kind != kind:
            self.error(f"expected {kind!r}")
        self.i += 1

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self.error("expected operator or end of input")
        return node

    def expr(self) -> Node:
        self.depth += 1
        if self.depth > MAX_DEPTH:
            self.error("expression nested too deeply")
        node = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.tok.kind
            self.i += 1
            node = BinOp(op, node, self.term())
        self.depth -= 1
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok.kind in ("*", "/"):
            op = self.tok.kind
            self.i += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        self.depth += 1
        if self.depth > MAX_DEPTH:
            self.error("expression nested too deeply")
        node = self.atom()
        if self.tok.kind == "^":
            self.i += 1
            node = BinOp("^", node, self.factor())
        self.depth -= 1
        return node

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "number":
            self.i += 1
            value = float(tok.text)
            if not math.isfinite(value):
                self.error("number out of range", tok)
            return Num(value)
        if tok.kind == "-":
            self.i += 1
            return Neg(self.factor())
        if tok.kind == "(":
            self.i += 1
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "ident":
            self.i += 1
            name = tok.text
            if self.tok.kind == "(":
                if name not in FUNCTIONS:
                    self.error(f"unknown function {name!r}", tok)
                self.i += 1
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            if name in FUNCTIONS:
                self.error(f"function {name!r} needs an argument in parentheses")
            if name in CONSTANTS:
                return Const(name)
            if self.variables is not None and name not in self.variables:
                allowed = ", ".join(sorted(self.variables)) or "none"
                self.error(f"unknown identifier {name!r} (declared variables: {allowed})", tok)
            return Var(name)
        self.error("expected number, identifier, '(' or '-'")


# ---------------------------------------------------------------------------
# Public API


@dataclass(frozen=True)
class DualNumber:
    """Value with first and second derivative along one seeded variable."""

    value: float
    first: float
    second: float


class Expression:
    """A parsed expression.  ``str(e)`` prints a fully parenthesized form
    that parses back to an equivalent tree."""

    __slots__ = ("root", "source")

    def __init__(self, root: Node, source: str = ""):
        self.root = root
        self.source = source

    @property
    def variables(self) -> set[str]:
        return self.root.variables()

    def __str__(self) -> str:
        return str(self.root)

    def __repr__(self) -> str:
        return f"Expression({self.source or str(self)!r})"

    def __call__(self, **bindings):
        return evaluate(self, bindings)

    def is_constant(self) -> bool:
        return not self.variables


def parse(text: str, variables=None) -> Expression:
    """Parse ``text``; if ``variables`` is given, other identifiers are errors."""
    declared = None if variables is None else frozenset(variables)
    return Expression(_Parser(text, declared).parse(), text)


def _as_expression(e) -> Expression:
    return e if isinstance(e, Expression) else parse(e)


def evaluate(e: Expression | str, bindings: Mapping[str, float]):
    e = _as_expression(e)
    env = {k: (np.asarray(v, dtype=float) if np.ndim(v) else float(v)) for k, v in bindings.items()}
    result = e.root.evaluate(env)
    if isinstance(result, np.ndarray) and result.ndim == 0:
        return float(result)
    if isinstance(result, (np.floating, int)):
        return float(result)
    return result


def eval_jet(
    e: Expression | str,
    bindings: Mapping[str, float],
    seed: str | Mapping[str, float],
    order: int = 2,
) -> Jet:
    """Taylor jet of ``e`` along a seeded direction.

    ``seed`` is a variable name or a mapping ``name -> direction component``
    (for mixed partials: ``{"x": 1, "y": 1}`` gives ``d/dx + d/dy``).
    """
    e = _as_expression(e)
    directions = {seed: 1.0} if isinstance(seed, str) else dict(seed)
    env = {}
    for name, value in bindings.items():
        value = np.asarray(value, dtype=float) if np.ndim(value) else float(value)
        if directions.get(name, 0.0) != 0.0:
            env[name] = Jet.variable(value, order, directions[name])
        else:
            env[name] = value
    for name in directions:
        if name not in bindings:
            raise UnboundVariableError(f"seed variable '{name}' is not bound")
    result = e.root.evaluate(env)
    if not isinstance(result, Jet):
        result = Jet.constant(result, order)
    return result


def eval_dual(e: Expression | str, bindings: Mapping[str, float], seed: str) -> DualNumber:
    jet = eval_jet(e, bindings, seed, order=2)
    value, first, second = jet.c[0], jet.c[1], 2.0 * jet.c[2]
    if np.ndim(value) == 0:
        return DualNumber(float(value), float(first), float(second))
    return DualNumber(value, first, second)


def compile_scalar(e: Expression | str, variable: str):
    """Return ``f(x)`` evaluating ``e`` as a function of one variable."""
    e = _as_expression(e)

    def f(x):
        return evaluate(e, {variable: x})

    return f
