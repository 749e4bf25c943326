"""Truncated Taylor series ("jets") for forward-mode differentiation.

A :class:`Jet` of order ``n`` stores the Taylor coefficients
``c[0], ..., c[n]`` of a function of one seeded parameter ``h`` around
``h = 0``, so that ``c[k] = f^(k)(0) / k!``.  Coefficients may be NumPy
arrays; every operation broadcasts over them.

Order 2 is what the expression language exposes as a dual number; order 3
is used for seed curves, whose strips need third derivatives of the curve.
"""

from __future__ import annotations

import math

import numpy as np


class Jet:
    __slots__ = ("c",)
    __array_priority__ = 1000

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=float)
        if self.c.ndim == 0:
            raise ValueError("a jet needs at least one coefficient")

    # -- construction -----------------------------------------------------
    @classmethod
    def variable(cls, x, order: int, direction: float = 1.0) -> "Jet":
        x = np.asarray(x, dtype=float)
        c = np.zeros((order + 1,) + x.shape)
        c[0] = x
        if order >= 1:
            c[1] = direction
        return cls(c)

    @classmethod
    def constant(cls, x, order: int) -> "Jet":
        x = np.asarray(x, dtype=float)
        c = np.zeros((order + 1,) + x.shape)
        c[0] = x
        return cls(c)

    # -- inspection -------------------------------------------------------
    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @property
    def value(self):
        return self.c[0]

    def derivative(self, k: int = 1):
        """The k-th derivative with respect to the seed, ``k! c[k]``."""
        return math.factorial(k) * self.c[k]

    def diff(self) -> "Jet":
        """Jet of the derivative; the order drops by one."""
        k = np.arange(1, self.order + 1).reshape((-1,) + (1,) * (self.c.ndim - 1))
        return Jet(self.c[1:] * k)

    def integrate(self, constant) -> "Jet":
        """Jet of an antiderivative taking the value ``constant`` at h = 0."""
        k = np.arange(1, self.order + 2).reshape((-1,) + (1,) * (self.c.ndim - 1))
        head = np.broadcast_to(np.asarray(constant, dtype=float), self.c.shape[1:])
        return Jet(np.concatenate([head[None], self.c / k]))

    def truncate(self, order: int) -> "Jet":
        return Jet(self.c[: order + 1])

    def reflect(self) -> "Jet":
        """Jet of ``h -> f(-h)``."""
        sign = (-1.0) ** np.arange(self.order + 1)
        return Jet(self.c * sign.reshape((-1,) + (1,) * (self.c.ndim - 1)))

    def __repr__(self) -> str:
        return f"Jet({self.c.tolist()!r})"

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError("cannot combine jets of different order")
            return other
        return Jet.constant(other, self.order)

    def __neg__(self):
        return Jet(-self.c)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.c + self._coerce(other).c)
        return Jet(self.c + _const_like(other, self.c))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            return Jet(_mul(self.c, self._coerce(other).c))
        return Jet(self.c * np.asarray(other, dtype=float))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return Jet(_div(self.c, self._coerce(other).c))
        return Jet(self.c / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return Jet(_div(_const_like(other, self.c), self.c))

    def __pow__(self, exponent):
        return power(self, exponent)

    def __rpow__(self, base):
        return exp(self * np.log(np.asarray(base, dtype=float)))


def _const_like(x, like: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    shape = np.broadcast_shapes(x.shape, like.shape[1:])
    c = np.zeros((like.shape[0],) + shape)
    c[0] = x
    return c


def _mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    out = np.zeros((n,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
    for k in range(n):
        for j in range(k + 1):
            out[k] += a[j] * b[k - j]
    return out


def _div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    out = np.zeros((n,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
    for k in range(n):
        acc = a[k] - sum((b[j] * out[k - j] for j in range(1, k + 1)), 0.0)
        out[k] = acc / b[0]
    return out


def _series(x):
    return x.c if isinstance(x, Jet) else None


# Elementary functions.  Each accepts a Jet or a plain float/array; plain
# inputs go straight to NumPy.

def exp(x):
    a = _series(x)
    if a is None:
        return np.exp(x)
    n = a.shape[0]
    e = np.zeros_like(a)
    e[0] = np.exp(a[0])
    for k in range(1, n):
        e[k] = sum(j * a[j] * e[k - j] for j in range(1, k + 1)) / k
    return Jet(e)


def log(x):
    a = _series(x)
    if a is None:
        return np.log(x)
    n = a.shape[0]
    out = np.zeros_like(a)
    out[0] = np.log(a[0])
    for k in range(1, n):
        acc = a[k] - sum(j * out[j] * a[k - j] for j in range(1, k)) / k
        out[k] = acc / a[0]
    return Jet(out)


def _sincos(a: np.ndarray):
    n = a.shape[0]
    s = np.zeros_like(a)
    c = np.zeros_like(a)
    s[0] = np.sin(a[0])
    c[0] = np.cos(a[0])
    for k in range(1, n):
        s[k] = sum(j * a[j] * c[k - j] for j in range(1, k + 1)) / k
        c[k] = -sum(j * a[j] * s[k - j] for j in range(1, k + 1)) / k
    return s, c


def sin(x):
    a = _series(x)
    if a is None:
        return np.sin(x)
    return Jet(_sincos(a)[0])


def cos(x):
    a = _series(x)
    if a is None:
        return np.cos(x)
    return Jet(_sincos(a)[1])


def tan(x):
    a = _series(x)
    if a is None:
        return np.tan(x)
    s, c = _sincos(a)
    return Jet(_div(s, c))


def sec(x):
    a = _series(x)
    if a is None:
        return 1.0 / np.cos(x)
    _, c = _sincos(a)
    return Jet(_div(_const_like(1.0, c), c))


def csc(x):
    a = _series(x)
    if a is None:
        return 1.0 / np.sin(x)
    s, _ = _sincos(a)
    return Jet(_div(_const_like(1.0, s), s))


def cot(x):
    a = _series(x)
    if a is None:
        return np.cos(x) / np.sin(x)
    s, c = _sincos(a)
    return Jet(_div(c, s))


def tanh(x):
    a = _series(x)
    if a is None:
        return np.tanh(x)
    # t' = (1 - t^2) a'
    n = a.shape[0]
    t = np.zeros_like(a)
    w = np.zeros_like(a)
    t[0] = np.tanh(a[0])
    w[0] = 1.0 - t[0] * t[0]
    for k in range(1, n):
        t[k] = sum(j * a[j] * w[k - j] for j in range(1, k + 1)) / k
        w[k] = -sum(t[i] * t[k - i] for i in range(k + 1))
    return Jet(t)


def atan(x):
    a = _series(x)
    if a is None:
        return np.arctan(x)
    # t' (1 + a^2) = a'
    n = a.shape[0]
    b = _mul(a, a)
    b[0] = b[0] + 1.0
    t = np.zeros_like(a)
    t[0] = np.arctan(a[0])
    for k in range(1, n):
        acc = k * a[k] - sum(j * t[j] * b[k - j] for j in range(1, k))
        t[k] = acc / (k * b[0])
    return Jet(t)


def sqrt(x):
    a = _series(x)
    if a is None:
        return np.sqrt(x)
    return _real_power(x, 0.5)


def fabs(x):
    a = _series(x)
    if a is None:
        return np.abs(x)
    return Jet(a * np.sign(a[0]))


def _real_power(x: Jet, r) -> Jet:
    # p' a = r a' p, valid for a[0] != 0
    a = x.c
    n = a.shape[0]
    r = np.asarray(r, dtype=float)
    p = np.zeros((n,) + np.broadcast_shapes(a.shape[1:], r.shape))
    p[0] = np.power(a[0], r)
    for k in range(1, n):
        acc = sum(((r + 1.0) * j - k) * a[j] * p[k - j] for j in range(1, k + 1))
        p[k] = acc / (k * a[0])
    return Jet(p)


def _int_power(x: Jet, n: int) -> Jet:
    if n < 0:
        return Jet.constant(1.0, x.order) / _int_power(x, -n)
    result = Jet.constant(np.ones(x.c.shape[1:]), x.order)
    base = x
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def power(x, r):
    """``x ** r`` for jets or plain values; integer constant exponents are exact."""
    if not isinstance(x, Jet) and not isinstance(r, Jet):
        return np.power(np.asarray(x, dtype=float), r)
    if isinstance(r, Jet):
        if not isinstance(x, Jet):
            return exp(r * np.log(np.asarray(x, dtype=float)))
        return exp(r * log(x))
    if np.ndim(r) == 0 and float(r).is_integer() and abs(r) <= 64:
        return _int_power(x, int(r))
    return _real_power(x, r)
