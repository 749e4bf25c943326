"""The first Heisenberg group: points, group law, dilations and the
left-invariant frame ``X1 = d/dx - (y/2) d/dt``, ``X2 = d/dy + (x/2) d/dt``,
``T = d/dt``.

All functions accept NumPy arrays in the coordinate fields and broadcast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class HeisenbergPoint:
    x: float
    y: float
    t: float

    def __iter__(self):
        yield self.x
        yield self.y
        yield self.t

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.t], dtype=float)

    def __matmul__(self, other: "HeisenbergPoint") -> "HeisenbergPoint":
        return group_mul(self, other)


@dataclass(frozen=True)
class FrameCoefficients:
    """Components of a tangent vector in the frame {X1, X2, T}."""

    a: float
    b: float
    c: float

    def __iter__(self):
        yield self.a
        yield self.b
        yield self.c


IDENTITY = HeisenbergPoint(0.0, 0.0, 0.0)


def group_mul(g: HeisenbergPoint, h: HeisenbergPoint) -> HeisenbergPoint:
    return HeisenbergPoint(
        g.x + h.x,
        g.y + h.y,
        g.t + h.t + 0.5 * (g.x * h.y - h.x * g.y),
    )


def group_inv(g: HeisenbergPoint) -> HeisenbergPoint:
    return HeisenbergPoint(-g.x, -g.y, -g.t)


def dilate(lam: float, g: HeisenbergPoint) -> HeisenbergPoint:
    if not np.all(np.asarray(lam) > 0):
        raise ValueError(f"dilation factor must be positive, got {lam!r}")
    return HeisenbergPoint(lam * g.x, lam * g.y, lam * lam * g.t)


def frame_to_cartesian(coeffs: FrameCoefficients, base: HeisenbergPoint) -> np.ndarray:
    """Cartesian components of ``a X1 + b X2 + c T`` at ``base``."""
    a, b, c = coeffs
    return np.array([a, b, c + 0.5 * (b * base.x - a * base.y)])


def cartesian_to_frame(v, base: HeisenbergPoint) -> FrameCoefficients:
    v1, v2, v3 = v
    return FrameCoefficients(v1, v2, v3 - 0.5 * (v2 * base.x - v1 * base.y))
