"""Vectors in Minkowski 4-space with signature (+, +, +, -)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVector

#: Absolute tolerance below which ``|<a, a>|`` counts as lightlike.
DEGENERACY_TOL = 1e-12

METRIC = np.diag([1.0, 1.0, 1.0, -1.0])


@dataclass(frozen=True)
class Vec4:
    """Point or vector of E^4_1; ``x4`` is the timelike coordinate."""

    x1: float
    x2: float
    x3: float
    x4: float

    def __post_init__(self):
        for name in ("x1", "x2", "x3", "x4"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise ValueError(f"Vec4.{name} is not finite: {val!r}")
            object.__setattr__(self, name, val)

    @classmethod
    def from_array(cls, arr) -> Vec4:
        a = np.asarray(arr, dtype=float).reshape(4)
        return cls(a[0], a[1], a[2], a[3])

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3, self.x4])

    def __iter__(self):
        yield self.x1
        yield self.x2
        yield self.x3
        yield self.x4

    def __add__(self, other: Vec4) -> Vec4:
        return Vec4(self.x1 + other.x1, self.x2 + other.x2,
                    self.x3 + other.x3, self.x4 + other.x4)

    def __sub__(self, other: Vec4) -> Vec4:
        return Vec4(self.x1 - other.x1, self.x2 - other.x2,
                    self.x3 - other.x3, self.x4 - other.x4)

    def __mul__(self, s: float) -> Vec4:
        return Vec4(s * self.x1, s * self.x2, s * self.x3, s * self.x4)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> Vec4:
        return Vec4(self.x1 / s, self.x2 / s, self.x3 / s, self.x4 / s)

    def __neg__(self) -> Vec4:
        return Vec4(-self.x1, -self.x2, -self.x3, -self.x4)


def minkowski_dot(a: Vec4, b: Vec4) -> float:
    """``a1 b1 + a2 b2 + a3 b3 - a4 b4``."""
    return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3 - a.x4 * b.x4


def minkowski_dot_array(a, b):
    """Same pairing over the last axis of broadcastable ``(..., 4)`` arrays."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2] - a[..., 3] * b[..., 3]


def causal_character(a: Vec4, tol: float = DEGENERACY_TOL) -> str:
    """Classify ``a`` as ``"spacelike"``, ``"timelike"`` or ``"lightlike"``.

    The tolerance is absolute; rescale near-null vectors before calling.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    q = minkowski_dot(a, a)
    if q > tol:
        return "spacelike"
    if q < -tol:
        return "timelike"
    return "lightlike"


def minkowski_normalize(a: Vec4, tol: float = DEGENERACY_TOL) -> Vec4:
    """Return ``a / sqrt(|<a, a>|)`` so that ``<r, r> = +-1``."""
    q = minkowski_dot(a, a)
    if abs(q) <= tol:
        raise DegenerateVector(f"cannot normalize near-null vector {tuple(a)} (<a,a>={q:.3e})")
    return a / math.sqrt(abs(q))
