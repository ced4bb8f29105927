"""Quaternion scalars and vectorised quaternion arithmetic.

Scalars are the frozen `Quaternion` dataclass. Arrays of quaternions are
plain numpy arrays whose last axis has length 4 and holds (r, i, j, k).
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np


class DivisionByZero(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class Quaternion:
    r: float = 0.0
    i: float = 0.0
    j: float = 0.0
    k: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        a = np.asarray(a, dtype=float)
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def to_array(self) -> np.ndarray:
        return np.array([self.r, self.i, self.j, self.k], dtype=float)

    def tolist(self) -> list:
        return [self.r, self.i, self.j, self.k]

    def __add__(self, other):
        other = _coerce(other)
        return Quaternion(self.r + other.r, self.i + other.i, self.j + other.j, self.k + other.k)

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(-self.r, -self.i, -self.j, -self.k)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        return qmul(self, _coerce(other))

    def __rmul__(self, other):
        return qmul(_coerce(other), self)

    def __truediv__(self, s):
        if isinstance(s, Quaternion):
            return qmul(self, inv(s))
        return Quaternion(self.r / s, self.i / s, self.j / s, self.k / s)

    def conj(self) -> "Quaternion":
        return conj(self)

    def norm(self) -> float:
        return norm(self)

    def close(self, other, tol: float = 1e-12) -> bool:
        other = _coerce(other)
        return max(abs(self.r - other.r), abs(self.i - other.i),
                   abs(self.j - other.j), abs(self.k - other.k)) <= tol


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def _coerce(x) -> Quaternion:
    if isinstance(x, Quaternion):
        return x
    if isinstance(x, complex):
        return Quaternion(x.real, x.imag)
    return Quaternion(x)


def qmul(p: Quaternion, q: Quaternion) -> Quaternion:
    a, b, c, d = p.r, p.i, p.j, p.k
    e, f, g, h = q.r, q.i, q.j, q.k
    return Quaternion(
        a * e - b * f - c * g - d * h,
        a * f + b * e + c * h - d * g,
        a * g - b * h + c * e + d * f,
        a * h + b * g - c * f + d * e,
    )


def conj(q: Quaternion) -> Quaternion:
    return Quaternion(q.r, -q.i, -q.j, -q.k)


def norm(q: Quaternion) -> float:
    return math.sqrt(q.r * q.r + q.i * q.i + q.j * q.j + q.k * q.k)


def inv(q: Quaternion) -> Quaternion:
    n2 = q.r * q.r + q.i * q.i + q.j * q.j + q.k * q.k
    if n2 == 0:
        raise DivisionByZero("inverse of the zero quaternion")
    return Quaternion(q.r / n2, -q.i / n2, -q.j / n2, -q.k / n2)


def re(q: Quaternion) -> float:
    return q.r


# Each automorphism as a signed permutation of (i, j, k).
_AUTOMORPHISMS = {
    "ij": lambda q: Quaternion(q.r, -q.i, -q.j, q.k),
    "ik": lambda q: Quaternion(q.r, -q.i, q.j, -q.k),
    "jk": lambda q: Quaternion(q.r, q.i, -q.j, -q.k),
    # i -> j -> k -> i
    "cycle": lambda q: Quaternion(q.r, q.k, q.i, q.j),
}


def automorphism(which: str, q: Quaternion) -> Quaternion:
    try:
        return _AUTOMORPHISMS[which](q)
    except KeyError:
        raise ValueError(f"unknown automorphism {which!r}") from None


# ---------------------------------------------------------------------------
# array versions (last axis = 4)

def amul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise Hamilton product of two broadcastable quaternion arrays."""
    a = np.asarray(a)
    b = np.asarray(b)
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack([
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ], axis=-1)


def aconj(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1
    return out


def anorm2(a: np.ndarray) -> np.ndarray:
    return np.sum(np.asarray(a) ** 2, axis=-1)


def ainv(a: np.ndarray) -> np.ndarray:
    n2 = anorm2(a)
    if np.any(n2 == 0):
        raise DivisionByZero("inverse of the zero quaternion")
    return aconj(a) / n2[..., None]


def scalar(x) -> np.ndarray:
    """Quaternion array holding a real, complex or Quaternion scalar."""
    q = _coerce(x)
    return q.to_array()
