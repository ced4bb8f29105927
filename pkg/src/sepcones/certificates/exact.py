"""Exact integer polynomials, determinants over commutative rings and an exact PSD test."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
import math


def _strip(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPoly:
    """Polynomial in one variable with integer coefficients, lowest degree first."""
    coeffs: tuple = ()

    def __post_init__(self):
        c = _strip(self.coeffs)
        if any(not isinstance(a, int) for a in c):
            raise TypeError("IntPoly coefficients must be int")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def const(cls, a: int) -> "IntPoly":
        return cls((a,))

    @classmethod
    def x(cls) -> "IntPoly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __add__(self, o):
        o = _as_poly(o)
        n = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = o.coeffs + (0,) * (n - len(o.coeffs))
        return IntPoly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return IntPoly(tuple(-a for a in self.coeffs))

    def __sub__(self, o):
        return self + (-_as_poly(o))

    def __rsub__(self, o):
        return _as_poly(o) - self

    def __mul__(self, o):
        o = _as_poly(o)
        if self.is_zero() or o.is_zero():
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(o.coeffs):
                out[i + j] += a * b
        return IntPoly(tuple(out))

    __rmul__ = __mul__

    def __call__(self, t):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * t + a
        return acc

    def content(self) -> int:
        return reduce(math.gcd, self.coeffs, 0)

    def primitive(self) -> "IntPoly":
        """Divide out the content and make the leading coefficient positive."""
        if self.is_zero():
            return self
        c = self.content() * (1 if self.lead > 0 else -1)
        return IntPoly(tuple(a // c for a in self.coeffs))

    def derivative(self) -> "IntPoly":
        return IntPoly(tuple(i * a for i, a in enumerate(self.coeffs))[1:])

    def pseudo_rem(self, d: "IntPoly") -> "IntPoly":
        """lead(d)^k * self mod d with k = deg self - deg d + 1, in integer arithmetic."""
        if d.is_zero():
            raise ZeroDivisionError("pseudo-remainder by the zero polynomial")
        k = max(self.degree - d.degree + 1, 0)
        r, steps = self, 0
        while not r.is_zero() and r.degree >= d.degree:
            shift = IntPoly((0,) * (r.degree - d.degree) + (r.lead,))
            r = r * d.lead - d * shift
            steps += 1
        return r * d.lead ** (k - steps)

    def divides(self, p: "IntPoly") -> bool:
        return p.pseudo_rem(self).is_zero()

    def sign_at_inf(self, positive: bool = True) -> int:
        if self.is_zero():
            return 0
        s = 1 if self.lead > 0 else -1
        return s if positive or self.degree % 2 == 0 else -s

    def to_json(self) -> list:
        return list(self.coeffs)

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i, a in reversed(list(enumerate(self.coeffs))):
            if a:
                terms.append(f"{a}" if i == 0 else f"{a}*x" + (f"^{i}" if i > 1 else ""))
        return " + ".join(terms).replace("+ -", "- ")


def _as_poly(o) -> IntPoly:
    return o if isinstance(o, IntPoly) else IntPoly.const(int(o))


def poly_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Primitive gcd in Z[x] via primitive remainder sequences."""
    a, b = a.primitive(), b.primitive()
    while not b.is_zero():
        a, b = b, a.pseudo_rem(b).primitive()
    if a.is_zero():
        return a
    return a.primitive() if a.degree > 0 else IntPoly.const(1)


def sturm_sequence(p: IntPoly) -> list[IntPoly]:
    """Sturm chain p, p', -rem(p, p'), ... up to positive factors."""
    seq = [p, p.derivative()]
    while True:
        a, b = seq[-2], seq[-1]
        r = a.pseudo_rem(b)
        if r.is_zero():
            return seq
        # pseudo_rem = lead(b)^k * rem; flip when that factor is negative
        k = a.degree - b.degree + 1
        if b.lead < 0 and k % 2:
            r = -r
        seq.append(IntPoly(tuple(-c // r.content() for c in r.coeffs)))


def count_real_roots(p: IntPoly) -> int:
    """Number of distinct real roots of p (Sturm's theorem on (-inf, inf))."""
    if p.is_zero():
        raise ValueError("the zero polynomial vanishes everywhere")
    if p.degree == 0:
        return 0
    seq = sturm_sequence(p)

    def changes(signs):
        s = [x for x in signs if x]
        return sum(1 for u, v in zip(s, s[1:]) if u != v)

    return changes([q.sign_at_inf(False) for q in seq]) - changes([q.sign_at_inf(True) for q in seq])


# ---------------------------------------------------------------------------
# polynomials in several variables

@dataclass(frozen=True)
class MPoly:
    """Integer polynomial in nvars variables: {exponent tuple: coefficient}."""
    terms: tuple
    nvars: int

    @classmethod
    def make(cls, d: dict, nvars: int) -> "MPoly":
        return cls(tuple(sorted((e, c) for e, c in d.items() if c)), nvars)

    @classmethod
    def const(cls, a: int, nvars: int) -> "MPoly":
        return cls.make({(0,) * nvars: int(a)}, nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "MPoly":
        e = [0] * nvars
        e[i] = 1
        return cls.make({tuple(e): 1}, nvars)

    def _lift(self, o) -> "MPoly":
        return o if isinstance(o, MPoly) else MPoly.const(o, self.nvars)

    def __add__(self, o):
        o = self._lift(o)
        d = dict(self.terms)
        for e, c in o.terms:
            d[e] = d.get(e, 0) + c
        return MPoly.make(d, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(tuple((e, -c) for e, c in self.terms), self.nvars)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        d: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in o.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = d.get(e, 0) + c1 * c2
        return MPoly.make(d, self.nvars)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def subs(self, i: int, value: int) -> "MPoly":
        d: dict = {}
        for e, c in self.terms:
            e2 = list(e)
            p = e2[i]
            e2[i] = 0
            d[tuple(e2)] = d.get(tuple(e2), 0) + c * value ** p
        return MPoly.make(d, self.nvars)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e, _ in self.terms), default=-1)

    def univariate(self, i: int) -> IntPoly:
        """The polynomial as an IntPoly in variable i; every other variable must be absent."""
        out = [0] * (self.degree_in(i) + 1)
        for e, c in self.terms:
            if any(p for k, p in enumerate(e) if k != i):
                raise ValueError("polynomial depends on another variable")
            out[e[i]] += c
        return IntPoly(tuple(out))

    def to_json(self) -> list:
        return [[list(e), c] for e, c in self.terms]


def det(M: list, zero=0):
    """Determinant of a square matrix over any commutative ring (Laplace expansion with memo)."""
    n = len(M)
    if n == 0:
        return zero + 1
    memo: dict = {}

    def minor(row: int, cols: tuple):
        if row == n:
            return zero + 1
        if cols in memo:
            return memo[cols]
        acc = zero
        for idx, c in enumerate(cols):
            a = M[row][c]
            if isinstance(a, int) and a == 0 or getattr(a, "is_zero", lambda: False)():
                continue
            term = a * minor(row + 1, cols[:idx] + cols[idx + 1:])
            acc = acc + term if idx % 2 == 0 else acc - term
        memo[cols] = acc
        return acc

    return minor(0, tuple(range(n)))


def maximal_minors(M: list, zero=0):
    """All k x k minors of an r x k matrix (r >= k), keyed by row subset."""
    r, k = len(M), len(M[0])
    return {rows: det([M[i] for i in rows], zero) for rows in combinations(range(r), k)}


# ---------------------------------------------------------------------------
# exact PSD test

def exact_psd(A: list) -> tuple[bool, list]:
    """PSD test of a symmetric rational matrix by symmetric elimination; returns (ok, pivots).

    A zero pivot must come with a zero row, otherwise the matrix is indefinite.
    """
    n = len(A)
    M = [[Fraction(x) for x in row] for row in A]
    pivots = []
    active = list(range(n))
    while active:
        p = max(active, key=lambda i: M[i][i])
        d = M[p][p]
        if d < 0:
            return False, pivots + [d]
        if d == 0:
            if any(M[p][j] != 0 for j in active):
                return False, pivots + [d]
            active.remove(p)
            pivots.append(d)
            continue
        pivots.append(d)
        active.remove(p)
        for i in active:
            f = M[i][p] / d
            if f:
                for j in active:
                    M[i][j] -= f * M[p][j]
    return True, pivots
