"""Cones cut out by PSD constraints on a linear family of symmetric matrices.

A point is a coordinate vector x; constraint c evaluates to sum_p x_p A_c[p].
The operations here move inside faces: compute the span of the minimal face
of a point, line-search to the boundary along a face direction, and descend
to smaller faces until a stopping rule (or extremality) is reached.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .. import qlinalg as ql
from ..cones import TensorElement, partial_transpose, sym_dim

KERNEL_TOL = 1e-9
FACE_TOL = 1e-7


class DepthExceeded(RuntimeError):
    def __init__(self, msg, partial):
        super().__init__(msg)
        self.partial = partial


class LineSearchFailure(RuntimeError):
    pass


@dataclass
class Spectra:
    """Per-constraint eigen data of a point."""
    w: list
    V: list
    ranges: list

    def ranks(self, mults) -> list[int]:
        return [int(round(r.sum() / m)) for r, m in zip(self.ranges, mults)]


@dataclass(eq=False)
class LinearSpectrahedron:
    constraints: list                 # arrays (P, D_c, D_c)
    mults: list                       # eigenvalue multiplicity of each constraint
    ktol: float = KERNEL_TOL
    gram: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.constraints = [np.asarray(A, dtype=float) for A in self.constraints]
        P = {A.shape[0] for A in self.constraints}
        if len(P) != 1:
            raise ValueError("constraints must share the coordinate dimension")
        self.gram = sum(np.einsum("pij,qij->pq", A, A) for A in self.constraints)

    @property
    def dim(self) -> int:
        return self.constraints[0].shape[0]

    def evaluate(self, x) -> list[np.ndarray]:
        return [np.tensordot(x, A, 1) for A in self.constraints]

    def inner(self, x, y) -> float:
        return float(x @ self.gram @ y)

    def spectra(self, x) -> Spectra:
        ws, Vs, rs = [], [], []
        for M in self.evaluate(x):
            w, V = np.linalg.eigh(M)
            top = max(abs(w[0]), abs(w[-1]))
            ws.append(w)
            Vs.append(V)
            rs.append(w > self.ktol * top if top > 0 else np.zeros_like(w, bool))
        return Spectra(ws, Vs, rs)

    def ranks(self, x) -> list[int]:
        return self.spectra(x).ranks(self.mults)

    def min_eig(self, x) -> float:
        """Smallest eigenvalue over all constraints, relative to the largest."""
        sp = self.spectra(x)
        top = max(max(abs(w[0]), abs(w[-1])) for w in sp.w)
        return min(w[0] for w in sp.w) / top if top > 0 else 0.0

    def contains(self, x, tol: float = ql.EPS_PSD) -> bool:
        return self.min_eig(x) >= -tol

    def face_span(self, x, sp: Spectra | None = None) -> np.ndarray:
        """Orthonormal (P, f) basis of directions C with A_c(C) K_c = 0 for every kernel K_c."""
        sp = sp or self.spectra(x)
        blocks = []
        for A, V, r in zip(self.constraints, sp.V, sp.ranges):
            K = V[:, ~r]
            if K.shape[1]:
                blocks.append(np.einsum("pij,jk->pik", A, K).reshape(self.dim, -1))
        if not blocks:
            return np.eye(self.dim)
        G = np.concatenate(blocks, axis=1)
        U, s, _ = np.linalg.svd(G, full_matrices=True)
        scale = max(np.sqrt(np.max(np.diag(self.gram))), 1.0)
        s_full = np.zeros(self.dim)
        s_full[:s.size] = s
        return U[:, s_full <= FACE_TOL * scale]

    def _restricted(self, sp: Spectra, i: int):
        r = sp.ranges[i]
        return sp.V[i][:, r], 1.0 / np.sqrt(sp.w[i][r])

    def line_search(self, x, c, sp: Spectra | None = None) -> tuple[float, float]:
        """Interval (t-, t+) of t with x + t c feasible, restricted to the face of x."""
        sp = sp or self.spectra(x)
        lo, hi = -np.inf, np.inf
        for i, A in enumerate(self.constraints):
            Q, s = self._restricted(sp, i)
            if Q.shape[1] == 0:
                continue
            N = (Q.T @ np.tensordot(c, A, 1) @ Q) * s[:, None] * s[None, :]
            mu = np.linalg.eigvalsh(N)
            neg, pos = mu[mu < 0], mu[mu > 0]
            if neg.size:
                hi = min(hi, -1.0 / neg[0])
            if pos.size:
                lo = max(lo, -1.0 / pos[-1])
        return lo, hi

    def max_step(self, x, e, sp: Spectra | None = None) -> float:
        """Largest lambda with x - lambda e still feasible (e in the face of x)."""
        sp = sp or self.spectra(x)
        lam = np.inf
        for i, A in enumerate(self.constraints):
            Q, s = self._restricted(sp, i)
            if Q.shape[1] == 0:
                continue
            N = (Q.T @ np.tensordot(e, A, 1) @ Q) * s[:, None] * s[None, :]
            nu = np.linalg.eigvalsh(N)[-1]
            if nu > 0:
                lam = min(lam, 1.0 / nu)
        return lam

    def direction(self, x, span: np.ndarray, rng) -> np.ndarray:
        c = span @ rng.normal(size=span.shape[1])
        c = c - self.inner(c, x) / self.inner(x, x) * x
        return c / np.linalg.norm(c)

    def descend(self, x, stop=None, rng=None, max_steps: int | None = None) -> np.ndarray:
        """Walk to the boundary of successively smaller faces until stop(ranks) or extremality."""
        rng = rng if rng is not None else np.random.default_rng(0)
        x = np.asarray(x, dtype=float)
        for _ in range(max_steps or 4 * self.dim + 4):
            sp = self.spectra(x)
            if stop is not None and stop(sp.ranks(self.mults)):
                return x
            span = self.face_span(x, sp)
            if span.shape[1] <= 1:
                return x
            for _attempt in range(5):
                c = self.direction(x, span, rng)
                _, t = self.line_search(x, c, sp)
                if np.isfinite(t) and t > 0:
                    break
            else:
                raise LineSearchFailure("no boundary point found along face directions")
            x = x + t * c
        raise LineSearchFailure("descent did not terminate")

    def is_extreme(self, x) -> bool:
        return self.face_span(x).shape[1] <= 1


def extreme_ray_driver(cone: LinearSpectrahedron, x, max_depth: int | None = None, seed: int = 0):
    """Split x recursively along face directions into extreme points.

    Returns a list of (weight, extreme) with x = sum weight * extreme.
    """
    rng = np.random.default_rng(seed)
    max_depth = cone.dim if max_depth is None else max_depth
    out: list = []

    def rec(y, w, depth):
        sp = cone.spectra(y)
        span = cone.face_span(y, sp)
        if span.shape[1] <= 1:
            out.append((w, y))
            return
        if depth >= max_depth:
            raise DepthExceeded(f"depth {max_depth} exceeded", out + [(w, y)])
        for _ in range(5):
            c = cone.direction(y, span, rng)
            lo, hi = cone.line_search(y, c, sp)
            if np.isfinite(lo) and np.isfinite(hi) and lo < 0 < hi:
                break
        else:
            raise LineSearchFailure("no two-sided segment through the point")
        a, b = hi / (hi - lo), -lo / (hi - lo)
        rec(y + lo * c, w * a, depth + 1)
        rec(y + hi * c, w * b, depth + 1)

    rec(np.asarray(x, dtype=float), 1.0, 0)
    return out


# ---------------------------------------------------------------------------
# the PPT cones Gamma_{m,n}

def _constraint_matrix(X: np.ndarray, m: int) -> np.ndarray:
    return X[..., 0] if m == 3 else ql.embed_real(X)


@lru_cache(maxsize=None)
def gamma_cone(m: int, n: int) -> LinearSpectrahedron:
    """Gamma_{m,n} in the orthonormal component coordinates of TensorElement.vector().

    For m <= 5 the partial transpose is unitarily equivalent to the element
    itself, so only m = 6 carries the second constraint.
    """
    P = m * sym_dim(n)
    eye = np.eye(P)
    mats, pts = [], []
    for p in range(P):
        e = TensorElement.from_vector(m, n, eye[p])
        mats.append(_constraint_matrix(e.assemble(), m))
        if m == 6:
            pts.append(_constraint_matrix(partial_transpose(e).assemble(), m))
    mult = 1 if m == 3 else 4
    if m == 6:
        return LinearSpectrahedron([np.array(mats), np.array(pts)], [mult, mult])
    return LinearSpectrahedron([np.array(mats)], [mult])


def symmetric_slice(basis: np.ndarray) -> LinearSpectrahedron:
    """The cone span(basis) intersected with S_+(d); basis has shape (P, d, d)."""
    return LinearSpectrahedron([np.asarray(basis, dtype=float)], [1])
