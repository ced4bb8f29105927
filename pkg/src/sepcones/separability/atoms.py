"""Product atoms, separable decompositions and their verification."""
from __future__ import annotations

from dataclasses import dataclass, field
import json

import numpy as np

from .. import qlinalg as ql
from ..cones import FIELD_OF_M, TensorElement, is_ppt, iso, iso_inv
from ..quaternion import aconj, amul, anorm2, ainv

INF = "inf"
EPS_INF = 1e-14


@dataclass(frozen=True, eq=False)
class Atom:
    """weight * factor(q) (x) v v^*, factor(q) = [[1, conj q], [q, |q|^2]] or [[0,0],[0,1]] for INF.

    v is a real unit n-vector for elements of E_m (x) S(n), and a unit
    quaternion (n, 4) array for the S(2) (x) Q(n) and S(2) (x) H(n) cases.
    """
    weight: float
    q: object          # quaternion array (4,) or INF
    v: np.ndarray = field(repr=False)

    @property
    def is_inf(self) -> bool:
        return isinstance(self.q, str)

    def factor(self) -> np.ndarray:
        a = np.zeros((2, 2, 4))
        if self.is_inf:
            a[1, 1, 0] = 1.0
            return a
        q = np.asarray(self.q, dtype=float)
        a[0, 0, 0] = 1.0
        a[0, 1] = aconj(q)
        a[1, 0] = q
        a[1, 1, 0] = anorm2(q)
        return a

    def lorentz(self, m: int) -> np.ndarray:
        return iso_inv(self.factor(), m)

    def element(self, m: int) -> TensorElement:
        v = np.asarray(self.v, dtype=float)
        x = self.weight * self.lorentz(m)
        return TensorElement(m, v.shape[0], x[:, None, None] * np.outer(v, v)[None])

    def hankel_matrix(self) -> np.ndarray:
        """Quaternion 2n x 2n matrix weight * factor(q) (x) v v^* for quaternionic v."""
        v = np.asarray(self.v, dtype=float)
        if v.ndim == 1:
            v = ql.from_real(v)
        vv = amul(v[:, None], aconj(v)[None, :])
        a = self.factor()
        return self.weight * _kron2(a, vv)

    def to_json(self) -> dict:
        v = np.asarray(self.v, dtype=float)
        return {
            "weight": float(self.weight),
            "q": INF if self.is_inf else [float(t) for t in self.q],
            "v": v.tolist(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "Atom":
        q = d["q"]
        if isinstance(q, str):
            if q != INF:
                raise ValueError(f"unknown q symbol {q!r}")
        else:
            q = np.array(q, dtype=float)
            if q.shape != (4,):
                raise ValueError("q must have four components")
        return cls(float(d["weight"]), q, np.array(d["v"], dtype=float))


def _kron2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Quaternion Kronecker product of a 2x2 real-scalar-commuting factor with b."""
    n = b.shape[0]
    out = np.zeros((2 * n, 2 * n, 4))
    for s in range(2):
        for t in range(2):
            out[s * n:(s + 1) * n, t * n:(t + 1) * n] = amul(a[s, t][None, None, :], b)
    return out


# ---------------------------------------------------------------------------
# conversions

def atom_from_lorentz(y: np.ndarray, v: np.ndarray, weight: float = 1.0) -> Atom | None:
    """Atom for a boundary point y of the Lorentz cone (tensored with v v^T)."""
    y = np.asarray(y, dtype=float)
    m = y.shape[0]
    top, bot = y[0] + y[1], y[0] - y[1]
    yp = np.zeros(4)
    yp[:m - 2] = y[2:]
    scale = max(abs(y[0]), np.linalg.norm(y))
    if scale == 0:
        return None
    if top >= bot:
        w = top
    else:
        w = float(yp @ yp) / bot if bot > 0 else 0.0
    if w <= EPS_INF * scale:
        if bot <= 0:
            return None
        return Atom(weight * bot, INF, v)
    return Atom(weight * w, aconj(yp / w), v)


def atom_from_vector(u: np.ndarray, v: np.ndarray, weight: float = 1.0) -> Atom | None:
    """Atom weight * (u u^*) (x) v v^T for u in H^2 (any scale), v real (any scale)."""
    nv2 = float(np.dot(v, v)) if np.asarray(v).ndim == 1 else float(anorm2(v).sum())
    if nv2 == 0:
        return None
    v = np.asarray(v) / np.sqrt(nv2)
    weight = weight * nv2
    u0, u1 = u[0], u[1]
    n0, n1 = anorm2(u0), anorm2(u1)
    if n0 + n1 == 0:
        return None
    if n0 <= EPS_INF ** 2 * (n0 + n1):
        return Atom(weight * n1, INF, v)
    return Atom(weight * n0, amul(u1, ainv(u0)), v)


def atom_vector(a: Atom) -> np.ndarray:
    """u in H^2 with weight * factor = u u^*."""
    s = np.sqrt(a.weight)
    if a.is_inf:
        return np.array([[0, 0, 0, 0], [s, 0, 0, 0]], dtype=float)
    return np.array([[s, 0, 0, 0], s * np.asarray(a.q, dtype=float)])


def map_atom(a: Atom, left_inv: np.ndarray | None = None, right_inv: np.ndarray | None = None) -> Atom | None:
    """Transport an atom through a congruence: u -> left_inv u, v -> right_inv v."""
    u = atom_vector(a)
    if left_inv is not None:
        u = ql.matmul(left_inv, u)
    v = np.asarray(a.v)
    if right_inv is not None:
        v = right_inv @ v
    return atom_from_vector(u, v)


def map_atom_lorentz(a: Atom, A: np.ndarray, m_in: int) -> Atom | None:
    """Image under the Lorentz map A of an atom of E_{m_in}, padded with zero coordinates."""
    y = np.zeros(A.shape[1])
    y[:m_in] = a.weight * a.lorentz(m_in)
    return atom_from_lorentz(A @ y, a.v)


def canonical(a: Atom) -> Atom:
    v = np.array(a.v, dtype=float)
    if v.ndim == 1:
        nz = np.nonzero(np.abs(v) > 1e-14 * np.max(np.abs(v)))[0]
        if nz.size and v[nz[0]] < 0:
            v = -v
    else:
        n2 = anorm2(v)
        nz = np.nonzero(n2 > 1e-28 * np.max(n2))[0]
        if nz.size:
            f = v[nz[0]]
            v = amul(v, (aconj(f) / np.sqrt(anorm2(f)))[None, :])
    q = a.q if a.is_inf else np.asarray(a.q, dtype=float)
    return Atom(float(a.weight), q, v)


# ---------------------------------------------------------------------------
# decompositions

@dataclass(eq=False)
class SeparableDecomposition:
    atoms: list
    target_digest: str = ""
    m: int | None = None              # set for E_m (x) S(n) targets
    branches: list = field(default_factory=list)
    residual: float | None = None

    def canonicalized(self) -> "SeparableDecomposition":
        atoms = sorted((canonical(a) for a in self.atoms), key=lambda a: -a.weight)
        return SeparableDecomposition(atoms, self.target_digest, self.m, list(self.branches), self.residual)

    def reconstruct(self, n: int | None = None):
        if self.m is not None:
            if not self.atoms:
                return TensorElement.zeros(self.m, n or 1)
            out = self.atoms[0].element(self.m)
            for a in self.atoms[1:]:
                out = out + a.element(self.m)
            return out
        if not self.atoms:
            return np.zeros((2 * (n or 1), 2 * (n or 1), 4))
        return sum(a.hankel_matrix() for a in self.atoms)

    def to_json(self) -> dict:
        d = {"atoms": [a.to_json() for a in self.atoms], "residual": self.residual}
        if self.m is not None:
            d["m"] = self.m
        if self.target_digest:
            d["target"] = self.target_digest
        if self.branches:
            d["branches"] = list(self.branches)
        return d

    def dumps(self, pretty: bool = False) -> str:
        return json.dumps(self.to_json(), indent=2 if pretty else None)

    @classmethod
    def from_json(cls, d: dict) -> "SeparableDecomposition":
        try:
            atoms = [Atom.from_json(a) for a in d["atoms"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed decomposition JSON: {exc}") from exc
        return cls(atoms, d.get("target", ""), d.get("m"), list(d.get("branches", [])), d.get("residual"))


@dataclass
class Verification:
    ok: bool
    residual: float
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _atom_valid(a: Atom, field_: str | None, tol: float) -> str:
    if not np.isfinite(a.weight) or a.weight <= 0:
        return "non-positive weight"
    v = np.asarray(a.v, dtype=float)
    nv = np.sqrt(np.sum(v ** 2))
    if abs(nv - 1.0) > 1e-8:
        return "v is not a unit vector"
    if not a.is_inf and field_ is not None:
        if not ql.in_field(np.asarray(a.q)[None], field_, tol):
            return f"q is not in field {field_}"
    return ""


def verify_decomposition(B, D: SeparableDecomposition, tol: float = ql.EPS_E) -> Verification:
    """Atom validity, reconstruction residual <= tol (1 + |B|_F), and PPT of the reconstruction."""
    if isinstance(B, TensorElement):
        if D.m is not None and D.m != B.m:
            return Verification(False, np.inf, "dimension mismatch")
        field_ = FIELD_OF_M[B.m]
        for a in D.atoms:
            why = _atom_valid(a, field_, 1e-12 * (1 + abs(a.weight)))
            if why:
                return Verification(False, np.inf, why)
            if np.asarray(a.v).shape != (B.n,):
                return Verification(False, np.inf, "v has the wrong length")
        R = SeparableDecomposition(D.atoms, m=B.m).reconstruct(B.n)
        res = (R - B).norm() / (1.0 + B.norm())
        if res > tol:
            return Verification(False, res, "reconstruction residual too large")
        if not is_ppt(R):
            return Verification(False, res, "reconstruction is not PPT")
        return Verification(True, res)
    B = np.asarray(B, dtype=float)
    for a in D.atoms:
        why = _atom_valid(a, "R", 1e-12 * (1 + abs(a.weight)))
        if why:
            return Verification(False, np.inf, why)
    n = B.shape[0] // 2
    R = SeparableDecomposition(D.atoms).reconstruct(n)
    res = ql.fro(R - B) / (1.0 + ql.fro(B))
    if res > tol:
        return Verification(False, res, "reconstruction residual too large")
    if not ql.is_psd(R):
        return Verification(False, res, "reconstruction is not PSD")
    return Verification(True, res)


def split_lorentz(x: np.ndarray, v: np.ndarray) -> list:
    """Two boundary atoms summing to x (x v v^T), x in the Lorentz cone."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x[1:])
    if r == 0:
        if x[0] <= 0:
            return []
        u = np.zeros_like(x[1:])
        u[0] = 1.0
    else:
        u = x[1:] / r
    a, b = 0.5 * (x[0] + r), 0.5 * (x[0] - r)
    out = []
    for c, s in ((a, 1.0), (b, -1.0)):
        if c > EPS_INF * max(abs(x[0]), 1e-300):
            at = atom_from_lorentz(c * np.concatenate([[1.0], s * u]), v)
            if at is not None:
                out.append(at)
    return out


__all__ = [
    "INF", "Atom", "SeparableDecomposition", "Verification", "verify_decomposition",
    "atom_from_lorentz", "atom_from_vector", "map_atom", "map_atom_lorentz", "split_lorentz",
    "canonical", "iso",
]
