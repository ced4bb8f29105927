"""PSD block matrices [[B11, B12], [B12, B22]] with blocks in H(n) or Q(n).

These are the elements of S(2) (x) H(n) and S(2) (x) Q(n); for them PSD
already implies separability, and the completion N = [[W, Z], [Z^*, 0]]
is hermitian over the field of the blocks, so its eigenpairs give the atoms
[[1, q], [q, q^2]] (x) u u^* with real q directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import hashlib
import math

import numpy as np

from .. import qlinalg as ql
from ..quaternion import aconj, amul, anorm2
from .atoms import Atom, INF, SeparableDecomposition, verify_decomposition

HANKEL_FIELDS = ("R", "C", "H")


@dataclass(frozen=True, eq=False)
class HankelElement:
    field: str
    B11: np.ndarray = field(repr=False)
    B12: np.ndarray = field(repr=False)
    B22: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.field not in HANKEL_FIELDS:
            raise ValueError(f"field must be one of {HANKEL_FIELDS}")
        blocks = []
        for B in (self.B11, self.B12, self.B22):
            B = ql.herm(np.asarray(B, dtype=float))
            if not ql.in_field(B, self.field, 1e-12 * (1 + ql.fro(B))):
                raise ValueError(f"block is not over {self.field}")
            B.setflags(write=False)
            blocks.append(B)
        if len({b.shape for b in blocks}) != 1:
            raise ValueError("blocks must share their shape")
        for name, B in zip(("B11", "B12", "B22"), blocks):
            object.__setattr__(self, name, B)

    @property
    def n(self) -> int:
        return self.B11.shape[0]

    @classmethod
    def from_matrix(cls, X: np.ndarray, field_: str, tol: float = 1e-9) -> "HankelElement":
        n = X.shape[0] // 2
        B11, B12, B21, B22 = X[:n, :n], X[:n, n:], X[n:, :n], X[n:, n:]
        if ql.fro(B12 - B21) > tol * (1 + ql.fro(X)) or ql.fro(B12 - ql.ct(B12)) > tol * (1 + ql.fro(X)):
            raise ValueError("matrix does not have the block structure [[A, B], [B, C]] with hermitian B")
        return cls(field_, B11, 0.5 * (B12 + B21), B22)

    def assemble(self) -> np.ndarray:
        return np.concatenate([
            np.concatenate([self.B11, self.B12], axis=1),
            np.concatenate([self.B12, self.B22], axis=1),
        ], axis=0)

    def norm(self) -> float:
        return ql.fro(self.assemble())

    def digest(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.assemble()).tobytes()).hexdigest()[:16]

    def blocks_rotated(self, c: float, s: float):
        B11, B12, B22 = self.B11, self.B12, self.B22
        return (c * c * B11 + 2 * c * s * B12 + s * s * B22,
                -c * s * B11 + (c * c - s * s) * B12 + c * s * B22,
                s * s * B11 - 2 * c * s * B12 + c * c * B22)

    def to_json(self) -> dict:
        return {
            "field": self.field,
            "n": self.n,
            "B11": ql.matrix_to_json(self.B11, True, self.field),
            "B12": ql.matrix_to_json(self.B12, True, self.field),
            "B22": ql.matrix_to_json(self.B22, True, self.field),
        }

    @classmethod
    def from_json(cls, d: dict) -> "HankelElement":
        try:
            return cls(d["field"], ql.matrix_from_json(d["B11"]), ql.matrix_from_json(d["B12"]),
                       ql.matrix_from_json(d["B22"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed block element JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# field-aware hermitian eigen-decomposition

def field_eigh(A: np.ndarray, field_: str):
    """Eigenvalues ascending and eigenvectors (quaternion layout) of a hermitian matrix over the field."""
    if A.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0, 4))
    if field_ == "R":
        w, V = np.linalg.eigh(A[..., 0])
        return w, ql.from_real(V)
    if field_ == "C":
        w, V = np.linalg.eigh(ql.to_complex(A))
        out = np.zeros(V.shape + (4,))
        out[..., 0], out[..., 1] = V.real, V.imag
        return w, out
    U, d = ql.herm_eig(A)
    return d[::-1], U[:, ::-1]


def _inv_sqrt(A: np.ndarray, field_: str) -> tuple[np.ndarray, np.ndarray]:
    w, U = field_eigh(A, field_)
    Us = U * (1.0 / np.sqrt(w))[None, :, None]
    Ui = U * np.sqrt(w)[None, :, None]
    return ql.mm(Us, ql.ct(U)), ql.mm(Ui, ql.ct(U))


def pair_diagonalize(A: np.ndarray, B: np.ndarray, field_: str = "H", tol: float = 1e-10) -> np.ndarray:
    """Invertible S with S A S^* and S B S^* both diagonal (A, B PSD)."""
    C = ql.herm(A + B)
    w, U = field_eigh(C, field_)
    top = max(w[-1], 0.0) if w.size else 0.0
    rng_ = w > tol * top if top > 0 else np.zeros(w.shape, bool)
    Ur = U[:, rng_] * (1.0 / np.sqrt(w[rng_]))[None, :, None]
    Bt = ql.herm(ql.mm(ql.ct(Ur), B, Ur))
    _, V = field_eigh(Bt, field_)
    rows = ql.ct(ql.mm(Ur, V))
    return np.concatenate([rows, ql.ct(U[:, ~rng_])], axis=0)


# ---------------------------------------------------------------------------
# decomposition

def _angles():
    return [0.0, math.pi / 2] + list(np.linspace(0, math.pi, 25)[1:-1])


def _hankel_atoms(B: HankelElement, tol: float, depth: int = 0) -> list:
    fld, n = B.field, B.n
    if n == 0 or B.norm() == 0:
        return []
    w, U = field_eigh(ql.herm(B.B11 + B.B22), fld)
    top = max(w[-1], 0.0)
    if top == 0:
        return []
    ker = w <= 1e-10 * top
    if ker.any():
        # a common kernel of B11 and B22 (and then of B12) splits off
        Ur = U[:, ~ker]
        sub = HankelElement(fld, *(ql.mm(ql.ct(Ur), X, Ur) for X in (B.B11, B.B12, B.B22)))
        out = []
        for a in _hankel_atoms(sub, tol, depth + 1):
            v = ql.matmul(Ur, a.v)
            out.append(Atom(a.weight, a.q, v))
        return out
    best, best_cs = -np.inf, (1.0, 0.0)
    for theta in _angles():
        c, s = math.cos(theta), math.sin(theta)
        lmin = field_eigh(B.blocks_rotated(c, s)[0], fld)[0][0] / top
        if lmin > best:
            best, best_cs = lmin, (c, s)
        if theta in (0.0, math.pi / 2) and best > 1e-3:
            break
    if best <= 1e-12:
        raise ql.SingularBlock("no rotation makes the corner block invertible")
    c, s = best_cs
    R11, R12, R22 = B.blocks_rotated(c, s)
    S, Sinv = _inv_sqrt(R11, fld)
    W = ql.herm(ql.mm(S, R12, S))
    B22 = ql.herm(ql.mm(S, R22, S))
    Sc = ql.herm(B22 - ql.mm(W, W))
    wz, Uz = field_eigh(Sc, fld)
    if wz.size and wz[0] < ql.psd_floor(Sc):
        raise ql.NotPSD(float(wz[0]))
    keep = wz > 1e-9 * (1.0 + ql.fro(B22))
    Z = Uz[:, keep] * np.sqrt(wz[keep])[None, :, None]
    r = Z.shape[1]
    N = np.zeros((n + r, n + r, 4))
    N[:n, :n] = W
    N[:n, n:] = Z
    N[n:, :n] = ql.ct(Z)
    lam, V = field_eigh(ql.herm(N), fld)
    atoms = []
    for l in range(n + r):
        ut = V[:n, l]
        ut = ql.matmul(Sinv, ut)
        nu2 = float(anorm2(ut).sum())
        if nu2 <= 1e-26:
            continue
        v = ut / np.sqrt(nu2)
        # undo the rotation: (1, lam) -> R^T (1, lam)
        a0, a1 = c - s * lam[l], s + c * lam[l]
        if a0 * a0 <= 1e-28 * (a0 * a0 + a1 * a1):
            atoms.append(Atom(nu2 * a1 * a1, INF, v))
        else:
            atoms.append(Atom(nu2 * a0 * a0, np.array([a1 / a0, 0, 0, 0]), v))
    return atoms


def decompose_hankel(B: HankelElement, tol: float = ql.EPS_E) -> SeparableDecomposition:
    X = B.assemble()
    psd = ql.is_psd(X)
    if not psd:
        raise ql.NotPSD(psd.value, "input is not PSD")
    atoms = _hankel_atoms(B, tol)
    D = SeparableDecomposition(atoms, B.digest(), None, ["hankel-completion"])
    res = verify_decomposition(X, D, tol)
    D.residual = float(res.residual)
    if not res:
        raise RuntimeError(f"decomposition does not verify: {res.reason} ({res.residual:.2e})")
    return D.canonicalized()


def decompose_complex_hankel(B: HankelElement, **kw) -> SeparableDecomposition:
    if B.field not in ("R", "C"):
        raise ValueError("expected blocks in H(n)")
    return decompose_hankel(B, **kw)


def decompose_s2qn(B: HankelElement, **kw) -> SeparableDecomposition:
    return decompose_hankel(B, **kw)
