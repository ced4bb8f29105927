"""The spaces E_m (x) S(n): components, PPT membership, group actions, reductions.

An element is stored through its m real symmetric components B_0..B_{m-1};
the assembled 2n x 2n hermitian matrix is

    [[B0 + B1,               B2 + i B3 + j B4 + k B5],
     [B2 - i B3 - j B4 - k B5,  B0 - B1             ]]

with the terms beyond B_{m-1} absent.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import hashlib
import math

import numpy as np

from . import qlinalg as ql
from .qlinalg import Membership
from .quaternion import aconj

FIELD_OF_M = {3: "R", 4: "C", 5: "Hk", 6: "H"}
EPS_DEP = 1e-8


class NotPPT(ValueError):
    pass


class NotInGamma5(ValueError):
    pass


# ---------------------------------------------------------------------------
# Lorentz isomorphisms

def iso(x) -> np.ndarray:
    """2x2 hermitian matrix (quaternion layout) of a point x in R^m."""
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    if m not in FIELD_OF_M:
        raise ValueError(f"m must be in 3..6, got {m}")
    a = np.zeros((2, 2, 4))
    a[0, 0, 0] = x[0] + x[1]
    a[1, 1, 0] = x[0] - x[1]
    a[0, 1, :m - 2] = x[2:]
    a[1, 0] = aconj(a[0, 1])
    return a


def iso_inv(a: np.ndarray, m: int) -> np.ndarray:
    x = np.zeros(m)
    x[0] = 0.5 * (a[0, 0, 0] + a[1, 1, 0])
    x[1] = 0.5 * (a[0, 0, 0] - a[1, 1, 0])
    x[2:] = 0.5 * (a[0, 1, :m - 2] + aconj(a[1, 0])[:m - 2])
    return x


def in_lorentz(x, tol: float = 0.0) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(x[0] >= np.linalg.norm(x[1:]) - tol)


def minkowski(x, y) -> float:
    return float(x[0] * y[0] - np.dot(x[1:], y[1:]))


# ---------------------------------------------------------------------------
# symmetric matrices as orthonormal coordinate vectors

def sym_dim(n: int) -> int:
    return n * (n + 1) // 2


def _sym_index(n: int):
    iu = np.triu_indices(n)
    w = np.where(iu[0] == iu[1], 1.0, math.sqrt(2.0))
    return iu, w


def sym_to_vec(S: np.ndarray) -> np.ndarray:
    n = S.shape[-1]
    iu, w = _sym_index(n)
    return S[..., iu[0], iu[1]] * w


def vec_to_sym(x: np.ndarray, n: int) -> np.ndarray:
    iu, w = _sym_index(n)
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape[:-1] + (n, n))
    out[..., iu[0], iu[1]] = x / w
    out[..., iu[1], iu[0]] = x / w
    return out


# ---------------------------------------------------------------------------
# elements

@dataclass(frozen=True, eq=False)
class TensorElement:
    m: int
    n: int
    components: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.m not in FIELD_OF_M:
            raise ValueError(f"m must be in 3..6, got {self.m}")
        c = np.asarray(self.components, dtype=float)
        if c.shape != (self.m, self.n, self.n):
            raise ValueError(f"components must have shape {(self.m, self.n, self.n)}, got {c.shape}")
        c = 0.5 * (c + np.swapaxes(c, 1, 2))
        c.setflags(write=False)
        object.__setattr__(self, "components", c)

    # constructors -----------------------------------------------------
    @classmethod
    def zeros(cls, m: int, n: int) -> "TensorElement":
        return cls(m, n, np.zeros((m, n, n)))

    @classmethod
    def from_vector(cls, m: int, n: int, x) -> "TensorElement":
        return cls(m, n, vec_to_sym(np.asarray(x).reshape(m, sym_dim(n)), n))

    @classmethod
    def from_assembled(cls, X: np.ndarray, m: int, tol: float = 1e-9) -> "TensorElement":
        """Read components off an assembled matrix, checking the block structure."""
        n = X.shape[0] // 2
        X11, X12, X21, X22 = X[:n, :n], X[:n, n:], X[n:, :n], X[n:, n:]
        B11 = 0.5 * (X11[..., 0] + X11[..., 0].T)
        B22 = 0.5 * (X22[..., 0] + X22[..., 0].T)
        off = 0.5 * (X12 + aconj(X21))
        comps = [0.5 * (B11 + B22), 0.5 * (B11 - B22)]
        comps += [0.5 * (off[..., t] + off[..., t].T) for t in range(m - 2)]
        out = cls(m, n, np.array(comps))
        scale = tol * (1.0 + ql.fro(X))
        if m == 5 and np.max(np.abs(off[..., 3]), initial=0.0) > scale:
            raise NotInGamma5("image leaves E_5 (nonzero k-component)")
        err = ql.fro(out.assemble() - X)
        if err > scale:
            raise ValueError(f"matrix is not in E_{m} (x) S({n}) (deviation {err:.2e})")
        return out

    # views -------------------------------------------------------------
    @property
    def field(self) -> str:
        return FIELD_OF_M[self.m]

    @property
    def dim(self) -> int:
        return self.m * sym_dim(self.n)

    def vector(self) -> np.ndarray:
        return sym_to_vec(self.components).reshape(-1)

    def blocks(self):
        """(B11, B12, B22) in quaternion layout; B21 = conj(B12)."""
        c, n = self.components, self.n
        B11 = ql.from_real(c[0] + c[1])
        B22 = ql.from_real(c[0] - c[1])
        B12 = np.zeros((n, n, 4))
        B12[..., :self.m - 2] = np.moveaxis(c[2:], 0, -1)
        return B11, B12, B22

    def assemble(self) -> np.ndarray:
        B11, B12, B22 = self.blocks()
        top = np.concatenate([B11, B12], axis=1)
        bot = np.concatenate([aconj(B12), B22], axis=1)
        return np.concatenate([top, bot], axis=0)

    def norm(self) -> float:
        return ql.fro(self.assemble())

    def digest(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.components).tobytes()).hexdigest()[:16]

    def with_components(self, comps) -> "TensorElement":
        return TensorElement(self.m, self.n, comps)

    # arithmetic ----------------------------------------------------------
    def __add__(self, other: "TensorElement") -> "TensorElement":
        return self.with_components(self.components + other.components)

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self.with_components(self.components - other.components)

    def __mul__(self, s: float) -> "TensorElement":
        return self.with_components(s * self.components)

    __rmul__ = __mul__

    # JSON ----------------------------------------------------------------
    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "components": self.components.tolist()}

    @classmethod
    def from_json(cls, d: dict) -> "TensorElement":
        try:
            m, n = int(d["m"]), int(d["n"])
            c = np.array(d["components"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed element JSON: {exc}") from exc
        if c.shape != (m, n, n):
            raise ValueError(f"components must have shape {(m, n, n)}")
        if np.max(np.abs(c - np.swapaxes(c, 1, 2)), initial=0.0) > 1e-12:
            raise ValueError("components are not symmetric")
        return cls(m, n, c)


def partial_transpose(B: TensorElement) -> TensorElement:
    c = np.array(B.components)
    c[3:] *= -1
    return B.with_components(c)


def is_ppt(B: TensorElement, tol: float = ql.EPS_PSD) -> Membership:
    """PSD test of B and of its partial transpose; the witness names the failing side."""
    for side, X in (("B", B.assemble()), ("pt", partial_transpose(B).assemble())):
        res = ql.is_psd(X, tol)
        if not res:
            res.witness = {"side": side, "vector": res.witness}
            return res
    return Membership(True, min(ql.eigvalsh(B.assemble())[-1], ql.eigvalsh(partial_transpose(B).assemble())[-1]))


def lorentz_apply(A: np.ndarray, B: TensorElement, m_out: int | None = None) -> TensorElement:
    """Act with a linear map on the E_m factor: B'_a = sum_b A_ab B_b."""
    comps = np.tensordot(A, B.components, axes=(1, 0))
    m_out = m_out or A.shape[0]
    return TensorElement(m_out, B.n, comps[:m_out])


# ---------------------------------------------------------------------------
# group actions

@dataclass(frozen=True, eq=False)
class GroupElement:
    left: np.ndarray      # 2x2 quaternion layout
    right: np.ndarray     # n x n real
    conjugate: bool = False

    @classmethod
    def identity(cls, n: int) -> "GroupElement":
        return cls(ql.eye(2), np.eye(n), False)

    def inverse(self) -> "GroupElement":
        if self.conjugate:
            raise ValueError("inverse of a conjugating element is not represented")
        return GroupElement(ql.qinv(self.left), np.linalg.inv(self.right), False)


def apply(g: GroupElement, B: TensorElement, tol: float = 1e-9) -> TensorElement:
    n = B.n
    if not ql.in_field(g.left, B.field, tol * (1 + ql.fro(g.left))) and B.m != 5:
        raise ValueError(f"left factor is not over {B.field}")
    X = partial_transpose(B).assemble() if g.conjugate else B.assemble()
    L = np.zeros((2 * n, 2 * n, 4))
    for a in range(2):
        for b in range(2):
            L[a * n:(a + 1) * n, b * n:(b + 1) * n] = g.left[a, b][None, None, :] * np.eye(n)[..., None]
    X = ql.mm(L, X, ql.ct(L))
    R2 = np.kron(np.eye(2), g.right)
    X = np.einsum("ab,bct,dc->adt", R2, X, R2)
    return TensorElement.from_assembled(X, B.m, tol)


# ---------------------------------------------------------------------------
# reduction outcomes

@dataclass(frozen=True, eq=False)
class Irreducible:
    kind: str = "Irreducible"

    def reconstruct(self):
        raise ValueError("nothing to reconstruct")


@dataclass(frozen=True, eq=False)
class Reduced:
    """B = lorentz^{-1} applied to `element` padded with a zero last component."""
    element: TensorElement
    lorentz: np.ndarray
    case: str
    kind: str = "Reduced"

    def reconstruct(self) -> TensorElement:
        e = self.element
        pad = np.concatenate([e.components, np.zeros((1, e.n, e.n))])
        return lorentz_apply(np.linalg.inv(self.lorentz), TensorElement(e.m + 1, e.n, pad))


@dataclass(frozen=True, eq=False)
class Decomposed:
    """B_l = T blockdiag(first_l, second_l) T^T for every component."""
    first: TensorElement
    second: TensorElement
    transform: np.ndarray
    kind: str = "Decomposed"

    def reconstruct(self) -> TensorElement:
        n1, n2 = self.first.n, self.second.n
        c = np.zeros((self.first.m, n1 + n2, n1 + n2))
        c[:, :n1, :n1] = self.first.components
        c[:, n1:, n1:] = self.second.components
        T = self.transform
        return TensorElement(self.first.m, n1 + n2, T @ c @ T.T)


@dataclass(frozen=True, eq=False)
class Normalized:
    element: TensorElement
    group: GroupElement
    kind: str = "Normalized"


@dataclass(frozen=True, eq=False)
class NeedsReductionFirst:
    outcome: object
    kind: str = "NeedsReductionFirst"


def _complete_basis(v: np.ndarray, last: bool) -> np.ndarray:
    """Orthogonal matrix whose first (or last) row is the unit vector v."""
    d = v.shape[0]
    M = np.column_stack([v, np.eye(d)])
    Q, _ = np.linalg.qr(M)
    Q = Q[:, :d]
    if Q[:, 0] @ v < 0:
        Q[:, 0] *= -1
    U = Q.T
    if last:
        U = U[np.r_[1:d, 0]]
    return U


def reduction_map(lam: np.ndarray, tol: float = 1e-7) -> tuple[np.ndarray, str]:
    """Lorentz automorphism whose last row is proportional to the dependency lam."""
    lam = np.asarray(lam, dtype=float)
    m = lam.shape[0]
    l0, lp = lam[0], lam[1:]
    nlp = np.linalg.norm(lp)
    if nlp == 0:
        raise NotPPT("dependency with vanishing spatial part")
    if abs(l0) > nlp * (1 + tol):
        raise NotPPT("dependency outside the light cone; element is not PPT")
    if nlp - abs(l0) <= tol * nlp:
        # case i: normalise lam_0 = 1, A = diag(1, U) with first row of U = lam'
        lp = lp / l0
        U = _complete_basis(lp / np.linalg.norm(lp), last=False)
        A = np.eye(m)
        A[1:, 1:] = U
        return A, "i"
    s = 1.0 / math.sqrt(nlp ** 2 - l0 ** 2)
    l0, lp = l0 * s, lp * s
    ch, sh = np.linalg.norm(lp), l0
    U = _complete_basis(lp / ch, last=True)
    A2 = np.eye(m)
    A2[1:, 1:] = U
    A1 = np.eye(m)
    A1[0, 0] = A1[-1, -1] = ch
    A1[0, -1] = A1[-1, 0] = sh
    return A1 @ A2, "ii"


def dependency(B: TensorElement, tol: float = EPS_DEP) -> np.ndarray | None:
    """Coefficients lam with sum lam_l B_l ~ 0, or None if the components are independent."""
    M = sym_to_vec(B.components)
    U, s, _ = np.linalg.svd(M, full_matrices=True)
    smax = s[0] if s.size else 0.0
    if smax == 0:
        return np.eye(B.m)[-1]
    s_full = np.zeros(B.m)
    s_full[:s.size] = s
    if s_full[-1] <= tol * smax:
        return U[:, -1]
    return None


def reduce_by(B: TensorElement, lam: np.ndarray) -> Reduced:
    A, case = reduction_map(lam)
    Bp = lorentz_apply(A, B)
    c = np.array(Bp.components)
    if case == "i":
        # B'_11 = B'_0 + B'_1 vanishes, hence so does the whole top row
        c[1] = -c[0]
        c[2:] = 0.0
    return Reduced(TensorElement(B.m - 1, B.n, c[:-1]), A, case)


def _common_kernel_split(B: TensorElement, tol: float):
    P = B.components[0]
    w, V = np.linalg.eigh(P)
    wmax = max(w[-1], 0.0)
    ker = w <= tol * wmax if wmax > 0 else np.ones_like(w, bool)
    if not ker.any() or ker.all():
        return None
    Q = np.column_stack([V[:, ~ker], V[:, ker]])
    n1 = int((~ker).sum())
    c = Q.T @ B.components @ Q
    first = TensorElement(B.m, n1, c[:, :n1, :n1])
    second = TensorElement(B.m, B.n - n1, c[:, n1:, n1:])
    return Decomposed(first, second, Q)


def _invariant_split(B: TensorElement, tol: float, seed: int, draws: int = 3):
    """Split along a common invariant subspace after normalising B_0 to the identity."""
    n = B.n
    P = B.components[0]
    w, V = np.linalg.eigh(P)
    Ph = (V * np.sqrt(w)) @ V.T
    Pih = (V / np.sqrt(w)) @ V.T
    C = Pih @ B.components[1:] @ Pih
    scale = 1.0 + np.max(np.linalg.norm(C, axis=(1, 2)), initial=0.0)
    rng = np.random.default_rng(seed)
    for _ in range(draws):
        coef = rng.normal(size=C.shape[0])
        _, E = np.linalg.eigh(np.tensordot(coef, C, 1))
        couple = np.max(np.abs(E.T @ C @ E), axis=0) > tol * scale
        # connected components of the coupling graph
        label = -np.ones(n, int)
        for s0 in range(n):
            if label[s0] >= 0:
                continue
            stack, label[s0] = [s0], s0
            while stack:
                a = stack.pop()
                for b in np.nonzero(couple[a])[0]:
                    if label[b] < 0:
                        label[b] = s0
                        stack.append(b)
        if len(set(label)) < 2:
            continue
        mask = label == label[0]
        Q1, Q2 = E[:, mask], E[:, ~mask]
        proj = Q1 @ Q1.T
        if max(np.linalg.norm(proj @ c - c @ proj) for c in C) > tol * scale:
            continue
        Q = np.column_stack([Q1, Q2])
        n1 = Q1.shape[1]
        full = np.concatenate([np.eye(n)[None], C])
        c = Q.T @ full @ Q
        first = TensorElement(B.m, n1, c[:, :n1, :n1])
        second = TensorElement(B.m, n - n1, c[:, n1:, n1:])
        return Decomposed(first, second, Ph @ Q)
    return None


def find_decomposition(B: TensorElement, tol: float = ql.EPS_E, seed: int = 0):
    if B.n < 2:
        return None
    out = _common_kernel_split(B, 1e-10)
    if out is not None:
        return out
    return _invariant_split(B, tol, seed)


def detect_and_reduce(B: TensorElement, tol: float = EPS_DEP, seed: int = 0, check: bool = True):
    if check and not is_ppt(B):
        raise NotPPT("input is not PPT")
    lam = dependency(B, tol) if B.m > 3 else None
    if lam is not None:
        return reduce_by(B, lam)
    dec = find_decomposition(B, ql.EPS_E, seed)
    if dec is not None:
        return dec
    return Irreducible()


# ---------------------------------------------------------------------------
# normalisation of the upper-left corner

def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    if abs(c) < 1e-15:
        return ql.from_real(np.array([[0.0, 1.0], [1.0, 0.0]]))
    return ql.from_real(np.array([[c, s], [-s, c]]))


def _corner(B: TensorElement, S: np.ndarray) -> np.ndarray:
    S = S[..., 0]
    B11, B22, B2 = B.components[0] + B.components[1], B.components[0] - B.components[1], B.components[2]
    a, b = S[0]
    return a * a * B11 + 2 * a * b * B2 + b * b * B22


def normalize_corner(B: TensorElement, tol: float = 1e-10, check: bool = True, seed: int = 0):
    """Bring B into the orbit representative with B_11 = I, or report a reduction."""
    if check and not is_ppt(B):
        raise NotPPT("input is not PPT")
    dec = _common_kernel_split(B, tol)
    if dec is not None:
        return NeedsReductionFirst(dec)
    scale = max(np.linalg.eigvalsh(B.components[0])[-1], 0.0)
    if scale == 0:
        raise ValueError("zero element cannot be normalised")
    best, best_S = -np.inf, None
    for theta in [0.0, math.pi / 2] + list(np.linspace(0, math.pi, 25)[1:-1]):
        S = rotation(theta)
        lmin = np.linalg.eigvalsh(_corner(B, S))[0] / scale
        if lmin > best:
            best, best_S = lmin, S
        if theta == 0.0 and lmin > 1e-3:
            break
        if theta == math.pi / 2 and best > 1e-3:
            break
    if best <= tol:
        return NeedsReductionFirst(detect_and_reduce(B, check=False, seed=seed))
    C = _corner(B, best_S)
    w, V = np.linalg.eigh(C)
    R = (V / np.sqrt(w)) @ V.T
    g = GroupElement(best_S, R, False)
    Bp = apply(g, B)
    c = np.array(Bp.components)
    B22 = c[0] - c[1]
    c[0], c[1] = 0.5 * (np.eye(B.n) + B22), 0.5 * (np.eye(B.n) - B22)
    return Normalized(TensorElement(B.m, B.n, c), g)


def face_dim_bound(N: int, n: int) -> int:
    if n > N:
        raise ValueError("subspace dimension exceeds ambient dimension")
    return N - n + 1
