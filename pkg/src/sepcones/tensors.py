"""Cross-product calculus on S(3) and symmetric order-3 tensors.

The key object is a traceless 2-dimensional subspace L of S(3). Its
orthogonal complement is spanned by I_3 and three traceless matrices; the
sign of the determinant of their pairwise commutator vectors classifies L,
and for sign -1 the complement is spanned by I_3 and the matrix components
of a symmetric tensor obeying the delta-condition.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import itertools
import math

import numpy as np
from scipy.optimize import brentq

from .cones import sym_to_vec, vec_to_sym


class NotSkew(ValueError):
    pass


class Singular(ValueError):
    pass


class WrongSign(ValueError):
    pass


class Degenerate(ValueError):
    pass


def vee(A: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if np.max(np.abs(A + A.T)) > tol * (1.0 + np.max(np.abs(A))):
        raise NotSkew("matrix is not skew-symmetric")
    return np.array([A[1, 2], A[2, 0], A[0, 1]])


def vee_inv(v) -> np.ndarray:
    a23, a31, a12 = v
    return np.array([[0.0, a12, -a31], [-a12, 0.0, a23], [a31, -a23, 0.0]])


def hq(C: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    C = np.asarray(C, dtype=float)
    d = np.linalg.det(C)
    if abs(d) <= tol * max(1.0, np.linalg.norm(C)) ** 3:
        raise Singular("matrix is singular")
    return d * np.linalg.inv(C).T


def adjugate(A: np.ndarray) -> np.ndarray:
    """Classical adjugate of a 3x3 matrix (det(A) A^{-1} extended by continuity)."""
    A = np.asarray(A, dtype=float)
    cof = np.empty((3, 3))
    for a in range(3):
        for b in range(3):
            minor = np.delete(np.delete(A, a, 0), b, 1)
            cof[a, b] = (-1) ** (a + b) * (minor[0, 0] * minor[1, 1] - minor[0, 1] * minor[1, 0])
    return cof.T


def commutator(A, B):
    return A @ B - B @ A


# ---------------------------------------------------------------------------
# types

_KEYS = ["".join(map(str, t)) for t in itertools.combinations_with_replacement((1, 2, 3), 3)]


@dataclass(frozen=True, eq=False)
class SymTensor3:
    """Fully symmetric 3x3x3 tensor; S[a, b, c] with 0-based indices."""
    S: np.ndarray = field(repr=False)

    def __post_init__(self):
        S = np.asarray(self.S, dtype=float)
        if S.shape != (3, 3, 3):
            raise ValueError("tensor must be 3x3x3")
        S = sum(np.transpose(S, p) for p in itertools.permutations(range(3))) / 6.0
        S.setflags(write=False)
        object.__setattr__(self, "S", S)

    def matrix(self, l: int) -> np.ndarray:
        """Matrix component S^l (0-based l): entries S[a, b, l]."""
        return np.array(self.S[:, :, l])

    def matrices(self) -> np.ndarray:
        return np.moveaxis(np.array(self.S), 2, 0)

    def rotated(self, U: np.ndarray) -> "SymTensor3":
        """Tensor with components sum U_ea U_fb U_gc S_efg."""
        return SymTensor3(np.einsum("ea,fb,gc,efg->abc", U, U, U, self.S))

    def to_json(self) -> dict:
        return {key: float(self.S[tuple(int(c) - 1 for c in key)]) for key in _KEYS}

    @classmethod
    def from_json(cls, d: dict) -> "SymTensor3":
        S = np.zeros((3, 3, 3))
        for key in _KEYS:
            for p in set(itertools.permutations(key)):
                S[tuple(int(c) - 1 for c in p)] = float(d[key])
        return cls(S)


@dataclass(frozen=True, eq=False)
class TracelessSubspace2:
    basis: np.ndarray = field(repr=False)  # shape (2, 3, 3), orthonormal, traceless

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=float)
        if B.shape != (2, 3, 3):
            raise ValueError("basis must have shape (2, 3, 3)")
        B = 0.5 * (B + np.swapaxes(B, 1, 2))
        if np.max(np.abs(np.trace(B, axis1=1, axis2=2))) > 1e-10 * (1 + np.max(np.abs(B))):
            raise ValueError("basis matrices must be traceless")
        G = np.einsum("aij,bij->ab", B, B)
        if np.max(np.abs(G - np.eye(2))) > 1e-10:
            raise ValueError("basis must be orthonormal")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @classmethod
    def spanned_by(cls, mats) -> "TracelessSubspace2":
        """Orthonormalise two spanning traceless symmetric matrices."""
        mats = np.asarray(mats, dtype=float)
        X = sym_to_vec(mats)
        Q, R = np.linalg.qr(X.T)
        if abs(R[-1, -1]) < 1e-12 * abs(R[0, 0]):
            raise ValueError("matrices do not span a 2-dimensional subspace")
        return cls(vec_to_sym(Q.T, 3))

    @classmethod
    def complement_of(cls, mats) -> "TracelessSubspace2":
        """Orthogonal complement in S(3) of the span of four matrices (one of them may be I)."""
        X = sym_to_vec(np.asarray(mats, dtype=float))
        _, s, Vt = np.linalg.svd(X)
        if s[-1] < 1e-10 * s[0]:
            raise ValueError("spanning matrices are linearly dependent")
        return cls(vec_to_sym(Vt[4:], 3))

    def complement(self) -> np.ndarray:
        """Orthonormal basis (3, 3, 3) of the traceless part of the orthogonal complement."""
        X = np.vstack([sym_to_vec(self.basis), sym_to_vec(np.eye(3)) / math.sqrt(3)])
        _, _, Vt = np.linalg.svd(X)
        return vec_to_sym(Vt[3:], 3)

    def contains(self, M: np.ndarray, tol: float = 1e-9) -> bool:
        x = sym_to_vec(M)
        P = sym_to_vec(self.basis)
        return bool(np.linalg.norm(x - P.T @ (P @ x)) <= tol * (1 + np.linalg.norm(x)))


# ---------------------------------------------------------------------------
# sign and delta-condition

def sigma_det(mats: np.ndarray) -> float:
    S1, S2, S3 = mats
    v23 = vee(commutator(S2, S3), tol=1e-9)
    v31 = vee(commutator(S3, S1), tol=1e-9)
    v12 = vee(commutator(S1, S2), tol=1e-9)
    return float(np.linalg.det(np.column_stack([v23, v31, v12])))


def sign_sigma(L: TracelessSubspace2, tol: float = 1e-10) -> int:
    d = sigma_det(L.complement())
    if abs(d) <= tol:
        return 0
    return 1 if d > 0 else -1


def delta_residual(T: SymTensor3) -> float:
    S = T.S
    lhs = np.einsum("abk,cek->abce", S, S) - np.einsum("cbk,aek->abce", S, S)
    d = np.eye(3)
    rhs = np.einsum("cb,ae->abce", d, d) - np.einsum("ab,ce->abce", d, d)
    return float(np.max(np.abs(lhs - rhs)))


def delta_check(T: SymTensor3, tol: float = 1e-9) -> bool:
    return delta_residual(T) <= tol


def adjugate_sum(T: SymTensor3) -> np.ndarray:
    """sum_l adj(S^l); equals -I exactly for tensors obeying the delta-condition."""
    return sum(adjugate(M) for M in T.matrices())


def reference_tensor(a: float, b: float, c: float, d: float) -> SymTensor3:
    """Closed-form delta-tensor for the normal form (N1, N2(a, b, c, d)), a, b > 0."""
    S = np.zeros((3, 3, 3))
    rab = math.sqrt(a * b)

    def put(idx, val):
        for p in set(itertools.permutations(idx)):
            S[p] = val

    put((0, 0, 0), -2 * c / rab)
    put((1, 1, 1), 2 * d / rab)
    put((0, 0, 2), math.sqrt(a / b))
    put((1, 1, 2), -math.sqrt(b / a))
    put((2, 2, 2), math.sqrt(a / b) - math.sqrt(b / a))
    return SymTensor3(S)


N1 = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])


def normal_form_N2(a, b, c, d) -> np.ndarray:
    return np.array([[a, 0.0, c], [0.0, b, d], [c, d, -a - b]])


# ---------------------------------------------------------------------------
# construction

@dataclass(frozen=True)
class DeltaConstruction:
    tensor: SymTensor3           # in the original coordinates
    U: np.ndarray                # L' = U L U^T is in normal form
    normal: tuple                # (a, b, c, d) after normalisation
    points: np.ndarray           # the four vectors x^l as columns
    weights: np.ndarray          # c_l
    normal_tensor: SymTensor3    # tensor in the rotated frame


def _zero_det_element(L: TracelessSubspace2) -> np.ndarray:
    M1, M2 = L.basis

    def f(t):
        return np.linalg.det(math.cos(t) * M1 + math.sin(t) * M2)

    f0 = f(0.0)
    if f0 == 0.0:
        return M1
    # det is odd on L, so f(pi) = -f(0)
    t = brentq(f, 0.0, math.pi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
    return math.cos(t) * M1 + math.sin(t) * M2


def build_delta_tensor(L: TracelessSubspace2, tol: float = 1e-10) -> DeltaConstruction:
    if sign_sigma(L) != -1:
        raise WrongSign("subspace sign is not -1")
    N0 = _zero_det_element(L)
    w, P = np.linalg.eigh(N0)
    # order the eigenvectors by the pattern (+1, -1, 0) after scaling
    P = P[:, [2, 0, 1]]
    R = np.array([[1, 1, 0], [1, -1, 0], [0, 0, math.sqrt(2)]]) / math.sqrt(2)
    U = R @ P.T
    M1, M2 = L.basis
    # the element of L orthogonal to N0
    n0 = N0 / np.linalg.norm(N0)
    res = [M - np.sum(M * n0) * n0 for M in (M1, M2)]
    other = max(res, key=np.linalg.norm)
    N2 = U @ other @ U.T
    N2 = N2 / np.linalg.norm(N2)
    a, b, c, d = N2[0, 0], N2[1, 1], N2[0, 2], N2[1, 2]
    scale = np.linalg.norm(N2)
    if abs(a + b) <= tol * scale:
        raise Degenerate("a + b vanishes")
    D1 = a * (-a - b) - c * c
    if D1 >= 0:
        swap = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1.0]])
        U = swap @ U
        a, b, c, d = b, a, d, c
    if a * b <= tol * scale * scale:
        raise Degenerate("ab is not positive")
    if a < 0:
        a, b, c, d = -a, -b, -c, -d
    D1 = -a * (a + b) - c * c
    D2 = -b * (a + b) - d * d
    ra, rb = math.sqrt(a / b), math.sqrt(b / a)
    s1, s2 = math.sqrt(-D1), math.sqrt(-D2)
    X = np.array([
        [ra * (a + b) / (s1 + c), -ra * (a + b) / (s1 - c), 0.0, 0.0],
        [0.0, 0.0, -rb * (a + b) / (s2 + d), rb * (a + b) / (s2 - d)],
        [ra, ra, -rb, -rb],
    ])
    weights = 1.0 / (1.0 + np.sum(X ** 2, axis=0))
    Xl = np.einsum("al,bl->lab", X, X) - np.eye(3)[None]
    # the linear map sending x^l to X^l, fitted on all four points
    A = X.T                                   # 4 x 3
    Y = Xl.reshape(4, 9)                      # 4 x 9
    coef = np.linalg.lstsq(A, Y, rcond=None)[0]   # 3 x 9: row l = image of e_l
    Sp = SymTensor3(np.moveaxis(coef.reshape(3, 3, 3), 0, 2))
    T = Sp.rotated(U)
    return DeltaConstruction(T, U, (a, b, c, d), X, weights, Sp)


def delta_span_residual(T: SymTensor3, L: TracelessSubspace2) -> float:
    """Distance of the matrix components of T from the complement of L."""
    P = sym_to_vec(L.basis)
    return float(max(np.linalg.norm(P @ sym_to_vec(M)) for M in T.matrices()))
