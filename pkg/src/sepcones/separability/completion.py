"""The completion kernel: atoms from a factorisation [[I, 0], [W, Z]] and a completion block X.

For B with B11 = I write B = F F^* with F = [[I, 0], [W, Z]], W the lower
left block and Z a Gram factor of B22 - W W^*. If the real components of
N = [[W, Z], [Z^T, X]] commute, their common eigenvectors v_l give
(W Z) v_l = q_l v~_l, and B splits into the atoms factor(q_l) (x) v~_l v~_l^T.
"""
from __future__ import annotations

import numpy as np

from .. import qlinalg as ql
from ..cones import TensorElement
from ..quaternion import aconj
from .atoms import Atom, SeparableDecomposition

FIELD_INDEX = {"R": 1, "C": 2, "Hk": 3, "H": 4}


class CommutationFailure(ValueError):
    pass


def max_commutator(mats: np.ndarray) -> float:
    worst = 0.0
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            C = mats[a] @ mats[b] - mats[b] @ mats[a]
            worst = max(worst, float(np.max(np.abs(C), initial=0.0)))
    return worst


def simultaneous_diagonalize(mats, tol: float = ql.EPS_E, seed: int = 0) -> np.ndarray:
    """Orthogonal V with V^T M V diagonal for every symmetric M in mats."""
    mats = np.asarray(mats, dtype=float)
    d = mats.shape[-1]
    if d == 0:
        return np.zeros((0, 0))
    scale = 1.0 + float(np.max(np.abs(mats), initial=0.0))
    if max_commutator(mats) > tol * scale * scale:
        raise CommutationFailure(f"components do not commute (residual {max_commutator(mats):.2e})")
    rng = np.random.default_rng(seed)
    return _simdiag(mats, tol * scale, rng)


def _simdiag(mats: np.ndarray, gap: float, rng) -> np.ndarray:
    d = mats.shape[-1]
    if d == 1 or len(mats) == 0:
        return np.eye(d)
    coef = rng.normal(size=len(mats))
    w, V = np.linalg.eigh(np.tensordot(coef, mats, 1))
    cols = []
    start = 0
    for t in range(1, d + 1):
        if t == d or w[t] - w[t - 1] > gap:
            Vc = V[:, start:t]
            if t - start > 1:
                sub = np.einsum("ia,kij,jb->kab", Vc, mats, Vc)
                # drop matrices that are already scalar on this cluster
                keep = [M for M in sub if np.max(np.abs(M - np.trace(M) / len(M) * np.eye(len(M)))) > gap]
                if keep:
                    Vc = Vc @ _simdiag(np.array(keep), gap, rng)
            cols.append(Vc)
            start = t
    return np.concatenate(cols, axis=1)


def gram_factor(S: np.ndarray, field_: str, rtol: float = ql.EPS_RANK, atol: float = 0.0) -> np.ndarray:
    """Z in quaternion layout with Z Z^* = S, entries kept inside the field of S when it is R or C.

    Eigenvalues at or below max(rtol * top, atol) are treated as zero.
    """
    n = S.shape[0]
    if field_ == "R":
        w, V = np.linalg.eigh(S[..., 0])
    elif field_ == "C":
        w, V = np.linalg.eigh(ql.to_complex(S))
    else:
        U, w = ql.herm_eig(S)
        w, U = w[::-1], U[:, ::-1]
    if w.size and w[0] < ql.psd_floor(S):
        raise ql.NotPSD(float(w[0]))
    top = max(w[-1], 0.0) if w.size else 0.0
    keep = w > max(rtol * top, atol) if top > 0 else np.zeros(n, bool)
    if field_ in ("R", "C"):
        Z = V[:, keep] * np.sqrt(w[keep])[None, :]
        out = np.zeros((n, int(keep.sum()), 4))
        out[..., 0] = Z.real
        if field_ == "C":
            out[..., 1] = Z.imag
        return out
    return U[:, keep] * np.sqrt(w[keep])[None, :, None]


def factor_normalized(B: TensorElement, rtol: float = 1e-9):
    """(W, Z) with B = [[I,0],[W,Z]] [[I,0],[W,Z]]^* for B with B11 = I."""
    _, B12, B22 = B.blocks()
    W = aconj(B12)
    S = ql.herm(B22 - ql.mm(W, ql.ct(W)))
    fld = B.field if B.field != "Hk" else "H"
    return W, gram_factor(S, fld, rtol, rtol * (1.0 + ql.fro(B22)))


def completion_atoms(W: np.ndarray, Z: np.ndarray, X: np.ndarray | None, ncomp: int,
                     tol: float = ql.EPS_E, seed: int = 0, eps: float = 1e-13) -> list:
    n, r = W.shape[0], Z.shape[1]
    if X is None:
        X = np.zeros((r, r, 4))
    N = np.zeros((n + r, n + r, 4))
    N[:n, :n] = W
    N[:n, n:] = Z
    N[n:, :n] = np.swapaxes(Z, 0, 1)
    N[n:, n:] = X
    comps = np.moveaxis(N[..., :ncomp], -1, 0)
    if np.max(np.abs(N[..., ncomp:]), initial=0.0) > tol * (1 + ql.fro(N)):
        raise CommutationFailure("completion has components outside the field")
    if np.max(np.abs(comps - np.swapaxes(comps, 1, 2)), initial=0.0) > tol * (1 + ql.fro(N)):
        raise CommutationFailure("completion components are not symmetric")
    comps = 0.5 * (comps + np.swapaxes(comps, 1, 2))
    V = simultaneous_diagonalize(comps, tol, seed)
    atoms = []
    scale = 1.0 + float(np.max(np.abs(comps), initial=0.0))
    for l in range(V.shape[1]):
        v = V[:, l]
        vt = v[:n]
        w = float(vt @ vt)
        if w <= eps:
            continue
        q = np.zeros(4)
        q[:ncomp] = np.einsum("i,kij,j->k", v, comps, v)
        # check the eigen-relation; a failure means the components did not share v
        res = np.einsum("kij,j->ki", comps, v) - q[:ncomp, None] * v[None, :]
        if np.max(np.abs(res)) > 1e3 * tol * scale:
            raise CommutationFailure("eigenvector is not common to all components")
        atoms.append(Atom(w, q, vt / np.sqrt(w)))
    return atoms


def completion_decompose(B: TensorElement, X: np.ndarray | None = None, tol: float = ql.EPS_E,
                         seed: int = 0, Z: np.ndarray | None = None) -> SeparableDecomposition:
    """Decompose a normalised element (B11 = I) through the completion N = [[W, Z], [Z^T, X]]."""
    _, B12, B22 = B.blocks()
    if np.max(np.abs(B.components[0] + B.components[1] - np.eye(B.n))) > 1e-8:
        raise ValueError("completion requires B11 = I")
    if Z is None:
        W, Z = factor_normalized(B)
    else:
        W = aconj(B12)
    ncomp = FIELD_INDEX[B.field]
    atoms = completion_atoms(W, Z, X, ncomp, tol, seed)
    return SeparableDecomposition(atoms, B.digest(), B.m, ["completion"])
