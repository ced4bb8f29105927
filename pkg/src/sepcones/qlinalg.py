"""Dense linear algebra over R, C and the quaternions.

A quaternionic matrix is an ndarray of shape (rows, cols, 4); a vector has
shape (n, 4). Real and complex data are carried in the same layout with the
unused components equal to zero, and a field tag ("R", "C", "Hk", "H") names
the smallest algebra containing the entries ("Hk" = zero k-component).

Most routines go through the real embedding, whose block pattern is

    [ A_r  -A_i  -A_j  -A_k ]
    [ A_i   A_r  -A_k   A_j ]
    [ A_j   A_k   A_r  -A_i ]
    [ A_k  -A_j   A_i   A_r ]
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .quaternion import Quaternion, aconj, amul, anorm2

FIELDS = ("R", "C", "Hk", "H")
FIELD_COMPONENTS = {"R": 1, "C": 2, "Hk": 3, "H": 4}

EPS_RANK = 1e-10
EPS_PSD = 1e-9
EPS_E = 1e-8
EPS_U = 1e-8


class NotPSD(ValueError):
    def __init__(self, eigenvalue: float, msg: str | None = None):
        self.eigenvalue = eigenvalue
        super().__init__(msg or f"matrix is not PSD (eigenvalue {eigenvalue:.3e})")


class SingularBlock(ValueError):
    pass


class PreconditionViolated(ValueError):
    pass


class IterationFailure(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# construction and basic operations

def qarray(x) -> np.ndarray:
    """Coerce real/complex/quaternion data to the (..., 4) layout."""
    if isinstance(x, Quaternion):
        return x.to_array()
    x = np.asarray(x)
    if np.iscomplexobj(x):
        out = np.zeros(x.shape + (4,))
        out[..., 0] = x.real
        out[..., 1] = x.imag
        return out
    if x.dtype == object:
        flat = [qarray(e) for e in x.ravel()]
        return np.array(flat, dtype=float).reshape(x.shape + (4,))
    return np.asarray(x, dtype=float)


def from_real(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape + (4,))
    out[..., 0] = x
    return out


def from_parts(r, i=None, j=None, k=None) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    parts = [r] + [np.zeros_like(r) if p is None else np.asarray(p, dtype=float) for p in (i, j, k)]
    return np.stack(parts, axis=-1)


def to_complex(A: np.ndarray) -> np.ndarray:
    return A[..., 0] + 1j * A[..., 1]


def eye(n: int) -> np.ndarray:
    return from_real(np.eye(n))


def ct(A: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.swapaxes(aconj(A), 0, 1)


def qconj(A: np.ndarray) -> np.ndarray:
    return aconj(A)


def transpose(A: np.ndarray) -> np.ndarray:
    return np.swapaxes(A, 0, 1).copy()


def matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Quaternionic matrix product; B may be a matrix (k, c, 4) or vector (k, 4)."""
    vec = B.ndim == 2
    if vec:
        B = B[:, None, :]
    a = [A[..., t] for t in range(4)]
    b = [B[..., t] for t in range(4)]
    out = np.stack([
        a[0] @ b[0] - a[1] @ b[1] - a[2] @ b[2] - a[3] @ b[3],
        a[0] @ b[1] + a[1] @ b[0] + a[2] @ b[3] - a[3] @ b[2],
        a[0] @ b[2] - a[1] @ b[3] + a[2] @ b[0] + a[3] @ b[1],
        a[0] @ b[3] + a[1] @ b[2] - a[2] @ b[1] + a[3] @ b[0],
    ], axis=-1)
    return out[:, 0, :] if vec else out


def mm(*mats: np.ndarray) -> np.ndarray:
    out = mats[0]
    for M in mats[1:]:
        out = matmul(out, M)
    return out


def herm(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + ct(A))


def fro(A: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.asarray(A) ** 2)))


def inner(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """u* v for quaternion vectors (a quaternion)."""
    return np.sum(amul(aconj(u), v), axis=0)


def field_of(A: np.ndarray, tol: float = 0.0) -> str:
    if A.size == 0:
        return "R"
    scale = tol * max(1.0, float(np.max(np.abs(A))))
    used = [bool(np.max(np.abs(A[..., t])) > scale) for t in range(4)]
    if used[3]:
        return "H"
    if used[2]:
        return "Hk"
    if used[1]:
        return "C"
    return "R"


def in_field(A: np.ndarray, field: str, tol: float = 0.0) -> bool:
    c = FIELD_COMPONENTS[field]
    if c == 4 or A.size == 0:
        return True
    return float(np.max(np.abs(A[..., c:]))) <= tol


# ---------------------------------------------------------------------------
# real embedding

def embed_real(A: np.ndarray) -> np.ndarray:
    r, i, j, k = (A[..., t] for t in range(4))
    return np.block([
        [r, -i, -j, -k],
        [i, r, -k, j],
        [j, k, r, -i],
        [k, -j, i, r],
    ])


def unembed(E: np.ndarray) -> np.ndarray:
    """Inverse of embed_real, read off the first block column."""
    rows, cols = E.shape[0] // 4, E.shape[1] // 4
    col = E[:, :cols]
    return np.stack([col[t * rows:(t + 1) * rows] for t in range(4)], axis=-1)


def vec_real(v: np.ndarray) -> np.ndarray:
    """Quaternion vector (n, 4) -> stacked real vector [v_r; v_i; v_j; v_k]."""
    return np.asarray(v).T.reshape(-1).copy()


def vec_quat(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    return x.reshape(4, -1).T.copy()


def qinv(A: np.ndarray) -> np.ndarray:
    return unembed(np.linalg.inv(embed_real(A)))


def lstsq(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Least-squares solution of A x = b (x, b quaternion vectors)."""
    x = np.linalg.lstsq(embed_real(A), vec_real(b), rcond=None)[0]
    return vec_quat(x)


# ---------------------------------------------------------------------------
# spectral theory

class EigDecomp(NamedTuple):
    U: np.ndarray  # hyperunitary, columns are eigenvectors
    d: np.ndarray  # real eigenvalues, descending


def eigvalsh(A: np.ndarray) -> np.ndarray:
    """Eigenvalues of a hermitian quaternionic matrix, descending."""
    w = np.linalg.eigvalsh(embed_real(herm(A)))[::-1]
    return w.reshape(-1, 4).mean(axis=1)


def _project_out(u: np.ndarray, cols: list[np.ndarray]) -> np.ndarray:
    for c in cols:
        u = u - amul(c, inner(c, u)[None, :])
    return u


def herm_eig(A: np.ndarray) -> EigDecomp:
    A = herm(A)
    n = A.shape[0]
    if n == 0:
        return EigDecomp(np.zeros((0, 0, 4)), np.zeros(0))
    try:
        w, V = np.linalg.eigh(embed_real(A))
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise IterationFailure(str(exc)) from exc
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    gap = EPS_E * (1.0 + fro(A))
    clusters, start = [], 0
    for t in range(1, len(w) + 1):
        if t == len(w) or w[t - 1] - w[t] > gap:
            clusters.append(range(start, t))
            start = t
    cols: list[np.ndarray] = []
    for cl in clusters:
        want = max(1, int(round(len(cl) / 4)))
        cands = [vec_quat(V[:, c]) for c in cl]
        for _ in range(want):
            if len(cols) == n:
                break
            res = [_project_out(u, cols) for u in cands]
            norms = [np.sqrt(anorm2(r).sum()) for r in res]
            best = int(np.argmax(norms))
            cols.append(res[best] / norms[best])
    # second Gram-Schmidt pass for orthonormality to working precision
    U = []
    for c in cols:
        c = _project_out(c, U)
        U.append(c / np.sqrt(anorm2(c).sum()))
    U = np.stack(U, axis=1)
    d = np.array([inner(U[:, t], matmul(A, U[:, t]))[0] for t in range(n)])
    order = np.argsort(-d, kind="stable")
    return EigDecomp(U[:, order], d[order])


def singular_values(A: np.ndarray) -> np.ndarray:
    if A.size == 0:
        return np.zeros(0)
    s = np.linalg.svd(embed_real(A), compute_uv=False)
    return s.reshape(-1, 4).mean(axis=1)


def rank(A: np.ndarray, tol: float = EPS_RANK) -> int:
    s = singular_values(A)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def psd_floor(A: np.ndarray, tol: float = EPS_PSD) -> float:
    return -tol * (1.0 + fro(A))


@dataclass
class Membership:
    """Truthy result of a cone membership test, carrying the evidence."""
    ok: bool
    value: float
    witness: np.ndarray | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_psd(A: np.ndarray, tol: float = EPS_PSD) -> Membership:
    A = herm(A)
    if A.shape[0] == 0:
        return Membership(True, 0.0)
    w, V = np.linalg.eigh(embed_real(A))
    ok = bool(w[0] >= psd_floor(A, tol))
    return Membership(ok, float(w[0]), None if ok else vec_quat(V[:, 0]))


def _psd_eig(A: np.ndarray, tol: float) -> EigDecomp:
    U, d = herm_eig(A)
    if d.size and d[-1] < psd_floor(A, tol):
        raise NotPSD(float(d[-1]))
    return EigDecomp(U, np.clip(d, 0.0, None))


def sqrt_psd(A: np.ndarray, tol: float = EPS_PSD) -> np.ndarray:
    U, d = _psd_eig(A, tol)
    return mm(U * np.sqrt(d)[None, :, None], ct(U))


def factor_gram(A: np.ndarray, tol: float = EPS_PSD, rtol: float = EPS_RANK) -> np.ndarray:
    """V with rank(A) columns and V V* = A."""
    U, d = _psd_eig(A, tol)
    if d.size == 0:
        return np.zeros((A.shape[0], 0, 4))
    keep = d > rtol * max(d[0], 0.0) if d[0] > 0 else np.zeros(d.shape, bool)
    return U[:, keep] * np.sqrt(d[keep])[None, :, None]


def schur_complement(A: np.ndarray, n1: int, tol: float = EPS_PSD) -> np.ndarray:
    A = herm(A)
    A11, A12 = A[:n1, :n1], A[:n1, n1:]
    A21, A22 = A[n1:, :n1], A[n1:, n1:]
    w = eigvalsh(A11)
    if w.size and w[-1] <= tol * (1.0 + fro(A11)):
        raise SingularBlock(f"leading block not positive definite (eigenvalue {w[-1]:.3e})")
    return herm(A22 - mm(A21, qinv(A11), A12))


def char_poly(A: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial, highest degree first."""
    return np.real(np.poly(herm_eig(A).d))


def charpoly_c1(A: np.ndarray) -> float:
    """Closed-form linear coefficient of the characteristic polynomial of a 3x3 hermitian matrix."""
    a = A
    c1 = a[0, 0, 0] * a[1, 1, 0] + a[1, 1, 0] * a[2, 2, 0] + a[0, 0, 0] * a[2, 2, 0]
    for s, t in ((0, 1), (0, 2), (1, 2)):
        c1 -= float(np.sum(a[s, t] ** 2))
    return float(c1)


# ---------------------------------------------------------------------------
# alignment lemmas

def left_matrix(q) -> np.ndarray:
    """4x4 real matrix of x -> q x."""
    return embed_real(np.asarray(q, dtype=float).reshape(1, 1, 4))


def right_matrix(q) -> np.ndarray:
    """4x4 real matrix of x -> x q."""
    return np.stack([amul(e, q) for e in np.eye(4)], axis=1)


def _unit_kernel(M: np.ndarray) -> np.ndarray:
    return np.linalg.svd(M)[2][-1]


def right_normalize(v, p) -> Quaternion:
    """Unit q with Re(v_a q conj(p)) = 0 for every entry v_a."""
    v, p = qarray(v), qarray(p)
    # Re(v q p~) = Re((p~ v) q); Re(u q) = u_r q_r - u_i q_i - u_j q_j - u_k q_k
    u = amul(aconj(p)[None, :], v)
    rows = u * np.array([1.0, -1.0, -1.0, -1.0])
    return Quaternion.from_array(_unit_kernel(rows))


def left_normalize(v, p) -> Quaternion:
    """Unit q with Re(q v_a conj(p)) = 0 for every entry v_a."""
    v, p = qarray(v), qarray(p)
    u = amul(v, aconj(p)[None, :])
    rows = u * np.array([1.0, -1.0, -1.0, -1.0])
    return Quaternion.from_array(_unit_kernel(rows))


def su2so4_align(v, w, eps: float = 1e-8) -> tuple[Quaternion, Quaternion]:
    """Unit quaternions (h, h2) with h2 v = w h, given Re(v v*) = Re(w w*)."""
    v, w = qarray(v), qarray(w)
    gv = mm(v[:, None, :], ct(v[:, None, :]))[..., 0]
    gw = mm(w[:, None, :], ct(w[:, None, :]))[..., 0]
    if np.linalg.norm(gv - gw) > eps * (1.0 + np.linalg.norm(gv)):
        raise PreconditionViolated("real parts of the Gram matrices differ")
    if np.max(np.abs(v)) == 0:
        return Quaternion(1.0), Quaternion(1.0)
    # unknowns (h2, h): h2 v_a - w_a h = 0
    sys = np.vstack([np.hstack([right_matrix(va), -left_matrix(wa)]) for va, wa in zip(v, w)])
    x = _unit_kernel(sys)
    h2, h = x[:4], x[4:]
    h2, h = h2 / np.linalg.norm(h2), h / np.linalg.norm(h)
    res = np.linalg.norm(amul(h2[None, :], v) - amul(w, h[None, :]))
    if res > 1e-8 * (1.0 + np.linalg.norm(v)):
        raise PreconditionViolated(f"alignment residual {res:.2e}")
    return Quaternion.from_array(h), Quaternion.from_array(h2)


# ---------------------------------------------------------------------------
# JSON

def matrix_to_json(A: np.ndarray, hermitian: bool = False, field: str | None = None) -> dict:
    A = qarray(A)
    d = {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "field": field or field_of(A),
        "entries": [[float(x) for x in e] for e in A.reshape(-1, 4)],
    }
    if hermitian:
        d["hermitian"] = True
    return d


def matrix_from_json(d: dict) -> np.ndarray:
    try:
        rows, cols = int(d["rows"]), int(d["cols"])
        field = d.get("field", "H")
        A = np.array(d["entries"], dtype=float).reshape(rows, cols, 4)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if field not in FIELDS:
        raise ValueError(f"unknown field tag {field!r}")
    if not in_field(A, field):
        raise ValueError(f"entries leave field {field}")
    if d.get("hermitian"):
        if rows != cols or np.max(np.abs(A - ct(A)), initial=0.0) > 1e-12:
            raise ValueError("matrix flagged hermitian is not hermitian")
    return A
