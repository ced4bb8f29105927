"""Decomposition of PPT elements of E_m (x) S(n) into separable atoms.

The dispatcher peels structure off recursively: zero elements, n = 1
(Lorentz split), linear dependencies between components (reduction of m),
common invariant subspaces (splitting n), and finally the per-case cores
on normalised elements (B11 = I). Elements that are too large for a core
are first moved to a smaller face: E = descend(B) satisfies the core's rank
bound, B - lam E stays in the cone for the maximal lam, and both parts are
decomposed recursively.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import qlinalg as ql
from ..cones import (
    Decomposed, NeedsReductionFirst, NotPPT, Reduced, TensorElement, detect_and_reduce,
    is_ppt, normalize_corner, sym_to_vec, vec_to_sym,
)
from ..quaternion import K, aconj, amul, anorm2, ainv
from ..tensors import TracelessSubspace2, build_delta_tensor, sign_sigma, WrongSign, Degenerate
from .atoms import (
    Atom, INF, SeparableDecomposition, atom_from_lorentz, map_atom, map_atom_lorentz,
    split_lorentz, verify_decomposition,
)
from .completion import CommutationFailure, completion_atoms, factor_normalized, gram_factor
from .spectrahedra import LineSearchFailure, gamma_cone, symmetric_slice


class CoreFailure(RuntimeError):
    """A case core does not apply to this element; the caller falls back."""


class InternalInconsistency(CoreFailure):
    pass


class ProgressFailure(RuntimeError):
    pass


class Undecided(RuntimeError):
    """No separable decomposition was found (and none is claimed to exist)."""


class DecompositionFailure(RuntimeError):
    pass


# rank bounds under which the cores apply; ranks are per constraint
STOP = {
    4: lambda r: r[0] <= 3,
    5: lambda r: r[0] <= 4,
    6: lambda r: r[0] <= 5 and r[1] <= 5,
}


# ---------------------------------------------------------------------------
# per-case cores on normalised elements

def core_43(Bn: TensorElement, seed: int = 0) -> list:
    W, Z = factor_normalized(Bn)
    if Z.shape[1]:
        raise CoreFailure("Schur complement does not vanish")
    try:
        return completion_atoms(W, Z, None, 2, seed=seed)
    except CommutationFailure as exc:
        raise CoreFailure(str(exc)) from exc


def completion_offsets(W: np.ndarray) -> tuple[np.ndarray, object]:
    """Offsets x_a with W_a - x_a I in the span of the delta-tensor components."""
    mats = [W[..., 0], W[..., 1], W[..., 2], np.eye(3)]
    try:
        L = TracelessSubspace2.complement_of(mats)
    except ValueError as exc:
        raise InternalInconsistency("W_r, W_i, W_j, I are dependent") from exc
    if sign_sigma(L) != -1:
        raise InternalInconsistency("complement does not have sign -1")
    try:
        dc = build_delta_tensor(L)
    except (WrongSign, Degenerate) as exc:
        raise InternalInconsistency(str(exc)) from exc
    basis = np.array(list(dc.tensor.matrices()) + [np.eye(3)])
    A = sym_to_vec(basis).T
    x = np.zeros(4)
    for a in range(3):
        coef, *_ = np.linalg.lstsq(A, sym_to_vec(W[..., a]), rcond=None)
        if np.linalg.norm(A @ coef - sym_to_vec(W[..., a])) > 1e-7 * (1 + np.linalg.norm(W[..., a])):
            raise InternalInconsistency("W component outside the complement of L")
        x[a] = coef[3]
    return x, dc


def core_53(Bn: TensorElement, seed: int = 0) -> list:
    W, Z = factor_normalized(Bn)
    r = Z.shape[1]
    if r == 0:
        try:
            return completion_atoms(W, Z, None, 3, seed=seed)
        except CommutationFailure as exc:
            raise CoreFailure(str(exc)) from exc
    if r > 1:
        raise CoreFailure("Schur complement has rank above 1")
    h = ql.right_normalize(Z[:, 0], K).to_array()
    Z = amul(Z, h[None, None, :])
    Z[..., 3] = 0.0
    if np.linalg.svd(Z[:, 0, :3], compute_uv=False)[-1] <= 1e-8 * (1 + np.abs(Z).max()):
        raise InternalInconsistency("components of Z are dependent")
    x, _ = completion_offsets(W)
    X = x.reshape(1, 1, 4)
    try:
        return completion_atoms(W, Z, X, 3, seed=seed)
    except CommutationFailure as exc:
        raise InternalInconsistency(str(exc)) from exc


@dataclass
class Peel:
    atom: Atom
    case: str
    xi: np.ndarray
    alpha: float


def _commutator_map(W, vz, vy) -> np.ndarray:
    """4 x 6 real matrix of M -> v_z^* (W M - M W) v_y on orthonormal S(3) coordinates."""
    cols = []
    for e in np.eye(6):
        M = ql.from_real(vec_to_sym(e, 3))
        C = ql.mm(W, M) - ql.mm(M, W)
        cols.append(ql.inner(vz, ql.matmul(C, vy)))
    return np.array(cols).T


def rank_one_in_subspace(basis: np.ndarray, seed: int = 0) -> np.ndarray:
    """xi with xi xi^T in span(basis) intersected with S_+(3), found from I_3."""
    cone = symmetric_slice(basis)
    P = sym_to_vec(basis)
    x0 = P @ sym_to_vec(np.eye(3))
    if np.linalg.norm(P.T @ x0 - sym_to_vec(np.eye(3))) > 1e-8:
        raise InternalInconsistency("identity is not in the subspace")
    e = cone.descend(x0, stop=lambda r: r[0] <= 1, rng=np.random.default_rng(seed))
    w, V = np.linalg.eigh(np.tensordot(e, basis, 1))
    return np.sqrt(max(w[-1], 0.0)) * V[:, -1]


def peel_63(Bn: TensorElement, seed: int = 0, rtol: float = 1e-9) -> Peel:
    _, B12, B22 = Bn.blocks()
    W = aconj(B12)
    Wb = aconj(W)
    SZ = ql.herm(B22 - ql.mm(W, Wb))
    SY = ql.herm(B22 - ql.mm(Wb, W))
    atol = rtol * (1.0 + ql.fro(B22))
    Z = gram_factor(SZ, "H", rtol, atol)
    Ys = gram_factor(SY, "H", rtol, atol)       # Y^*
    if Z.shape[1] != 2 or Ys.shape[1] != 2:
        raise CoreFailure(f"case 1 (ranks {Z.shape[1]}, {Ys.shape[1]})")
    vz = ql.herm_eig(SZ).U[:, -1]
    vy = ql.herm_eig(SY).U[:, -1]
    G = _commutator_map(W, vz, vy)
    _, s, Vt = np.linalg.svd(G, full_matrices=True)
    scale = 1.0 + ql.fro(W) ** 2
    s_full = np.zeros(6)
    s_full[:s.size] = s
    keep = s_full <= 1e-8 * scale
    if keep.sum() < 5:
        raise InternalInconsistency("commutator map has rank above 1")
    basis = vec_to_sym(Vt[keep], 3)
    xi = rank_one_in_subspace(basis, seed)
    nxi2 = float(xi @ xi)
    xiq = ql.from_real(xi)
    a = ql.inner(vz, xiq)                              # v_z^* xi
    b = np.einsum("i,it->t", xi, vy)                   # xi^T v_y
    tol = 1e-8 * np.sqrt(nxi2)

    def solve(M, rhs):
        sol = ql.lstsq(M, rhs)
        if ql.fro(ql.matmul(M, sol) - rhs) > 1e-7 * (1 + ql.fro(rhs)):
            raise InternalInconsistency("peeling system has no solution")
        return sol

    if np.sqrt(anorm2(a)) <= tol and np.sqrt(anorm2(b)) <= tol:
        zz = solve(Z, xiq)
        zy = solve(Ys, xiq)
        alpha = min(1.0 / anorm2(zz).sum(), 1.0 / anorm2(zy).sum())
        return Peel(Atom(alpha * nxi2, INF, xi / np.sqrt(nxi2)), "2.1", xi, alpha)
    Wxi = ql.matmul(W, xiq)
    if anorm2(a) >= anorm2(b):
        q = amul(ainv(a), ql.inner(vz, Wxi))
    else:
        q = amul(np.einsum("i,it->t", xi, ql.matmul(W, vy)), ainv(b))
    qxi = amul(q[None, :], xiq)
    zz = solve(Z, -(Wxi - qxi))
    zy = solve(Ys, -(ql.matmul(Wb, xiq) - amul(aconj(q)[None, :], xiq)))
    alpha = min(1.0 / (nxi2 + anorm2(zz).sum()), 1.0 / (nxi2 + anorm2(zy).sum()))
    return Peel(Atom(alpha * nxi2, q, xi / np.sqrt(nxi2)), "2.2", xi, alpha)


# ---------------------------------------------------------------------------
# the dispatcher

def _rank_one_atom(E: TensorElement) -> Atom | None:
    """Atom of an element x (x) v v^T, or None if E is not of that form."""
    M = E.components.reshape(E.m, -1)
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    if s[0] == 0 or (s.size > 1 and s[1] > 1e-7 * s[0]):
        return None
    x = U[:, 0] * s[0]
    P = Vt[0].reshape(E.n, E.n)
    w, V = np.linalg.eigh(P)
    if abs(w[-1]) < abs(w[0]):
        w, x = -w[::-1], -x
        V = V[:, ::-1]
    if abs(w[-2]) > 1e-7 * abs(w[-1]) if E.n > 1 else False:
        return None
    v = V[:, -1] * np.sqrt(w[-1])
    return atom_from_lorentz(x, v)


@dataclass
class Decomposer:
    tol: float = ql.EPS_E
    seed: int = 0
    max_depth: int = 400
    branches: list = field(default_factory=list)
    zero: float = 0.0

    def note(self, what: str):
        self.branches.append(what)

    def __call__(self, B: TensorElement) -> list:
        self.zero = 1e-11 * B.norm()
        self.rng = np.random.default_rng(self.seed)
        return self.run(B, 0)

    # ----------------------------------------------------------------
    def run(self, B: TensorElement, depth: int) -> list:
        if depth > self.max_depth:
            raise ProgressFailure("recursion depth exceeded")
        if B.norm() <= self.zero:
            return []
        if B.n == 1:
            self.note("lorentz")
            return split_lorentz(B.components[:, 0, 0], np.ones(1))
        if B.m > 3 and B.n == 3:
            return self.face_loop(B, depth)
        return self.structural(B, depth)

    def structural(self, B: TensorElement, depth: int) -> list:
        out = detect_and_reduce(B, check=False, seed=self.seed)
        if isinstance(out, (Reduced, Decomposed)):
            return self.outcome(out, depth)
        if B.m == 3:
            return self.normalized(B, self.core_3, depth)
        if B.n == 3:
            return self.face_loop(B, depth, structural=False)
        return self.generic(B, depth)

    def outcome(self, out, depth: int) -> list:
        if isinstance(out, Reduced):
            self.note(f"reduce:{out.case}")
            Ainv = np.linalg.inv(out.lorentz)
            sub = self.run(out.element, depth + 1)
            return [a for a in (map_atom_lorentz(t, Ainv, out.element.m) for t in sub) if a is not None]
        if isinstance(out, Decomposed):
            self.note("split")
            n1 = out.first.n
            T = out.transform
            atoms = []
            for part, cols in ((out.first, T[:, :n1]), (out.second, T[:, n1:])):
                for t in self.run(part, depth + 1):
                    a = map_atom(t, None, cols)
                    if a is not None:
                        atoms.append(a)
            return atoms
        raise CoreFailure("irreducible")

    def normalized(self, B: TensorElement, core, depth: int) -> list:
        out = normalize_corner(B, check=False, seed=self.seed)
        if isinstance(out, NeedsReductionFirst):
            inner = out.outcome
            if isinstance(inner, (Reduced, Decomposed)):
                return self.outcome(inner, depth)
            return self.generic(B, depth)
        g = out.group
        atoms = core(out.element, depth)
        Linv = ql.qinv(g.left)
        Rinv = np.linalg.inv(g.right)
        return [a for a in (map_atom(t, Linv, Rinv) for t in atoms) if a is not None]

    # cores with the dispatcher signature ------------------------------
    def core_3(self, Bn: TensorElement, depth: int) -> list:
        self.note("completion")
        W, Z = factor_normalized(Bn)
        return completion_atoms(W, Z, None, 1, seed=self.seed)

    def core_4(self, Bn, depth):
        atoms = core_43(Bn, self.seed)
        self.note("core43")
        return atoms

    def core_5(self, Bn, depth):
        atoms = core_53(Bn, self.seed)
        self.note("core53")
        return atoms

    def core_6(self, Bn, depth):
        cone = gamma_cone(6, Bn.n)
        before = sum(cone.ranks(Bn.vector()))
        p = peel_63(Bn, self.seed)
        R = Bn - p.atom.element(6)
        if not is_ppt(R, 1e-8):
            raise ProgressFailure("peeled remainder is not PPT")
        after = sum(cone.ranks(R.vector()))
        if after >= before:
            raise ProgressFailure(f"combined rank did not decrease ({before} -> {after})")
        self.note(f"peel{p.case}")
        return [p.atom] + self.run(R, depth + 1)

    # -----------------------------------------------------------------
    def face_loop(self, B: TensorElement, depth: int, structural: bool = True) -> list:
        m, n = B.m, B.n
        cone = gamma_cone(m, n)
        stop = STOP[m]
        core = {4: self.core_4, 5: self.core_5, 6: self.core_6}[m]
        x = B.vector()
        if stop(cone.ranks(x)):
            try:
                return self.normalized(B, core, depth)
            except (CoreFailure, CommutationFailure, ProgressFailure, ql.NotPSD) as exc:
                self.note(f"fallback:{type(exc).__name__}")
                if structural:
                    return self.structural(B, depth)
                return self.generic(B, depth)
        if structural:
            return self.structural(B, depth)
        self.note("descend")
        e = cone.descend(x, stop, self.rng)
        lam = cone.max_step(x, e)
        E = TensorElement.from_vector(m, n, lam * e)
        return self.run(E, depth + 1) + self.run(B - E, depth + 1)

    def generic(self, B: TensorElement, depth: int) -> list:
        """Descend to an extreme point; when it is a product atom, peel it off."""
        cone = gamma_cone(B.m, B.n)
        x = B.vector()
        e = cone.descend(x, None, self.rng)
        a = _rank_one_atom(TensorElement.from_vector(B.m, B.n, e))
        if a is None:
            raise Undecided(f"extreme point of rank {cone.ranks(e)} is not a product")
        self.note("extreme")
        lam = cone.max_step(x, e)
        E = TensorElement.from_vector(B.m, B.n, lam * e)
        a = _rank_one_atom(E)
        return [a] + self.run(B - E, depth + 1)


def decompose(B: TensorElement, tol: float = ql.EPS_E, seed: int = 0, max_depth: int = 400,
              check: bool = True) -> SeparableDecomposition:
    """Separable decomposition of a PPT element; raises Undecided when no decomposition verifies."""
    if check:
        ppt = is_ppt(B)
        if not ppt:
            raise NotPPT(f"input is not PPT (eigenvalue {ppt.value:.3e})")
    dec = Decomposer(tol, seed, max_depth)
    try:
        atoms = dec(B)
    except (LineSearchFailure, ProgressFailure, CoreFailure) as exc:
        raise Undecided(f"decomposition failed: {exc}") from exc
    D = SeparableDecomposition(atoms, B.digest(), B.m, dec.branches)
    res = verify_decomposition(B, D, tol)
    D.residual = float(res.residual)
    if not res:
        raise Undecided(f"decomposition does not verify: {res.reason} ({res.residual:.2e})")
    return D.canonicalized()


def _require(B: TensorElement, m: int, n: int | None = None):
    if B.m != m or (n is not None and B.n != n):
        raise ValueError(f"expected an element of E_{m} (x) S({n if n else 'n'})")


def decompose_real_block_hankel(B: TensorElement, **kw) -> SeparableDecomposition:
    _require(B, 3)
    return decompose(B, **kw)


def decompose_43(B: TensorElement, **kw) -> SeparableDecomposition:
    _require(B, 4, 3)
    return decompose(B, **kw)


def decompose_53(B: TensorElement, **kw) -> SeparableDecomposition:
    _require(B, 5, 3)
    return decompose(B, **kw)


def decompose_63(B: TensorElement, **kw) -> SeparableDecomposition:
    _require(B, 6, 3)
    return decompose(B, **kw)
