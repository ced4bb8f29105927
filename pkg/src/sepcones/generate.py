"""Seeded random instances: separable sums, PPT samples and boundary points."""
from __future__ import annotations

import numpy as np

from . import qlinalg as ql
from .cones import FIELD_OF_M, TensorElement, is_ppt, partial_transpose
from .separability.atoms import Atom, SeparableDecomposition
from .separability.hankel import HankelElement

KINDS = ("separable", "ppt", "boundary")
SPACES = ("SS", "HH", "HS", "QS")


class UnsupportedSpace(ValueError):
    pass


def resolve(space: str | None, m: int, n: int) -> tuple:
    """Map (space, m, n) to ("tensor", m_E, n) or ("hankel", field, n).

    Without a space, m is read as the dimension 3..6 of E_m.
    """
    if space is None:
        if m not in FIELD_OF_M:
            raise UnsupportedSpace(f"m must be in 3..6 without --space, got {m}")
        return ("tensor", m, n)
    if space not in SPACES:
        raise UnsupportedSpace(f"unknown space {space!r}")
    if min(m, n) < 2:
        raise UnsupportedSpace("min(m, n) = 1 cones are trivial; nothing to generate")
    if space == "SS":
        if m == 2 or n == 2:
            return ("tensor", 3, n if m == 2 else m)
    elif space == "HS":
        if m == 2:
            return ("tensor", 4, n)
        if n == 2:
            return ("hankel", "C", m)
    elif space == "QS":
        if m == 2:
            return ("tensor", 6, n)
        if n == 2:
            return ("hankel", "H", m)
    raise UnsupportedSpace(f"no block representation for {space}({m}) (x) ({n})")


def _field_vector(rng, n: int, ncomp: int) -> np.ndarray:
    v = np.zeros((n, 4))
    v[:, :ncomp] = rng.normal(size=(n, ncomp))
    return v / np.sqrt((v ** 2).sum())


def random_atoms(kind: tuple, rng, k: int) -> list:
    atoms = []
    for _ in range(k):
        w = rng.uniform(0.1, 1.0)
        if kind[0] == "tensor":
            m, n = kind[1], kind[2]
            q = np.zeros(4)
            q[:ql.FIELD_COMPONENTS[FIELD_OF_M[m]]] = rng.normal(size=ql.FIELD_COMPONENTS[FIELD_OF_M[m]])
            v = rng.normal(size=n)
            atoms.append(Atom(w, q, v / np.linalg.norm(v)))
        else:
            fld, n = kind[1], kind[2]
            q = np.array([rng.normal(), 0, 0, 0])
            atoms.append(Atom(w, q, _field_vector(rng, n, ql.FIELD_COMPONENTS[fld])))
    return atoms


def ambient_dim(kind: tuple) -> int:
    if kind[0] == "tensor":
        return kind[1] * kind[2] * (kind[2] + 1) // 2
    c, n = ql.FIELD_COMPONENTS[kind[1]], kind[2]
    return 3 * (n + c * n * (n - 1) // 2)


def _element(kind: tuple, D: SeparableDecomposition):
    if kind[0] == "tensor":
        return D.reconstruct(kind[2])
    return HankelElement.from_matrix(D.reconstruct(kind[2]), kind[1])


def _random_herm(rng, n: int, fld: str) -> np.ndarray:
    A = np.zeros((n, n, 4))
    A[..., :ql.FIELD_COMPONENTS[fld]] = rng.normal(size=(n, n, ql.FIELD_COMPONENTS[fld]))
    return ql.herm(A)


def _in_cone(x) -> bool:
    if isinstance(x, TensorElement):
        return bool(is_ppt(x))
    return bool(ql.is_psd(x.assemble()))


def _ppt_sample(kind: tuple, rng, max_tries: int = 200):
    """A random element of the subspace kept only if it is PPT (PSD for block elements)."""
    n = kind[2]
    sigma = 1.0
    for _ in range(max_tries):
        if kind[0] == "tensor":
            m = kind[1]
            G = rng.normal(size=(n, n))
            comps = rng.normal(size=(m, n, n)) * sigma / np.sqrt(m)
            comps[0] = G @ G.T / n + np.eye(n)
            x = TensorElement(m, n, comps)
        else:
            fld = kind[1]
            blocks = [_random_herm(rng, n, fld) for _ in range(3)]
            x = HankelElement(fld, ql.mm(blocks[0], ql.ct(blocks[0])) / n + ql.eye(n),
                              sigma * blocks[1] / np.sqrt(n),
                              ql.mm(blocks[2], ql.ct(blocks[2])) / n + ql.eye(n))
        if _in_cone(x):
            return x
        sigma *= 0.9
    raise RuntimeError("rejection sampling did not produce a PPT element")


def _to_boundary(x, rng):
    """Move x along a random direction of its subspace until an eigenvalue hits zero."""
    if isinstance(x, TensorElement):
        from .separability.spectrahedra import gamma_cone
        cone = gamma_cone(x.m, x.n)
        c = rng.normal(size=cone.dim)
        lo, hi = cone.line_search(x.vector(), c)
        t = hi if np.isfinite(hi) else lo
        return TensorElement.from_vector(x.m, x.n, x.vector() + t * c)
    fld = x.field
    C = HankelElement(fld, *(_random_herm(rng, x.n, fld) for _ in range(3)))
    X, Y = ql.embed_real(x.assemble()), ql.embed_real(C.assemble())
    L = np.linalg.cholesky(X)
    Li = np.linalg.inv(L)
    mu = np.linalg.eigvalsh(Li @ Y @ Li.T)
    t = -1.0 / mu[0] if mu[0] < 0 else -1.0 / mu[-1]
    return HankelElement(fld, x.B11 + t * C.B11, x.B12 + t * C.B12, x.B22 + t * C.B22)


def gen_random(space: str | None, m: int, n: int, kind: str = "separable", seed: int = 0):
    """Random TensorElement or HankelElement of the requested kind, deterministic in seed."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    return sample(resolve(space, m, n), kind, seed)


def sample(target: tuple, kind: str = "separable", seed: int = 0):
    """gen_random on a resolved target such as ("tensor", 6, 3) or ("hankel", "H", 4)."""
    rng = np.random.default_rng(seed)
    if kind == "separable":
        k = int(rng.integers(1, ambient_dim(target) + 1))
        return _element(target, SeparableDecomposition(random_atoms(target, rng, k),
                                                       m=target[1] if target[0] == "tensor" else None))
    x = _ppt_sample(target, rng)
    if kind == "boundary":
        x = _to_boundary(x, rng)
    return x


def boundary_gap(x) -> float:
    """Smallest eigenvalue over the defining PSD constraints, relative to the norm."""
    if isinstance(x, TensorElement):
        mats = [x.assemble(), partial_transpose(x).assemble()]
    else:
        mats = [x.assemble()]
    return min(float(ql.eigvalsh(M)[-1]) for M in mats) / (1.0 + x.norm())
