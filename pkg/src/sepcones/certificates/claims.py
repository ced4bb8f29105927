"""Certificates for the explicit example matrices.

gamma44            a PPT element of H(2) (x) S(4) with no product vector in its range
q3_transpose       Q+(3) is not closed under transposition, Q+(2) is
q2s3_psd_not_ppt   a PSD element of Q(2) (x) S(3) whose partial transpose is not PSD
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import json

import numpy as np

from .. import qlinalg as ql
from ..cones import TensorElement, is_ppt
from ..quaternion import Quaternion, conj as qconj
from .exact import IntPoly, MPoly, count_real_roots, det, exact_psd, maximal_minors, poly_gcd

# ---------------------------------------------------------------------------
# the example data, as integer (real, imaginary) parts

W44_RE = ((-1, 0, 0, 0), (0, 1, -1, 0), (0, -1, 1, 0), (0, 0, 0, 2))
W44_IM = ((-1, 2, 1, 0), (2, 1, 2, -2), (1, 2, 1, 2), (0, -2, 2, -1))
Z44_RE = (1, 0, 0, 0)
Z44_IM = (0, 3, 0, 0)
GRAM44 = ((8, 2, 4, -2), (2, 24, 0, 4), (4, 0, 12, -4), (-2, 4, -4, 13))

# reduced systems in (v1, v2^r) for lambda^r = 0 and 2; each entry is (constant, coefficient of lambda^i)
REDUCED44 = {
    0: (((-1, 0), (0, 0), (0, 0), (0, 0), (1, 0)),
        ((0, 0), (-1, 0), (1, 0), (0, 0), (0, 0)),
        ((0, 0), (0, 0), (0, 0), (2, 0), (0, 0)),
        ((-1, -1), (2, 0), (1, 0), (0, 0), (0, 0)),
        ((2, 0), (1, -1), (2, 0), (-2, 0), (3, 0)),
        ((1, 0), (2, 0), (1, -1), (2, 0), (0, 0)),
        ((0, 0), (-2, 0), (2, 0), (-1, -1), (0, 0))),
    2: (((-3, 0), (0, 0), (0, 0), (0, 0), (1, 0)),
        ((0, 0), (-1, 0), (-1, 0), (0, 0), (0, 0)),
        ((-1, -1), (2, 0), (1, 0), (0, 0), (0, 0)),
        ((2, 0), (1, -1), (2, 0), (-2, 0), (3, 0)),
        ((1, 0), (2, 0), (1, -1), (2, 0), (0, 0)),
        ((0, 0), (-2, 0), (2, 0), (-1, -1), (0, 0))),
}

# 6x6 element of Q(2) (x) S(3); entries as (r, i, j, k)
_O, _1, _m1 = (0, 0, 0, 0), (1, 0, 0, 0), (-1, 0, 0, 0)
_i, _mi = (0, 1, 0, 0), (0, -1, 0, 0)
_j, _mj = (0, 0, 1, 0), (0, 0, -1, 0)
_k, _mk = (0, 0, 0, 1), (0, 0, 0, -1)


def _s(a):
    return (a, 0, 0, 0)


Q2S3 = (
    (_s(2), _O, _O, _m1, _mi, _k),
    (_O, _s(5), _O, _mi, _O, _mj),
    (_O, _O, _s(2), _k, _mj, _1),
    (_m1, _i, _mk, _s(4), _O, _O),
    (_i, _O, _j, _O, _s(1), _O),
    (_mk, _j, _1, _O, _O, _s(4)),
)

Q3_VECTOR = (_1, _i, _j)
Q3_GRAM = ((_1, _mi, _mj), (_i, _1, _mk), (_j, _k, _1))
Q2_VECTOR = (_1, _i)


# ---------------------------------------------------------------------------

@dataclass
class Failed:
    step: str
    diagnostics: dict = field(default_factory=dict)


@dataclass
class Certificate:
    claim_id: str
    verdict: object              # "Verified" or Failed
    evidence: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.verdict == "Verified"

    def to_json(self) -> dict:
        v = self.verdict if self.verified else {"failed": self.verdict.step,
                                                "diagnostics": self.verdict.diagnostics}
        return {"claim": self.claim_id, "verdict": v, "evidence": self.evidence, "inputs": self.inputs}

    def dumps(self, pretty: bool = False) -> str:
        return json.dumps(self.to_json(), indent=2 if pretty else None, sort_keys=True)

    @classmethod
    def from_json(cls, d: dict) -> "Certificate":
        try:
            v = d["verdict"]
            verdict = v if v == "Verified" else Failed(v["failed"], v.get("diagnostics", {}))
            return cls(d["claim"], verdict, d.get("evidence", {}), d.get("inputs", {}))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed certificate JSON: {exc}") from exc


class _Fail(Exception):
    def __init__(self, step, **diag):
        super().__init__(step)
        self.step, self.diag = step, diag


def _run(claim_id: str, inputs: dict, body) -> Certificate:
    evidence: dict = {}
    try:
        body(evidence)
    except _Fail as f:
        return Certificate(claim_id, Failed(f.step, f.diag), evidence, inputs)
    return Certificate(claim_id, "Verified", evidence, inputs)


def _lists(x):
    return [list(_lists(r)) if isinstance(r, (tuple, list)) else r for r in x]


# ---------------------------------------------------------------------------
# gamma44

def _gauss_mat(re, im):
    return [[(int(a), int(b)) for a, b in zip(r1, r2)] for r1, r2 in zip(re, im)]


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _element_44(W_re, W_im, Z_re, Z_im) -> TensorElement:
    W = np.array(W_re, float) + 1j * np.array(W_im, float)
    Z = np.array(Z_re, float) + 1j * np.array(Z_im, float)
    V = np.zeros((8, 5), complex)
    V[:4, :4] = np.eye(4)
    V[4:, :4] = W
    V[4:, 4] = Z
    X = V @ V.conj().T
    Xq = np.zeros((8, 8, 4))
    Xq[..., 0], Xq[..., 1] = X.real, X.imag
    return TensorElement.from_assembled(Xq, 4)


def coefficient_matrix_44(W_re, W_im, Z_re, Z_im) -> list:
    """The 8x6 real system in (v1, v2^r, v2^i) with entries in Z[lambda^r, lambda^i]."""
    lr, li = MPoly.var(0, 2), MPoly.var(1, 2)
    rows = []
    for part in (0, 1):
        for a in range(4):
            row = []
            for b in range(4):
                w = (W_re, W_im)[part][a][b]
                row.append(MPoly.const(w, 2) - ((lr if part == 0 else li) if a == b else 0))
            zr, zi = Z_re[a], Z_im[a]
            row += [MPoly.const(zr if part == 0 else zi, 2), MPoly.const(-zi if part == 0 else zr, 2)]
            rows.append(row)
    return rows


def _as_pair(p: MPoly):
    """(constant, coefficient of lambda^i) of a polynomial of degree <= 1 in lambda^i alone."""
    u = p.univariate(1)
    if u.degree > 1:
        raise ValueError("entry is not affine in lambda^i")
    c = u.coeffs + (0, 0)
    return (c[0], c[1])


def certify_44_counterexample(W_re=W44_RE, W_im=W44_IM, Z_re=Z44_RE, Z_im=Z44_IM) -> Certificate:
    inputs = {"W_re": _lists(W_re), "W_im": _lists(W_im), "Z_re": list(Z_re), "Z_im": list(Z_im)}

    def body(ev):
        W = _gauss_mat(W_re, W_im)
        Z = list(zip(Z_re, Z_im))
        # (a) W is symmetric
        asym = [(a, b) for a in range(4) for b in range(4) if W[a][b] != W[b][a]]
        ev["a_W_symmetric"] = not asym
        if asym:
            raise _Fail("a", entries=asym)
        # (b) W W^* + Z Z^* is the expected real symmetric matrix
        G = [[(0, 0)] * 4 for _ in range(4)]
        for a in range(4):
            for b in range(4):
                acc = _gmul(Z[a], (Z[b][0], -Z[b][1]))
                for c in range(4):
                    t = _gmul(W[a][c], (W[b][c][0], -W[b][c][1]))
                    acc = (acc[0] + t[0], acc[1] + t[1])
                G[a][b] = acc
        ev["b_gram"] = [[g[0] for g in r] for r in G]
        if any(g[1] for r in G for g in r) or ev["b_gram"] != _lists(GRAM44):
            raise _Fail("b", gram=[[list(g) for g in r] for r in G])
        # the element itself, numerically: PSD and PPT
        B = _element_44(W_re, W_im, Z_re, Z_im)
        ppt = is_ppt(B)
        ev["b_is_ppt"] = bool(ppt)
        ev["b_rank"] = int(np.linalg.matrix_rank(B.assemble()[..., 0] + 1j * B.assemble()[..., 1], 1e-9))
        if not ppt:
            raise _Fail("b", min_eigenvalue=ppt.value)
        # v1 = 0 forces Z v2 to be a product vector: Re Z, Im Z must be independent
        zminors = [Z_re[a] * Z_im[b] - Z_re[b] * Z_im[a] for a in range(4) for b in range(a + 1, 4)]
        ev["c_Z_not_real_multiple"] = any(zminors)
        if not any(zminors):
            raise _Fail("c0", Z=[list(z) for z in Z])
        # (c) determinant of the last six rows is const * lambda^r (2 - lambda^r)
        M = coefficient_matrix_44(W_re, W_im, Z_re, Z_im)
        D = det(M[2:], MPoly.const(0, 2))
        ev["c_det_last6"] = D.to_json()
        try:
            Dr = D.univariate(0)
        except ValueError:
            raise _Fail("c1", det=D.to_json(), reason="depends on lambda^i")
        target = IntPoly((0, 2, -1))
        if Dr.is_zero() or Dr.degree != 2 or Dr.coeffs[0] != 0 or Dr.coeffs[1] != -2 * Dr.coeffs[2]:
            raise _Fail("c1", det=Dr.to_json(), reason="not proportional to l(2-l)")
        ev["c_proportionality_constant"] = Dr.lead // target.lead
        # (d) for each root, eliminate v2^i and show the reduced system has full column rank for all lambda^i
        ev["reduced"] = {}
        for root in (0, 2):
            Ms = [[e.subs(0, root) for e in row] for row in M]
            combo = None
            for s in (1, -1):
                r = [Ms[1][c] + Ms[2][c] * s for c in range(6)]
                if all(e.is_zero() for e in r[:5]) and not r[5].is_zero():
                    combo = s
            if combo is None:
                raise _Fail("d", root=root, reason="rows 2 and 3 do not isolate v2^i")
            red = [row[:5] for i, row in enumerate(Ms) if i != 1]
            red = [row for row in red if not all(e.is_zero() for e in row)]
            pairs = [[_as_pair(e) for e in row] for row in red]
            matches = pairs == [list(r) for r in REDUCED44[root]]
            minors = maximal_minors([[IntPoly(e.univariate(1).coeffs) for e in row] for row in red],
                                    IntPoly())
            nonzero = [p for p in minors.values() if not p.is_zero()]
            g = IntPoly()
            for p in nonzero:
                g = poly_gcd(g, p) if not g.is_zero() else p.primitive()
            nroots = count_real_roots(g) if not g.is_zero() else None
            ev["reduced"][str(root)] = {
                "row_combination": combo,
                "matches_reference": matches,
                "n_minors": len(minors),
                "n_nonzero_minors": len(nonzero),
                "minor_gcd": g.to_json(),
                "gcd_real_roots": nroots,
            }
            if not matches:
                raise _Fail("d", root=root, system=[[list(p) for p in r] for r in pairs])
            if g.is_zero() or nroots != 0:
                raise _Fail("d", root=root, minor_gcd=g.to_json(), real_roots=nroots)

    return _run("gamma44", inputs, body)


# ---------------------------------------------------------------------------
# quaternion transposition examples

def _q(t) -> Quaternion:
    return Quaternion(*t)


def _qt(q: Quaternion) -> list:
    return [q.r, q.i, q.j, q.k]


def _outer(v):
    return [[_q(a) * qconj(_q(b)) for b in v] for a in v]


def _quad(v, A) -> Quaternion:
    acc = Quaternion(0, 0, 0, 0)
    for a in range(len(v)):
        for b in range(len(v)):
            acc = acc + qconj(_q(v[a])) * A[a][b] * _q(v[b])
    return acc


def _transpose(A):
    return [list(r) for r in zip(*A)]


def _to_array(A) -> np.ndarray:
    return np.array([[_qt(x) for x in r] for r in A], dtype=float)


def certify_q3_transpose(v=Q3_VECTOR) -> Certificate:
    inputs = {"v": _lists(v)}

    def body(ev):
        A = _outer(v)
        n = len(v)
        ev["gram"] = [[_qt(x) for x in r] for r in A]
        ev["gram_matches_reference"] = ev["gram"] == _lists(Q3_GRAM) if n == 3 else None
        # A v = (v^* v) v exactly, and A = v v^* is PSD of rank one
        nv = sum(_qt(_q(a) * qconj(_q(a)))[0] for a in v)
        Av = [sum((A[a][b] * _q(v[b]) for b in range(n)), Quaternion(0, 0, 0, 0)) for a in range(n)]
        ev["eigen_relation"] = all(_qt(Av[a]) == [nv * x for x in v[a]] for a in range(n))
        w = ql.eigvalsh(_to_array(A))
        ev["eigenvalues"] = [round(float(x), 12) for x in w]
        if not ev["eigen_relation"] or abs(w[0] - nv) > 1e-9 or np.max(np.abs(w[1:]), initial=0) > 1e-9:
            raise _Fail("gram_psd", eigenvalues=ev["eigenvalues"])
        val = _quad(v, _transpose(A))
        ev["witness_value"] = _qt(val)
        if val.i or val.j or val.k or val.r >= 0:
            raise _Fail("transpose_value", value=_qt(val))
        # Q+(2) stays closed: the 2x2 criterion a11, a22 >= 0, a11 a22 >= |a12|^2 is transpose invariant
        A2 = _transpose(_outer(Q2_VECTOR))
        a11, a22, a12 = A2[0][0].r, A2[1][1].r, A2[0][1]
        ev["q2_transpose_psd"] = a11 >= 0 and a22 >= 0 and a11 * a22 >= sum(x * x for x in _qt(a12))
        if not ev["q2_transpose_psd"]:
            raise _Fail("q2")

    return _run("q3_transpose", inputs, body)


def certify_q2s3_psd_not_ppt(matrix=Q2S3, gap: float = 1e-3) -> Certificate:
    inputs = {"matrix": _lists(matrix)}

    def body(ev):
        A = [[_q(x) for x in r] for r in matrix]
        n = len(A)
        herm = all(_qt(A[a][b]) == _qt(qconj(A[b][a])) for a in range(n) for b in range(n))
        ev["hermitian"] = herm
        if not herm:
            raise _Fail("hermitian")
        h = n // 2
        blocks_sym = all(_qt(A[s * h + a][t * h + b]) == _qt(A[s * h + b][t * h + a])
                         for s in range(2) for t in range(2) for a in range(h) for b in range(h))
        ev["blocks_symmetric"] = blocks_sym
        if not blocks_sym:
            raise _Fail("membership")
        X = _to_array(A)
        E = ql.embed_real(X).round().astype(int).tolist()
        ok, pivots = exact_psd(E)
        ev["psd_exact"] = ok
        ev["psd_pivots"] = [str(p) for p in pivots]
        ev["eigenvalues"] = [float(x) for x in ql.eigvalsh(X)]
        if not ok:
            raise _Fail("psd", pivots=ev["psd_pivots"])
        XT = ql.transpose(X)
        w, V = np.linalg.eigh(ql.embed_real(XT))
        ev["transpose_min_eigenvalue"] = float(w[0])
        # round the witness to rationals and evaluate the quadratic form exactly
        u = [Fraction(float(x)).limit_denominator(1000) for x in V[:, 0]]
        ET = ql.embed_real(XT).round().astype(int).tolist()
        val = sum(u[a] * ET[a][b] * u[b] for a in range(len(u)) for b in range(len(u)))
        ev["transpose_witness_value"] = str(val)
        ev["transpose_witness_norm2"] = str(sum(x * x for x in u))
        if not w[0] < -gap or not val < 0:
            raise _Fail("transpose", eigenvalue=float(w[0]), witness_value=str(val))
        # the partial transpose of the element is unitarily equivalent to its transpose
        ev["partial_transpose_min_eigenvalue"] = float(ql.eigvalsh(_partial_transpose_blocks(X, h))[-1])

    return _run("q2s3_psd_not_ppt", inputs, body)


def _partial_transpose_blocks(X: np.ndarray, h: int) -> np.ndarray:
    """Transpose of the outer 2x2 factor: the off-diagonal blocks trade places."""
    out = X.copy()
    out[:h, h:], out[h:, :h] = X[h:, :h], X[:h, h:]
    return out


# ---------------------------------------------------------------------------

CERTIFICATES = {
    "gamma44": certify_44_counterexample,
    "q3_transpose": certify_q3_transpose,
    "q2s3_psd_not_ppt": certify_q2s3_psd_not_ppt,
}

_INPUT_NAMES = {
    "gamma44": ("W_re", "W_im", "Z_re", "Z_im"),
    "q3_transpose": ("v",),
    "q2s3_psd_not_ppt": ("matrix",),
}


def _tuples(x):
    return tuple(_tuples(e) for e in x) if isinstance(x, list) else x


def certify(name: str, **inputs) -> Certificate:
    if name not in CERTIFICATES:
        raise KeyError(f"unknown certificate {name!r}; choose from {sorted(CERTIFICATES)}")
    return CERTIFICATES[name](**inputs)


def replay(stored: Certificate | dict) -> Certificate:
    """Re-run a stored certificate on its recorded inputs; Failed unless verdict and evidence agree."""
    if isinstance(stored, dict):
        stored = Certificate.from_json(stored)
    kw = {k: _tuples(stored.inputs[k]) for k in _INPUT_NAMES[stored.claim_id] if k in stored.inputs}
    fresh = certify(stored.claim_id, **kw)
    same = json.loads(fresh.dumps()) == json.loads(stored.dumps())
    if not same:
        return Certificate(stored.claim_id, Failed("replay", {"reason": "evidence differs"}),
                           fresh.evidence, fresh.inputs)
    return fresh
