import numpy as np
import pytest
from hypothesis import given, strategies as st

from sepcones import qlinalg as ql
from sepcones.quaternion import amul, aconj, Quaternion

from conftest import random_herm, random_psd, random_qmat

seeds = st.integers(0, 2 ** 32 - 1)


def test_embed_unit_i():
    E = ql.embed_real(np.array([[[0.0, 1.0, 0.0, 0.0]]]))
    assert E[1, 0] == 1 and E[0, 1] == -1 and E[2, 3] == -1 and E[3, 2] == 1
    assert np.allclose(ql.embed_real(ql.eye(3)), np.eye(12))


def test_embed_is_homomorphism(rng):
    A, B = random_qmat(rng, 3, 4), random_qmat(rng, 4, 2)
    assert np.allclose(ql.embed_real(ql.mm(A, B)), ql.embed_real(A) @ ql.embed_real(B))
    assert np.allclose(ql.embed_real(ql.ct(A)), ql.embed_real(A).T)


def test_embed_trace(rng):
    A = random_herm(rng, 4)
    assert np.isclose(np.trace(ql.embed_real(A)), 4 * np.trace(A[..., 0]))


def test_herm_eig_diagonal():
    A = ql.from_real(np.diag([3.0, 1.0, -2.0]))
    U, d = ql.herm_eig(A)
    assert np.allclose(d, [3, 1, -2])
    assert np.allclose(np.linalg.norm(U, axis=-1), np.eye(3))


def test_herm_eig_rank_one():
    v = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]], float)
    A = amul(v[:, None], aconj(v)[None, :])
    _, d = ql.herm_eig(A)
    assert np.allclose(d, [3, 0, 0], atol=1e-12)
    assert np.allclose(ql.char_poly(A), [1, -3, 0, 0], atol=1e-10)


@given(seeds, st.integers(1, 5), st.sampled_from([1, 2, 3, 4]))
def test_herm_eig_reconstructs(seed, n, ncomp):
    rng = np.random.default_rng(seed)
    A = random_herm(rng, n, ncomp)
    U, d = ql.herm_eig(A)
    assert ql.fro(ql.mm(U, ql.ct(U)) - ql.eye(n)) <= ql.EPS_U
    R = ql.mm(U * d[None, :, None], ql.ct(U))
    assert ql.fro(R - A) <= ql.EPS_E * (1 + ql.fro(A))


@given(seeds, st.integers(1, 5))
def test_charpoly_fourth_power(seed, n):
    rng = np.random.default_rng(seed)
    A = random_herm(rng, n)
    p = ql.char_poly(A)
    p4 = np.real(np.poly(np.linalg.eigvalsh(ql.embed_real(A))))
    want = np.polynomial.polynomial.polypow(p[::-1], 4)[::-1]
    assert np.allclose(p4, want, rtol=1e-8, atol=1e-8 * np.abs(want).max())


def test_char_poly_diag():
    assert np.allclose(ql.char_poly(ql.from_real(np.diag([1.0, 2.0]))), [1, -3, 2])


@given(seeds)
def test_charpoly_c1(seed):
    A = random_herm(np.random.default_rng(seed), 3)
    assert np.isclose(ql.charpoly_c1(A), ql.char_poly(A)[2], rtol=1e-9, atol=1e-9)


def test_rank():
    assert ql.rank(np.zeros((3, 2, 4))) == 0
    v = np.array([[1, 2, 0, 0], [0, 1, 1, 0]], float)
    assert ql.rank(amul(v[:, None], aconj(v)[None, :])) == 1


def test_rank_of_counterexample_factor():
    V = np.zeros((8, 5, 4))
    V[:4, :4, 0] = np.eye(4)
    W_re = [[-1, 0, 0, 0], [0, 1, -1, 0], [0, -1, 1, 0], [0, 0, 0, 2]]
    W_im = [[-1, 2, 1, 0], [2, 1, 2, -2], [1, 2, 1, 2], [0, -2, 2, -1]]
    V[4:, :4, 0], V[4:, :4, 1] = W_re, W_im
    V[4, 4, 0], V[5, 4, 1] = 1, 3
    assert ql.rank(V) == 5


def test_psd_examples():
    v = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]], float)
    A = amul(v[:, None], aconj(v)[None, :])
    assert ql.is_psd(A)
    res = ql.is_psd(ql.transpose(A))
    assert not res
    At = ql.transpose(A)
    val = sum(amul(amul(aconj(v[a]), At[a, b]), v[b]) for a in range(3) for b in range(3))
    assert np.allclose(val, [-3, 0, 0, 0])
    assert np.allclose(ql.sqrt_psd(ql.eye(3)), ql.eye(3))


def test_schur_examples():
    S = ql.schur_complement(ql.from_real(np.diag([1.0, 5.0])), 1)
    assert np.allclose(S[..., 0], [[5.0]])
    q = np.array([0.3, -1.0, 2.0, 0.5])
    A = np.zeros((2, 2, 4))
    A[0, 0, 0], A[1, 0], A[0, 1], A[1, 1, 0] = 1.0, q, aconj(q), q @ q
    assert np.allclose(ql.schur_complement(A, 1), 0, atol=1e-12)


@given(seeds, st.integers(1, 3), st.integers(1, 3), st.integers(1, 5))
def test_schur_rank_additivity(seed, n1, n2, r):
    rng = np.random.default_rng(seed)
    n = n1 + n2
    A = random_psd(rng, n, min(max(r, n1), n))
    S = ql.schur_complement(A, n1)
    cut = 1e-8 * ql.fro(A)

    def r(M):
        return int(np.sum(ql.singular_values(M) > cut))

    assert r(A) == r(A[:n1, :n1]) + r(S)


@given(seeds, st.integers(1, 4))
def test_trace_form_symmetric_and_self_dual(seed, n):
    rng = np.random.default_rng(seed)
    A, B = random_herm(rng, n), random_herm(rng, n)
    assert np.isclose(np.trace(ql.mm(A, B)[..., 0]), np.trace(ql.mm(B, A)[..., 0]), rtol=1e-10, atol=1e-10)
    P, Q = random_psd(rng, n), random_psd(rng, n)
    assert np.trace(ql.mm(P, Q)[..., 0]) >= -1e-10


@given(seeds, st.integers(2, 5), st.integers(1, 4))
def test_psd_kernel_facts(seed, n, r):
    rng = np.random.default_rng(seed)
    r = min(r, n - 1)
    A = random_psd(rng, n, r)
    U, d = ql.herm_eig(A)
    v = U[:, -1]
    assert np.linalg.norm(ql.matmul(A, v)) <= 1e-8 * ql.fro(A)
    # principal submatrices stay PSD
    idx = rng.choice(n, size=max(1, n - 1), replace=False)
    assert ql.is_psd(A[np.ix_(idx, idx)])


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_corner_kernel_propagates(seed, n1, n2):
    rng = np.random.default_rng(seed)
    G = random_qmat(rng, n1 + n2, n1 + n2)
    G[:n1, 0] = 0.0          # A11 gets the kernel direction e_0 of the column space
    G[:n1, :] = 0.0 if n1 == 1 else G[:n1, :]
    A = ql.herm(ql.mm(G, ql.ct(G)))
    U, d = ql.herm_eig(A[:n1, :n1])
    if d[-1] > 1e-10 * (1 + ql.fro(A)):
        return
    v = U[:, -1]
    assert np.linalg.norm(ql.matmul(A[n1:, :n1], v)) <= 1e-8 * (1 + ql.fro(A))


@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_face_rank_law(seed, n, extra):
    rng = np.random.default_rng(seed)
    l = n
    S = random_qmat(rng, n + extra, l)
    B = random_psd(rng, l, max(1, l - 1))
    assert ql.rank(ql.mm(S, B, ql.ct(S)), 1e-9) == ql.rank(B, 1e-9)


def _re_constraint(v, q, p):
    return amul(amul(v, q[None, :]), aconj(p)[None, :])[:, 0]


def test_right_normalize_examples():
    q = ql.right_normalize(np.array([[1, 0, 0, 0.0]]), np.array([1, 0, 0, 0.0])).to_array()
    assert abs(q[0]) < 1e-12 and np.isclose(np.linalg.norm(q), 1)
    v = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]], float)
    q = ql.right_normalize(v, np.array([1, 0, 0, 0.0])).to_array()
    assert np.allclose(np.abs(q), [0, 0, 0, 1])


@given(seeds)
def test_right_normalize_random(seed):
    rng = np.random.default_rng(seed)
    v, p = rng.normal(size=(3, 4)), rng.normal(size=4)
    q = ql.right_normalize(v, p).to_array()
    assert np.max(np.abs(_re_constraint(v, q, p))) <= 1e-10 * (1 + np.abs(v).max() * np.linalg.norm(p))
    q = ql.left_normalize(v, p).to_array()
    assert np.max(np.abs(amul(amul(q[None, :], v), aconj(p)[None, :])[:, 0])) <= 1e-10 * (1 + np.abs(v).max())


def test_su2so4_examples():
    v = np.array([[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]], float)
    h, h2 = ql.su2so4_align(v, v)
    assert np.allclose(amul(h2.to_array()[None], v), amul(v, h.to_array()[None]))
    w = np.array([[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]], float)
    h, h2 = ql.su2so4_align(v, w)
    assert np.allclose(amul(h2.to_array()[None], v), amul(w, h.to_array()[None]), atol=1e-10)


@given(seeds)
def test_su2so4_random(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(3, 4))
    a, b = rng.normal(size=4), rng.normal(size=4)
    a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
    w = amul(amul(a[None], v), b[None])
    h, h2 = ql.su2so4_align(v, w)
    assert np.allclose(amul(h2.to_array()[None], v), amul(w, h.to_array()[None]), atol=1e-8)


def test_su2so4_precondition():
    with pytest.raises(ql.PreconditionViolated):
        ql.su2so4_align(np.ones((3, 4)), 2 * np.ones((3, 4)))


def test_field_tags(rng):
    A = random_herm(rng, 3, 2)
    assert ql.field_of(A) == "C"
    assert ql.in_field(A, "Hk") and not ql.in_field(random_herm(rng, 3), "C")


def test_json_round_trip(rng):
    A = random_herm(rng, 3)
    B = ql.matrix_from_json(ql.matrix_to_json(A, True))
    assert np.array_equal(A, B)
    with pytest.raises(ValueError):
        ql.matrix_from_json({"rows": 1})
