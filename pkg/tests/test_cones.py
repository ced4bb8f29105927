import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sepcones import qlinalg as ql
from sepcones.certificates.claims import Q2S3
from sepcones.cones import (GroupElement, NotPPT, TensorElement, apply, detect_and_reduce, face_dim_bound, in_lorentz,
                            is_ppt, iso, iso_inv, lorentz_apply, normalize_corner, partial_transpose, reduce_by, reduction_map)
from sepcones.generate import sample

from conftest import separable

seeds = st.integers(0, 2 ** 32 - 1)
ms = st.sampled_from([3, 4, 5, 6])


def test_iso_examples():
    assert np.array_equal(iso([1.0, 1.0, 0.0])[..., 0], [[2, 0], [0, 0]])
    assert np.array_equal(iso(np.eye(6)[0]), ql.eye(2))
    a = iso([1.0, 0, 0, 0, 0, 1.0])
    assert np.array_equal(a[0, 1], [0, 0, 0, 1]) and np.array_equal(a[1, 0], [0, 0, 0, -1])
    assert ql.is_psd(a)


@given(seeds, ms)
def test_iso_round_trip_and_cone(seed, m):
    x = np.random.default_rng(seed).normal(size=m)
    assert np.allclose(iso_inv(iso(x), m), x, atol=1e-14)
    gap = x[0] - np.linalg.norm(x[1:])
    if abs(gap) > 1e-9:
        assert bool(ql.is_psd(iso(x), 0.0)) == in_lorentz(x)


def test_tensor_element_round_trip(rng):
    for m in (3, 4, 5, 6):
        B = separable(m, 3, m)
        # B11 = B0 + B1 and B22 = B0 - B1 round to the nearest float, so the round trip is exact up to ulps
        back = TensorElement.from_assembled(B.assemble(), m).components
        assert np.max(np.abs(back - B.components)) <= 4 * np.finfo(float).eps * np.max(np.abs(B.components))
        assert ql.in_field(B.assemble(), {3: "R", 4: "C", 5: "Hk", 6: "H"}[m])
        assert np.allclose(TensorElement.from_json(B.to_json()).components, B.components)
    with pytest.raises(ValueError):
        TensorElement(7, 2, np.zeros((7, 2, 2)))
    with pytest.raises(ValueError):
        TensorElement.from_json({"m": 3, "n": 1, "components": [[[1.0, 2.0]], [[0.0]], [[0.0]]]})


def test_partial_transpose_examples(rng):
    c = rng.normal(size=(4, 3, 3))
    B = TensorElement(4, 3, c)
    P = partial_transpose(B)
    assert np.allclose(P.components[:3], B.components[:3]) and np.allclose(P.components[3], -B.components[3])
    X = B.assemble()
    assert np.allclose(P.assemble(), np.concatenate([X[..., :1], -X[..., 1:]], -1))
    real = TensorElement(6, 2, np.concatenate([rng.normal(size=(3, 2, 2)), np.zeros((3, 2, 2))]))
    assert np.array_equal(partial_transpose(real).components, real.components)


def test_q2s3_example_not_ppt():
    B = TensorElement.from_assembled(np.array(Q2S3, float), 6)
    assert ql.is_psd(B.assemble())
    assert not ql.is_psd(partial_transpose(B).assemble())
    res = is_ppt(B)
    assert not res and res.witness["side"] == "pt"


@given(seeds, ms, st.integers(1, 4))
def test_partial_transpose_involution_and_congruence(seed, m, n):
    rng = np.random.default_rng(seed)
    B = TensorElement(m, n, rng.normal(size=(m, n, n)))
    assert np.array_equal(partial_transpose(partial_transpose(B)).components, B.components)
    R = rng.normal(size=(n, n))
    g = GroupElement(ql.eye(2), R)
    assert np.allclose(apply(g, partial_transpose(B)).components, partial_transpose(apply(g, B)).components)


def test_is_ppt_examples(rng):
    v = rng.normal(size=3)
    a = iso([1.0, 0.3, 0.2, -0.1, 0.4, 0.5])
    X = np.zeros((6, 6, 4))
    for s in range(2):
        for t in range(2):
            X[3 * s:3 * s + 3, 3 * t:3 * t + 3] = a[s, t] * np.outer(v, v)[..., None]
    assert is_ppt(TensorElement.from_assembled(X, 6))
    assert is_ppt(TensorElement.zeros(6, 3))


@given(seeds, st.sampled_from([3, 4]), st.integers(1, 4))
def test_psd_is_ppt_for_small_m(seed, m, n):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(m, n, n))
    B = TensorElement(m, n, c)
    lo = np.linalg.eigvalsh(ql.embed_real(B.assemble()))[0]
    B = B + TensorElement(m, n, np.array([(abs(lo) + 0.1) * np.eye(n)] + [np.zeros((n, n))] * (m - 1)))
    assert ql.is_psd(B.assemble())
    assert is_ppt(B)


@given(seeds, ms, st.integers(1, 4))
def test_separable_is_ppt(seed, m, n):
    assert is_ppt(separable(m, n, seed))


def _random_left(rng, m):
    L = np.zeros((2, 2, 4))
    L[..., :{3: 1, 4: 2, 5: 1, 6: 4}[m]] = rng.normal(size=(2, 2, {3: 1, 4: 2, 5: 1, 6: 4}[m]))
    return L


@given(seeds, ms, st.integers(1, 3), st.booleans())
def test_group_action_preserves_ppt(seed, m, n, conj):
    rng = np.random.default_rng(seed)
    B = sample(("tensor", m, n), "ppt", seed)
    g = GroupElement(_random_left(rng, m), rng.normal(size=(n, n)), conj)
    assert is_ppt(apply(g, B), 1e-8)
    assert np.allclose(apply(GroupElement.identity(n), B).components, B.components)


def test_group_inverse(rng):
    B = separable(6, 3, 1)
    g = GroupElement(_random_left(rng, 6), rng.normal(size=(3, 3)))
    assert np.allclose(apply(g.inverse(), apply(g, B)).components, B.components, atol=1e-9)


def test_face_dim_bound():
    assert face_dim_bound(36, 24) == 13
    assert face_dim_bound(66, 30) == 37
    assert face_dim_bound(10, 10) == 1
    with pytest.raises(ValueError):
        face_dim_bound(3, 4)


# ---------------------------------------------------------------- normalisation

def _from_blocks(B11, B22, offs=()):
    n = B11.shape[0]
    comps = [0.5 * (B11 + B22), 0.5 * (B11 - B22)] + list(offs)
    return TensorElement(len(comps), n, np.array(comps))


def _check_normalized(out, B):
    assert out.kind == "Normalized"
    B11, _, _ = out.element.blocks()
    assert np.allclose(B11[..., 0], np.eye(B.n), atol=1e-9)
    assert np.allclose(apply(out.group, B).assemble(), out.element.assemble(), atol=1e-9)


def test_normalize_scaling():
    n = 3
    B = _from_blocks(2 * np.eye(n), np.zeros((n, n)), [np.zeros((n, n))])
    _check_normalized(normalize_corner(B), B)


def test_normalize_swap_branch():
    B = _from_blocks(np.diag([1.0, 0.0]), np.eye(2), [np.zeros((2, 2))])
    out = normalize_corner(B)
    _check_normalized(out, B)
    assert out.group.left[0, 0, 0] != 1.0


@given(seeds, ms)
def test_normalize_random(seed, m):
    B = sample(("tensor", m, 3), "ppt", seed)
    _check_normalized(normalize_corner(B), B)


def test_normalize_intersecting_kernels(rng):
    small = separable(4, 2, 3)
    c = np.zeros((4, 3, 3))
    c[:, :2, :2] = small.components
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    B = TensorElement(4, 3, Q @ c @ Q.T)
    out = normalize_corner(B)
    assert out.kind == "NeedsReductionFirst" and out.outcome.kind == "Decomposed"
    assert np.allclose(out.outcome.reconstruct().components, B.components, atol=1e-9)


def test_normalize_rejects_non_ppt():
    B = TensorElement.from_assembled(np.array(Q2S3, float), 6)
    with pytest.raises(NotPPT):
        normalize_corner(B)


# ---------------------------------------------------------------- reductions

def test_reduce_last_component_zero():
    B = separable(5, 3, 7)
    c = np.array(B.components)
    c[-1] = 0.0
    B = TensorElement(5, 3, c)
    assert is_ppt(B)
    out = detect_and_reduce(B)
    assert out.kind == "Reduced" and out.element.m == 4
    assert np.allclose(out.reconstruct().components, B.components, atol=1e-8)


def test_reduce_case_i(rng):
    # all mass on one light ray: lam = (1, -u) annihilates every component
    u = rng.normal(size=4)
    u /= np.linalg.norm(u)
    a = np.concatenate([[1.0], u])
    G = rng.normal(size=(3, 3))
    B = TensorElement(5, 3, a[:, None, None] * (G @ G.T)[None])
    # the lightlike lam is one of several dependencies here, so reduce along it explicitly
    out = reduce_by(B, np.concatenate([[1.0], -u]))
    assert out.kind == "Reduced" and out.case == "i"
    assert detect_and_reduce(B).kind == "Reduced"
    Bp = lorentz_apply(out.lorentz, B)
    assert ql.fro(Bp.assemble()[:3]) <= 1e-8 * B.norm()
    assert np.allclose(out.reconstruct().components, B.components, atol=1e-8)


def _random_lorentz(rng, m):
    Q, _ = np.linalg.qr(rng.normal(size=(m - 1, m - 1)))
    R = np.eye(m)
    R[1:, 1:] = Q
    t = rng.normal()
    H = np.eye(m)
    H[0, 0] = H[1, 1] = math.cosh(t)
    H[0, 1] = H[1, 0] = math.sinh(t)
    return H @ R


@given(seeds, st.sampled_from([4, 5, 6]))
def test_reduce_case_ii(seed, m):
    rng = np.random.default_rng(seed)
    small = separable(m - 1, 3, seed)
    pad = TensorElement(m, 3, np.concatenate([small.components, np.zeros((1, 3, 3))]))
    B = lorentz_apply(_random_lorentz(rng, m), pad)
    out = detect_and_reduce(B)
    assert out.kind == "Reduced"
    Bp = lorentz_apply(out.lorentz, B)
    assert ql.fro(ql.from_real(Bp.components[-1])) <= 1e-8 * (1 + B.norm())
    assert np.allclose(out.reconstruct().components, B.components, atol=1e-8 * (1 + B.norm()))


def test_reduction_map_rejects_timelike():
    with pytest.raises(NotPPT):
        reduction_map(np.array([2.0, 1.0, 0.0, 0.0]))


def test_decomposed_block_element(rng):
    first, second = sample(("tensor", 6, 2), "ppt", 1), sample(("tensor", 6, 2), "ppt", 2)
    c = np.zeros((6, 4, 4))
    c[:, :2, :2], c[:, 2:, 2:] = first.components, second.components
    Q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    B = TensorElement(6, 4, Q @ c @ Q.T)
    out = detect_and_reduce(B)
    assert out.kind == "Decomposed"
    assert (out.first.n, out.second.n) == (2, 2)
    assert np.allclose(out.reconstruct().components, B.components, atol=1e-8)


def test_generic_ppt_is_irreducible():
    B = sample(("tensor", 6, 3), "boundary", 5)
    assert detect_and_reduce(B).kind in ("Irreducible", "Reduced", "Decomposed")
    B = separable(3, 3, 0) + separable(3, 3, 1)
    assert detect_and_reduce(B).kind == "Irreducible"
