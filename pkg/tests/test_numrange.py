import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from bjorth import Answer, BlockAlgebra, EigenFrame, Tolerances, compress, contains_zero, top_eigenframe
from bjorth.errors import EmptyInput, NotPositive
from bjorth.numrange import (
    certify_min,
    kernel_vector_in_frame,
    numerical_range_witness,
    segment_reach,
    support_function,
)
from strategies import seeds

M2 = BlockAlgebra((2,))
NILPOTENT = np.array([[0, 1], [0, 0]], complex)


def _random_matrix(seed, n, shift=0.0):
    r = np.random.default_rng(seed)
    return (r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))) / math.sqrt(2 * n) + shift


def _brute_values(C, count, seed):
    r = np.random.default_rng(seed)
    X = r.standard_normal((count, C.shape[0])) + 1j * r.standard_normal((count, C.shape[0]))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    return np.einsum("ij,jk,ik->i", X.conj(), C, X)


def _zero_in_hull(points):
    # feasibility of sum w z = 0, sum w = 1, w >= 0
    A = np.vstack([points.real, points.imag, np.ones(len(points))])
    res = linprog(np.zeros(len(points)), A_eq=A, b_eq=[0, 0, 1], bounds=(0, None), method="highs")
    return res.status == 0


# -- eigenframes -------------------------------------------------------------

def test_frame_clusters_top_eigenspace():
    f = top_eigenframe(BlockAlgebra((3,)).element([np.diag([1, 1, 0.25])]))
    assert f.attained == (True,)
    B = f.bases[0]
    assert B.shape == (3, 2)
    np.testing.assert_allclose(np.abs(B.conj().T @ np.eye(3)[:, :2]) ** 2 @ np.ones(2), [1, 1], atol=1e-12)


def test_frame_attainment_across_blocks():
    f = top_eigenframe(BlockAlgebra((1, 1)).element([[[1]], [[0.5]]]))
    assert f.attained == (True, False)
    assert f.attained_blocks == [0]
    np.testing.assert_allclose(np.abs(f.bases[0]), [[1]])


def test_frame_tolerance_clusters_near_ties():
    f = top_eigenframe(M2.element([np.diag([1, 1 - 1e-12])]), eps_eig=1e-9)
    assert f.dims == (2,)


def test_frame_rejects_non_positive():
    with pytest.raises(NotPositive):
        top_eigenframe(M2.element([np.diag([1, -1])]))


@given(seeds, st.integers(1, 4))
def test_frame_invariants(seed, n):
    r = np.random.default_rng(seed)
    g = r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))
    alg = BlockAlgebra((n, 1))
    p = alg.element([g.conj().T @ g, [[r.uniform(0, 1)]]])
    f = top_eigenframe(p)
    assert f.attained_blocks
    for k in f.attained_blocks:
        B = f.bases[k]
        np.testing.assert_allclose(B.conj().T @ B, np.eye(B.shape[1]), atol=1e-12)
        np.testing.assert_allclose(p.blocks[k] @ B, f.top_values[k] * B, atol=1e-9 * f.norm)


# -- compressions ------------------------------------------------------------

def test_full_frame_compression_is_unitarily_equivalent(rng):
    c = M2.element([rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))])
    f = top_eigenframe(M2.unit())
    (k, C), = compress(c, f)
    np.testing.assert_allclose(np.sort_complex(np.linalg.eigvals(C)), np.sort_complex(np.linalg.eigvals(c.blocks[0])))


def test_compression_of_matrix_units():
    f = top_eigenframe(M2.element([np.diag([1, 0])]))
    (_, C12), = compress(M2.element([NILPOTENT]), f)
    assert C12.shape == (1, 1) and abs(C12[0, 0]) == 0
    # e21 moves e1 off the frame: compression is 0 although c e1 = e2
    e21 = NILPOTENT.T
    (_, C21), = compress(M2.element([e21]), f)
    assert abs(C21[0, 0]) == 0
    np.testing.assert_allclose(e21 @ [1, 0], [0, 1])


# -- support function ----------------------------------------------------------

def test_support_of_identity():
    th = np.linspace(0, 2 * np.pi, 13)
    np.testing.assert_allclose(support_function(np.eye(2), th), np.cos(th), atol=1e-14)


def test_support_of_nilpotent_is_constant(rng):
    th = np.linspace(0, 2 * np.pi, 17)
    np.testing.assert_allclose(support_function(NILPOTENT, th), 0.5, atol=1e-14)
    # oracle: sampled values stay inside the closed disk of radius 1/2 and touch its rim
    z = _brute_values(NILPOTENT, 20000, 1)
    assert np.abs(z).max() <= 0.5 + 1e-12
    assert np.abs(z).max() > 0.49


def test_support_of_zero_scalar():
    assert support_function(np.zeros((1, 1)), 1.3) == 0.0


@given(seeds, st.integers(2, 5), st.floats(0, 2 * np.pi))
def test_support_dominates_sampled_values(seed, n, theta):
    C = _random_matrix(seed, n)
    z = _brute_values(C, 2000, seed)
    h = support_function(C, theta)
    assert np.max(np.real(np.exp(-1j * theta) * z)) <= h + 1e-12


# -- membership ----------------------------------------------------------------

def test_nilpotent_contains_zero_with_witness():
    res = contains_zero([NILPOTENT])
    assert res.answer is Answer.HOLDS
    (w, idx, xi), = res.witness
    assert abs(np.vdot(xi, NILPOTENT @ xi)) <= 1e-9


def test_identity_excludes_zero_with_margin_one():
    res = contains_zero([np.eye(2)], tol=0.0)
    assert res.answer is Answer.FAILS
    assert res.margin == pytest.approx(1.0, abs=1e-12)


def test_hull_of_opposite_scalars():
    res = contains_zero([np.array([[1.0]]), np.array([[-1.0]])], mode="hull")
    assert res.answer is Answer.HOLDS
    weights = sorted(w for w, _, _ in res.witness)
    np.testing.assert_allclose(weights, [0.5, 0.5], atol=1e-12)
    assert contains_zero([np.array([[1.0]]), np.array([[-1.0]])], mode="single").answer is Answer.FAILS


def test_membership_input_validation():
    with pytest.raises(EmptyInput):
        contains_zero([])
    with pytest.raises(ValueError):
        contains_zero([np.zeros((2, 3))])
    with pytest.raises(ValueError):
        contains_zero([np.eye(2)], mode="diagonal")


@given(seeds, st.integers(2, 6), st.floats(-0.6, 0.6), st.floats(-0.6, 0.6))
def test_membership_against_brute_force(seed, n, sr, si):
    C = _random_matrix(seed, n, complex(sr, si))
    res = contains_zero([C])
    z = _brute_values(C, 20000, seed + 1)
    if res.answer is Answer.FAILS:
        assert np.abs(z).min() > res.margin * 0.999
        # a separating direction exists
        assert res.detail["per_matrix"][0]["upper_bound"] < 0
    if res.answer is Answer.HOLDS:
        (_, _, xi), = res.witness
        assert abs(np.vdot(xi, C @ xi)) <= 1e-8


@given(seeds, st.integers(2, 6))
def test_normal_matrices_follow_spectral_hull(seed, n):
    r = np.random.default_rng(seed)
    q, _ = np.linalg.qr(r.standard_normal((n, n)) + 1j * r.standard_normal((n, n)))
    lam = r.standard_normal(n) + 1j * r.standard_normal(n) + complex(*r.uniform(-1, 1, 2))
    C = q @ np.diag(lam) @ q.conj().T
    res = contains_zero([C])
    if res.answer is not Answer.BORDERLINE:
        assert (res.answer is Answer.HOLDS) == _zero_in_hull(lam)


@given(seeds, st.integers(1, 5))
def test_hull_of_one_matrix_is_single(seed, n):
    C = _random_matrix(seed, n, 0.3)
    assert contains_zero([C], mode="hull").answer is contains_zero([C], mode="single").answer


@given(seeds, st.integers(2, 5), st.floats(-0.5, 0.5))
def test_finer_grid_never_flips_certified_answer(seed, n, shift):
    C = _random_matrix(seed, n, shift)
    coarse = contains_zero([C], tolerances=Tolerances(grid_points=72))
    fine = contains_zero([C], tolerances=Tolerances(grid_points=720))
    if coarse.answer is not Answer.BORDERLINE and fine.answer is not Answer.BORDERLINE:
        assert coarse.answer is fine.answer


@given(seeds, st.integers(2, 4))
def test_hull_witness_mixture_replays(seed, n):
    r = np.random.default_rng(seed)
    Cs = [_random_matrix(seed, n, 0.8), _random_matrix(seed + 1, 1, -0.8)]
    res = contains_zero(Cs, mode="hull")
    if res.answer is Answer.HOLDS:
        total = sum(w * np.vdot(xi, Cs[i] @ xi) for w, i, xi in res.witness)
        assert abs(total) <= 1e-8
        assert sum(w for w, _, _ in res.witness) == pytest.approx(1.0)


def test_certify_min_on_known_function():
    ans, margin, detail = certify_min(lambda t: np.cos(t) + 2.0, 1.0, 1e-9)
    # the margin is a certified lower bound: at most one Lipschitz half-cell below the truth
    half_cell = np.pi / 720
    assert ans is Answer.HOLDS and 1.0 - half_cell <= margin <= 1.0
    ans, margin, _ = certify_min(lambda t: np.cos(t) + 0.5, 1.0, 1e-9)
    # grid point t = pi is exact; the margin is measured from the -tol threshold
    assert ans is Answer.FAILS and margin == pytest.approx(0.5 - 1e-9, abs=1e-15)
    # tangency at exactly -tol cannot be decided
    ans, _, detail = certify_min(lambda t: np.cos(t) + 1.0 - 1e-9, 1.0, 1e-9)
    assert ans is Answer.BORDERLINE
    assert detail["residual_interval"][0] <= detail["residual_interval"][1]


def test_numerical_range_witness_for_disk():
    xi, val = numerical_range_witness(NILPOTENT)
    assert abs(val) <= 1e-10 and np.linalg.norm(xi) == pytest.approx(1.0)


@given(seeds, st.integers(2, 5), st.floats(0, 1))
def test_segment_reach_hits_target(seed, n, t):
    C = _random_matrix(seed, n)
    r = np.random.default_rng(seed)
    u = r.standard_normal(n) + 1j * r.standard_normal(n)
    v = r.standard_normal(n) + 1j * r.standard_normal(n)
    u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
    z1, z2 = np.vdot(u, C @ u), np.vdot(v, C @ v)
    target = (1 - t) * z1 + t * z2
    w = segment_reach(C, u, v, target)
    assert np.linalg.norm(w) == pytest.approx(1.0)
    assert abs(np.vdot(w, C @ w) - target) <= 1e-9


# -- kernel search -------------------------------------------------------------

def test_kernel_of_zero_is_any_frame_vector():
    f = top_eigenframe(M2.element([np.diag([1, 0])]))
    ks = kernel_vector_in_frame(M2.zeros(), f)
    assert ks.found and ks.block == 0
    np.testing.assert_allclose(np.abs(ks.vector), [1, 0])


def test_kernel_search_matrix_units():
    f = top_eigenframe(M2.element([np.diag([1, 0])]))
    ks = kernel_vector_in_frame(M2.element([NILPOTENT]), f)
    assert not ks.found and ks.sigma == pytest.approx(1.0)
    ks = kernel_vector_in_frame(M2.element([NILPOTENT.T]), f)
    assert ks.found
    np.testing.assert_allclose(np.abs(ks.vector), [1, 0])


def test_eigenframe_type_exported():
    assert isinstance(top_eigenframe(M2.unit()), EigenFrame)
