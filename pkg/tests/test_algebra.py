import math

import numpy as np
import pytest
from hypothesis import given

from bjorth import (
    AlgebraMismatch,
    BlockAlgebra,
    NotSelfAdjoint,
    PureState,
    ShapeError,
    StateMixture,
    is_commutative,
    operator_norm,
    pure_states_of,
    spectral_decomposition,
    state_evaluate,
)
from strategies import algebra_element, seeds, spaces

M2 = BlockAlgebra((2,))


def test_norm_of_zero():
    assert operator_norm(BlockAlgebra((1, 2)).zeros()) == 0.0


def test_norm_takes_block_maximum():
    a = BlockAlgebra((1, 2)).element([[[2]], [[1, 1], [0, 1]]])
    # a2* a2 = [[1,1],[1,2]] has characteristic polynomial t^2 - 3t + 1
    top_2x2 = math.sqrt((3 + math.sqrt(5)) / 2)
    assert top_2x2 == pytest.approx((1 + math.sqrt(5)) / 2)
    assert top_2x2 < 2
    assert operator_norm(a) == pytest.approx(2.0, abs=1e-14)


def test_norm_of_diagonal():
    assert operator_norm(M2.element([np.diag([1, 0.5])])) == pytest.approx(1.0)


def test_spectral_decomposition_diagonal():
    (w, v), = spectral_decomposition(M2.element([np.diag([1, 0.25])]))
    np.testing.assert_allclose(w, [1, 0.25])
    np.testing.assert_allclose(np.abs(v), np.eye(2), atol=1e-14)


def test_spectral_decomposition_flip():
    (w, v), = spectral_decomposition(M2.element([[[0, 1], [1, 0]]]))
    np.testing.assert_allclose(w, [1, -1], atol=1e-14)
    s = 1 / math.sqrt(2)
    assert abs(abs(np.vdot(v[:, 0], [s, s])) - 1) < 1e-12
    assert abs(abs(np.vdot(v[:, 1], [s, -s])) - 1) < 1e-12


def test_spectral_decomposition_rank_one():
    (w, _), = spectral_decomposition(M2.element([np.ones((2, 2))]))
    # direct 2x2 eigenproblem: trace 2, determinant 0
    np.testing.assert_allclose(w, [2, 0], atol=1e-14)


def test_spectral_decomposition_rejects_non_hermitian():
    with pytest.raises(NotSelfAdjoint):
        spectral_decomposition(M2.element([[[0, 1], [0, 0]]]))


def test_spectral_decomposition_symmetrizes_drift():
    b = np.array([[1, 1e-12j], [0, 0.5]])
    (w, v), = spectral_decomposition(M2.element([b]))
    np.testing.assert_allclose(v.conj().T @ v, np.eye(2), atol=1e-14)
    assert w[0] == pytest.approx(1.0)


def test_state_on_diagonal():
    rho = PureState(M2, 0, [1, 0])
    assert state_evaluate(rho, M2.element([np.diag([3 - 1j, 7])])) == pytest.approx(3 - 1j)


def test_even_mixture_on_symmetry():
    rho = StateMixture(((0.5, PureState(M2, 0, [1, 0])), (0.5, PureState(M2, 0, [0, 1]))))
    assert state_evaluate(rho, M2.element([np.diag([1, -1])])) == pytest.approx(0, abs=1e-15)


def test_state_on_nilpotent():
    s = 1 / math.sqrt(2)
    rho = PureState(M2, 0, [s, s])
    # <e12 xi, xi> = xi_2 * conj(xi_1)
    assert state_evaluate(rho, M2.element([[[0, 1], [0, 0]]])) == pytest.approx(0.5)


@pytest.mark.parametrize("dims, expected", [((1, 1, 1), True), ((2,), False), ((1, 2), False)])
def test_is_commutative(dims, expected):
    assert is_commutative(BlockAlgebra(dims)) is expected


def test_state_vector_validation():
    with pytest.raises(ShapeError):
        PureState(M2, 0, [1, 0, 0])
    with pytest.raises(ValueError):
        PureState(M2, 0, [1, 1])


def test_mixture_validation():
    s = PureState(M2, 0, [1, 0])
    with pytest.raises(ValueError):
        StateMixture(((0.3, s), (0.3, s)))
    with pytest.raises(AlgebraMismatch):
        StateMixture(((0.5, s), (0.5, PureState(BlockAlgebra((1,)), 0, [1]))))


def test_mismatched_algebras():
    with pytest.raises(AlgebraMismatch):
        M2.unit() + BlockAlgebra((1, 1)).unit()


def test_bad_algebra_shapes():
    with pytest.raises(ShapeError):
        BlockAlgebra(())
    with pytest.raises(ShapeError):
        BlockAlgebra((0,))
    with pytest.raises(ShapeError):
        M2.element([np.eye(3)])


@given(spaces, seeds, seeds)
def test_norm_submultiplicative_and_cstar(space, s1, s2):
    a = algebra_element(space.algebra, s1)
    b = algebra_element(space.algebra, s2)
    na, nb = operator_norm(a), operator_norm(b)
    assert operator_norm(a @ b) <= na * nb * (1 + 1e-9)
    assert operator_norm(a.adjoint() @ a) == pytest.approx(na * na, rel=1e-9)


@given(spaces, seeds)
def test_pure_states_on_positive_elements(space, seed):
    g = algebra_element(space.algebra, seed)
    p = g.adjoint() @ g
    npn = operator_norm(p)
    rng = np.random.default_rng(seed)
    for k, n in enumerate(space.algebra.block_dims):
        xi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        val = state_evaluate(PureState(space.algebra, k, xi / np.linalg.norm(xi)), p)
        assert abs(val.imag) <= 1e-12 * npn
        assert -1e-12 * npn <= val.real <= npn * (1 + 1e-12)
    # a state attaining ||p|| sits on a top eigenvector
    (k, (w, v)), = [max(enumerate(spectral_decomposition(p)), key=lambda t: t[1][0][0])]
    rho = PureState(space.algebra, k, v[:, 0])
    assert state_evaluate(rho, p).real == pytest.approx(npn, rel=1e-12)
    xi = v[:, 0]
    np.testing.assert_allclose(p.blocks[k] @ xi, npn * xi, atol=1e-9 * npn)


@given(spaces, seeds)
def test_mixture_is_affine_in_weights(space, seed):
    rng = np.random.default_rng(seed)
    a = algebra_element(space.algebra, seed)
    states = list(pure_states_of(space.algebra))[:3]
    w = rng.dirichlet(np.ones(len(states)))
    w = w / w.sum()
    terms = tuple((float(wi), s) for wi, s in zip(w, states) if wi > 0)
    mix = StateMixture(terms)
    expected = sum(wi * state_evaluate(s, a) for wi, s in terms)
    assert state_evaluate(mix, a) == pytest.approx(expected, abs=1e-12)
