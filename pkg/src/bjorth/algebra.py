"""Finite-dimensional C*-algebras as direct sums of full matrix blocks.

Every finite-dimensional C*-algebra is a direct sum of matrix algebras
``M_{n_1} + ... + M_{n_K}``; elements are stored as one square complex
matrix per block.  Pure states are vector states supported on a single
block, and general states are finite convex mixtures of those.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import AlgebraMismatch, NotSelfAdjoint, ShapeError
from .tolerances import DEFAULT, Tolerances


@dataclass(frozen=True)
class BlockAlgebra:
    """The algebra ``M_{n_1} + ... + M_{n_K}``."""

    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims:
            raise ShapeError("an algebra needs at least one block")
        if any(n < 1 for n in dims):
            raise ShapeError(f"block dimensions must be positive, got {dims}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def dimension(self) -> int:
        return sum(n * n for n in self.block_dims)

    def is_commutative(self) -> bool:
        return all(n == 1 for n in self.block_dims)

    def is_prime(self) -> bool:
        # Two blocks give disjoint nonzero ideals I, J with I ∩ J = 0.
        return self.num_blocks == 1

    def zeros(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.zeros((n, n), complex) for n in self.block_dims])

    def unit(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.eye(n, dtype=complex) for n in self.block_dims])

    def element(self, blocks: Sequence) -> "AlgebraElement":
        return AlgebraElement(self, blocks)

    def block_element(self, k: int, matrix) -> "AlgebraElement":
        """Element equal to ``matrix`` in block ``k`` and zero elsewhere."""
        blocks = [np.zeros((n, n), complex) for n in self.block_dims]
        blocks[k] = np.asarray(matrix, dtype=complex)
        return AlgebraElement(self, blocks)

    def matrix_unit(self, k: int, p: int, q: int) -> "AlgebraElement":
        n = self.block_dims[k]
        e = np.zeros((n, n), complex)
        e[p, q] = 1.0
        return self.block_element(k, e)

    def __str__(self):
        parts = ["C" if n == 1 else f"M{n}" for n in self.block_dims]
        return "+".join(parts)


def is_commutative(algebra: BlockAlgebra) -> bool:
    return algebra.is_commutative()


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    algebra: BlockAlgebra
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(np.array(b, dtype=complex) for b in self.blocks)
        if len(blocks) != self.algebra.num_blocks:
            raise ShapeError(
                f"expected {self.algebra.num_blocks} blocks, got {len(blocks)}"
            )
        for k, (b, n) in enumerate(zip(blocks, self.algebra.block_dims)):
            if b.shape != (n, n):
                raise ShapeError(f"block {k}: expected shape {(n, n)}, got {b.shape}")
            b.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)

    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"expected AlgebraElement, got {type(other).__name__}")
        if other.algebra != self.algebra:
            raise AlgebraMismatch(f"{self.algebra} vs {other.algebra}")

    def _new(self, blocks) -> "AlgebraElement":
        return AlgebraElement(self.algebra, blocks)

    def __add__(self, other):
        self._check(other)
        return self._new([a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return self._new([a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return self._new([-a for a in self.blocks])

    def __mul__(self, scalar):
        if isinstance(scalar, AlgebraElement):
            return self @ scalar
        return self._new([scalar * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._new([a / scalar for a in self.blocks])

    def __matmul__(self, other):
        self._check(other)
        return self._new([a @ b for a, b in zip(self.blocks, other.blocks)])

    def adjoint(self) -> "AlgebraElement":
        return self._new([a.conj().T for a in self.blocks])

    @property
    def H(self) -> "AlgebraElement":
        return self.adjoint()

    def norm(self) -> float:
        return operator_norm(self)

    def is_self_adjoint(self, tol: float = DEFAULT.tol_sa) -> bool:
        scale = max(self.norm(), 1.0)
        return max(np.abs(b - b.conj().T).max() for b in self.blocks) <= tol * scale

    def is_positive(self, eps_eig: float = DEFAULT.eps_eig) -> bool:
        """Hermitian with every eigenvalue >= -eps_eig * ||a||."""
        nrm = self.norm()
        if not self.is_self_adjoint():
            return False
        floor = -eps_eig * nrm
        return all(np.linalg.eigvalsh((b + b.conj().T) / 2)[0] >= floor for b in self.blocks)

    def allclose(self, other: "AlgebraElement", atol: float = 1e-9) -> bool:
        self._check(other)
        return all(np.allclose(a, b, atol=atol, rtol=0) for a, b in zip(self.blocks, other.blocks))

    def __repr__(self):
        return f"AlgebraElement({self.algebra}, blocks={[b.tolist() for b in self.blocks]})"


def spectral_norm(b: np.ndarray) -> float:
    """Largest singular value of one block."""
    if b.shape[0] == 1 or b.shape[1] == 1:
        return float(np.sqrt(np.vdot(b, b).real))
    return float(np.linalg.svd(b, compute_uv=False)[0])


def operator_norm(a: AlgebraElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    return max(spectral_norm(b) for b in a.blocks)


def spectral_decomposition(a: AlgebraElement, tol_sa: float = DEFAULT.tol_sa):
    """Per-block eigen-decomposition of a self-adjoint element.

    Returns a list of ``(eigenvalues, eigenvectors)`` with eigenvalues in
    descending order and eigenvectors as columns.  The element is
    symmetrized first so that roundoff cannot leak into the frames.

    Raises:
        NotSelfAdjoint: if ``||a - a*|| > tol_sa * ||a||``.
    """
    nrm = operator_norm(a)
    skew = operator_norm(a - a.adjoint())
    if skew > tol_sa * max(nrm, np.finfo(float).tiny):
        if not (nrm == 0.0 and skew == 0.0):
            raise NotSelfAdjoint(f"||a - a*|| = {skew:.3e} exceeds {tol_sa:g} * ||a||")
    out = []
    for b in a.blocks:
        w, v = np.linalg.eigh((b + b.conj().T) / 2)
        out.append((w[::-1].copy(), v[:, ::-1].copy()))
    return out


@dataclass(frozen=True, eq=False)
class PureState:
    """Vector state ``a -> <a_k xi, xi>`` on block ``k``."""

    algebra: BlockAlgebra
    block: int
    vector: np.ndarray

    def __post_init__(self):
        v = np.array(self.vector, dtype=complex).ravel()
        n = self.algebra.block_dims[self.block]
        if v.shape != (n,):
            raise ShapeError(f"state vector for block {self.block} must have length {n}")
        nv = np.linalg.norm(v)
        if abs(nv - 1.0) > DEFAULT.eps_zero:
            raise ValueError(f"state vector must be a unit vector (norm {nv!r})")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)

    def __call__(self, a: AlgebraElement) -> complex:
        return state_evaluate(self, a)

    def to_dict(self) -> dict:
        return {
            "type": "pure",
            "block": self.block,
            "vector": [[float(z.real), float(z.imag)] for z in self.vector],
        }


@dataclass(frozen=True, eq=False)
class StateMixture:
    """Convex combination ``sum_i w_i rho_i`` of pure states."""

    terms: tuple[tuple[float, PureState], ...] = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple((float(w), s) for w, s in self.terms)
        if not terms:
            raise ValueError("a mixture needs at least one term")
        if any(not (0.0 < w <= 1.0 + DEFAULT.eps_zero) for w, _ in terms):
            raise ValueError("mixture weights must lie in (0, 1]")
        total = sum(w for w, _ in terms)
        if abs(total - 1.0) > DEFAULT.eps_zero:
            raise ValueError(f"mixture weights sum to {total!r}, not 1")
        alg = terms[0][1].algebra
        if any(s.algebra != alg for _, s in terms):
            raise AlgebraMismatch("mixture terms over different algebras")
        object.__setattr__(self, "terms", terms)

    @property
    def algebra(self) -> BlockAlgebra:
        return self.terms[0][1].algebra

    @property
    def weights(self) -> list[float]:
        return [w for w, _ in self.terms]

    def __call__(self, a: AlgebraElement) -> complex:
        return state_evaluate(self, a)

    def to_dict(self) -> dict:
        return {
            "type": "mixture",
            "terms": [{"weight": w, "state": s.to_dict()} for w, s in self.terms],
        }


def state_evaluate(rho: PureState | StateMixture, a: AlgebraElement) -> complex:
    if rho.algebra != a.algebra:
        raise AlgebraMismatch(f"state over {rho.algebra}, element over {a.algebra}")
    if isinstance(rho, StateMixture):
        return complex(sum(w * state_evaluate(s, a) for w, s in rho.terms))
    xi = rho.vector
    return complex(np.vdot(xi, a.blocks[rho.block] @ xi))


def pure_states_of(algebra: BlockAlgebra) -> Iterable[PureState]:
    """Coordinate vector states; a spanning family, not all pure states."""
    for k, n in enumerate(algebra.block_dims):
        for i in range(n):
            e = np.zeros(n, complex)
            e[i] = 1.0
            yield PureState(algebra, k, e)


def check_tolerances(tol: Tolerances | None) -> Tolerances:
    return DEFAULT if tol is None else tol
