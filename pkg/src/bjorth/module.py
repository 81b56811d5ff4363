"""Canonical full Hilbert modules ``M_{m_1 x n_1} + ... + M_{m_K x n_K}``.

The inner product is ``<x, y> = x* y`` blockwise, so it is conjugate-linear
in ``x`` and linear in ``y``; the right action is blockwise matrix
multiplication.  With ``m_k = n_k`` the module is the algebra over itself.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import AlgebraElement, BlockAlgebra, operator_norm, spectral_norm
from .errors import AlgebraMismatch, ShapeError, SpaceMismatch


@dataclass(frozen=True)
class ModuleSpace:
    algebra: BlockAlgebra
    row_dims: tuple[int, ...]

    def __post_init__(self):
        rows = tuple(int(m) for m in self.row_dims)
        if len(rows) != self.algebra.num_blocks:
            raise ShapeError(
                f"{len(rows)} row dimensions for {self.algebra.num_blocks} blocks"
            )
        if any(m < 1 for m in rows):
            raise ShapeError(f"row dimensions must be positive, got {rows}")
        object.__setattr__(self, "row_dims", rows)

    @classmethod
    def of(cls, blocks: Sequence[int], rows: Sequence[int] | None = None) -> "ModuleSpace":
        algebra = BlockAlgebra(tuple(blocks))
        return cls(algebra, tuple(blocks) if rows is None else tuple(rows))

    @classmethod
    def over_itself(cls, algebra: BlockAlgebra) -> "ModuleSpace":
        return cls(algebra, algebra.block_dims)

    @property
    def shapes(self) -> list[tuple[int, int]]:
        return list(zip(self.row_dims, self.algebra.block_dims))

    @property
    def is_algebra(self) -> bool:
        return self.row_dims == self.algebra.block_dims

    def zeros(self) -> "ModuleElement":
        return ModuleElement(self, [np.zeros(s, complex) for s in self.shapes])

    def element(self, blocks: Sequence) -> "ModuleElement":
        return ModuleElement(self, blocks)

    def block_element(self, k: int, matrix) -> "ModuleElement":
        blocks = [np.zeros(s, complex) for s in self.shapes]
        blocks[k] = np.asarray(matrix, dtype=complex)
        return ModuleElement(self, blocks)

    def basis(self, k: int, i: int, j: int) -> "ModuleElement":
        """Rank-one matrix unit at row ``i``, column ``j`` of block ``k``."""
        e = np.zeros(self.shapes[k], complex)
        e[i, j] = 1.0
        return self.block_element(k, e)

    def from_algebra(self, a: AlgebraElement) -> "ModuleElement":
        if not self.is_algebra or a.algebra != self.algebra:
            raise SpaceMismatch("element does not belong to this module")
        return ModuleElement(self, a.blocks)

    def __str__(self):
        if self.is_algebra:
            return str(self.algebra)
        parts = [f"M{m}x{n}" for m, n in self.shapes]
        return "+".join(parts) + f" over {self.algebra}"


@dataclass(frozen=True, eq=False)
class ModuleElement:
    space: ModuleSpace
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(np.array(b, dtype=complex) for b in self.blocks)
        shapes = self.space.shapes
        if len(blocks) != len(shapes):
            raise ShapeError(f"expected {len(shapes)} blocks, got {len(blocks)}")
        for k, (b, s) in enumerate(zip(blocks, shapes)):
            if b.shape != s:
                raise ShapeError(f"block {k}: expected shape {s}, got {b.shape}")
            b.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)

    @property
    def algebra(self) -> BlockAlgebra:
        return self.space.algebra

    def _check(self, other: "ModuleElement"):
        if not isinstance(other, ModuleElement):
            raise TypeError(f"expected ModuleElement, got {type(other).__name__}")
        if other.space != self.space:
            raise SpaceMismatch(f"{self.space} vs {other.space}")

    def _new(self, blocks) -> "ModuleElement":
        return ModuleElement(self.space, blocks)

    def __add__(self, other):
        self._check(other)
        return self._new([a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return self._new([a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return self._new([-a for a in self.blocks])

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return right_action(self, other)
        return self._new([other * a for a in self.blocks])

    def __rmul__(self, scalar):
        return self._new([scalar * a for a in self.blocks])

    def __truediv__(self, scalar):
        return self._new([a / scalar for a in self.blocks])

    def norm(self) -> float:
        return module_norm(self)

    def is_zero(self, atol: float = 0.0) -> bool:
        return all(np.abs(b).max(initial=0.0) <= atol for b in self.blocks)

    def allclose(self, other: "ModuleElement", atol: float = 1e-9) -> bool:
        self._check(other)
        return all(np.allclose(a, b, atol=atol, rtol=0) for a, b in zip(self.blocks, other.blocks))

    def __repr__(self):
        return f"ModuleElement({self.space}, blocks={[b.tolist() for b in self.blocks]})"


def inner_product(x: ModuleElement, y: ModuleElement) -> AlgebraElement:
    x._check(y)
    return AlgebraElement(x.algebra, [a.conj().T @ b for a, b in zip(x.blocks, y.blocks)])


def right_action(x: ModuleElement, a: AlgebraElement) -> ModuleElement:
    if a.algebra != x.algebra:
        raise AlgebraMismatch(f"module over {x.algebra}, element of {a.algebra}")
    return ModuleElement(x.space, [b @ c for b, c in zip(x.blocks, a.blocks)])


def module_norm(x: ModuleElement) -> float:
    """``||<x, x>||^{1/2}``, i.e. the largest singular value over blocks."""
    return max(spectral_norm(b) for b in x.blocks)


def norm_via_inner(x: ModuleElement) -> float:
    return float(np.sqrt(operator_norm(inner_product(x, x))))
