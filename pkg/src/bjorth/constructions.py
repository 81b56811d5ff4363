"""Explicit pairs separating the three orthogonality relations.

* ``make_sqc_pair``: in a noncommutative algebra, ``xa`` is quasi-strongly
  but not strongly orthogonal to ``xau``.  In finite dimensions every
  operator on a block belongs to the algebra, so the projection ``a`` and
  the unitary ``u`` are written down directly from eigenvectors of
  ``<x,x>``.
* ``make_prime_pair``: with two blocks, ``u + v`` is BJ- but not
  quasi-strongly orthogonal to ``u - v`` for ``u``, ``v`` supported in
  different blocks.
* ``make_quasi_pair``: random pairs that are quasi-strongly orthogonal by
  construction (used to populate the HOLDS cells of surveys).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import AlgebraElement, PureState, StateMixture
from .errors import CommutativeAlgebra, DegenerateSample, NotDisjoint, NotEnoughBlocks, ShapeError
from .module import ModuleElement, ModuleSpace, inner_product, module_norm, right_action
from .sampling import _ginibre, _isometry, sample_element

PROFILES = ("projection", "paper_quartic")


def _fix_phase(v):
    i = int(np.argmax(np.abs(v)))
    return v * (abs(v[i]) / v[i])


@dataclass(frozen=True, eq=False)
class SqcCounterexample:
    x_prime: ModuleElement
    y_prime: ModuleElement
    witness: PureState
    b: AlgebraElement
    lam: complex
    achieved_norm: float
    case_label: str
    block: int
    profile: str
    x: ModuleElement
    a: AlgebraElement
    u: AlgebraElement

    def certificates(self) -> dict:
        return {
            "kind": "sqc",
            "case": self.case_label,
            "block": self.block,
            "profile": self.profile,
            "witness": self.witness.to_dict(),
            "failure": {
                "lambda": [self.lam.real, self.lam.imag],
                "b": [[[[float(z.real), float(z.imag)] for z in row] for row in blk] for blk in self.b.blocks],
                "achieved_norm": self.achieved_norm,
            },
            "expected": {"quasi": "holds", "strong": "fails"},
        }


@dataclass(frozen=True, eq=False)
class PrimeCounterexample:
    u_plus: ModuleElement
    u_minus: ModuleElement
    bj_witness: StateMixture
    quasi_obstruction: dict
    blocks: tuple[int, int]
    u: ModuleElement
    v: ModuleElement

    def certificates(self) -> dict:
        return {
            "kind": "prime",
            "blocks": list(self.blocks),
            "bj_witness": self.bj_witness.to_dict(),
            "quasi_obstruction": self.quasi_obstruction,
            "expected": {"bj": "holds", "quasi": "fails"},
        }


def _case_label(eigs, eps=1e-9):
    rank = int(np.sum(eigs > eps))
    if rank <= 1:
        return "I"
    if np.all((eigs <= eps) | (eigs >= 1.0 - eps)):
        return "II"
    return "III"


def _random_block(rng, m, n, spectrum):
    s = np.asarray(spectrum, float)
    r = int(np.sum(s > 0))
    if r > m:
        raise ShapeError(f"rank {r} spectrum does not fit a {m}x{n} block")
    V = _isometry(rng, n, n)
    Q = _isometry(rng, m, r)
    return Q @ np.diag(np.sqrt(s[:r])) @ V[:, :r].conj().T


def make_sqc_pair(space: ModuleSpace, block: int | None = None, profile: str = "projection",
                  rng=None, x: ModuleElement | None = None,
                  spectrum: Sequence[float] | None = None, case: str | None = None) -> SqcCounterexample:
    """Quasi-strongly but not strongly orthogonal pair ``(xa, xau)``.

    ``x`` is supported in a block with ``n_k >= 2`` and has norm one.  With
    ``xi_rho`` a top eigenvector of ``<x,x>`` and ``xi'`` an orthogonal
    eigenvector, ``u`` swaps them, so ``omega_{xi_rho}(<xa, xau>) = 0``
    while ``b = u* a``, ``lam = -1`` give ``||xa - xau b|| = ||x(a - a^2)||``.

    ``profile="projection"`` makes ``a`` the projection onto
    ``span{xi_rho, xi'}`` (failure norm 0); ``"paper_quartic"`` uses
    ``a = E + (1 - E)/2`` with ``E`` the projection onto ``xi_rho``, so that
    ``||a - a^2|| = 1/4`` and the failure norm is at most 1/4.

    ``case`` picks the spectrum of ``<x,x>`` when neither ``x`` nor
    ``spectrum`` is given: ``"I"`` rank-one projection, ``"II"`` rank-two
    projection, ``"III"`` (default) a spectrum meeting ``(0, 1)``.

    Raises:
        CommutativeAlgebra: every block is one-dimensional.
    """
    alg = space.algebra
    if alg.is_commutative():
        raise CommutativeAlgebra(
            f"{alg} is commutative: strong and quasi-strong orthogonality coincide, "
            "so no separating pair exists"
        )
    if case not in (None, "I", "II", "III"):
        raise ValueError("case must be 'I', 'II' or 'III'")
    if profile not in PROFILES:
        raise ValueError(f"profile must be one of {PROFILES}")
    if block is None:
        block = next(k for k, n in enumerate(alg.block_dims) if n >= 2)
    n = alg.block_dims[block]
    if n < 2:
        raise ValueError(f"block {block} has dimension 1; pick a block with n >= 2")
    m = space.row_dims[block]
    rng = np.random.default_rng(rng)
    if x is None:
        if spectrum is None and case in ("I", "II"):
            r = 1 if case == "I" else 2
            if r > min(m, n):
                raise ShapeError(f"case II needs a block with m, n >= 2, got {m}x{n}")
            spectrum = [1.0] * r + [0.0] * (n - r)
        elif spectrum is None:
            rest = np.sort(rng.uniform(0.1, 0.9, n - 1))[::-1]
            spectrum = np.concatenate([[1.0], rest])
            spectrum[min(m, n):] = 0.0
        xk = _random_block(rng, m, n, spectrum)
    else:
        if x.space != space:
            raise ShapeError("x must belong to the given space")
        xk = np.array(x.blocks[block])
    nrm = np.linalg.norm(xk, 2)
    if nrm == 0:
        raise DegenerateSample("x vanishes on the chosen block")
    xk = xk / nrm
    x = space.block_element(block, xk)

    w, vecs = np.linalg.eigh(xk.conj().T @ xk)
    w, vecs = w[::-1], vecs[:, ::-1]
    xi_rho = _fix_phase(vecs[:, 0])
    xi_other = _fix_phase(vecs[:, 1])
    label = _case_label(w)

    E = np.outer(xi_rho, xi_rho.conj())
    F = np.outer(xi_other, xi_other.conj())
    a_blocks, u_blocks = [], []
    for k, nk in enumerate(alg.block_dims):
        eye = np.eye(nk, dtype=complex)
        if k == block:
            a_k = E + F if profile == "projection" else E + 0.5 * (eye - E)
            u_k = eye - E - F + np.outer(xi_other, xi_rho.conj()) + np.outer(xi_rho, xi_other.conj())
        else:
            a_k = np.zeros((nk, nk), complex) if profile == "projection" else 0.5 * eye
            u_k = eye
        a_blocks.append(a_k)
        u_blocks.append(u_k)
    a = AlgebraElement(alg, a_blocks)
    u = AlgebraElement(alg, u_blocks)
    x_prime = right_action(x, a)
    y_prime = right_action(x_prime, u)
    b = u.adjoint() @ a
    lam = -1.0 + 0j
    achieved = module_norm(x_prime + lam * right_action(y_prime, b))
    witness = PureState(alg, block, xi_rho)
    return SqcCounterexample(x_prime, y_prime, witness, b, lam, achieved, label, block, profile, x, a, u)


def _top_vector(blk):
    w, v = np.linalg.eigh(blk.conj().T @ blk)
    return _fix_phase(v[:, -1])


def make_prime_pair(space: ModuleSpace, blocks: tuple[int, int] | None = None, rng=None,
                    u: ModuleElement | None = None, v: ModuleElement | None = None) -> PrimeCounterexample:
    """BJ- but not quasi-strongly orthogonal pair ``(u + v, u - v)``.

    ``u`` and ``v`` are norm-one elements supported in different blocks.
    Without ``rng`` they are matrix units; with ``rng`` they are random.

    Raises:
        NotEnoughBlocks: the algebra has one block (it is prime).
    """
    alg = space.algebra
    if alg.num_blocks < 2:
        raise NotEnoughBlocks(
            f"{alg} is prime (a single block): BJ and quasi-strong orthogonality "
            "cannot be separated by disjointly supported elements"
        )
    i, j = blocks if blocks is not None else (0, 1)
    if i == j:
        raise ValueError("the two blocks must differ")
    if u is None or v is None:
        gen = None if rng is None else np.random.default_rng(rng)

        def one(k):
            shape = space.shapes[k]
            if gen is None:
                mat = np.zeros(shape, complex)
                mat[0, 0] = 1.0
            else:
                mat = _ginibre(gen, *shape)
                mat = mat / np.linalg.norm(mat, 2)
            return space.block_element(k, mat)

        u, v = one(i), one(j)
    u_plus = u + v
    u_minus = u - v
    wi = PureState(alg, i, _top_vector(u.blocks[i]))
    wj = PureState(alg, j, _top_vector(v.blocks[j]))
    c = inner_product(u_plus, u_minus)
    obstruction = {
        "block_i": {"block": i, "value": float(wi(c).real)},
        "block_j": {"block": j, "value": float(wj(c).real)},
    }
    mixture = StateMixture(((0.5, wi), (0.5, wj)))
    return PrimeCounterexample(u_plus, u_minus, mixture, obstruction, (i, j), u, v)


def default_max_norm_grid(points: int = 100) -> list[tuple[complex, complex]]:
    """Deterministic ``(alpha, beta)`` grid mixing real and complex values."""
    side = int(np.ceil(np.sqrt(points)))
    radii = np.linspace(0.0, 2.0, side)
    grid = []
    for p, ra in enumerate(radii):
        for q, rb in enumerate(radii):
            alpha = ra * np.exp(1j * 0.7 * p)
            beta = rb * np.exp(-1j * 1.3 * q)
            grid.append((complex(alpha), complex(beta)))
    grid[:3] = [(1 + 0j, 1 + 0j), (2 + 0j, 0j), (1 + 1j, 1 - 1j)]
    return grid[:points]


def verify_max_norm_formula(u: ModuleElement, v: ModuleElement, grid=None, tol: float = 1e-9):
    """Check ``||alpha u + beta v|| = max(|alpha|, |beta|)`` over a grid.

    Returns ``(ok, max_deviation)``.

    Raises:
        NotDisjoint: ``<u,v>`` or ``<u,u><v,v>`` is nonzero.
    """
    g_uv = inner_product(u, v)
    prod = inner_product(u, u) @ inner_product(v, v)
    if g_uv.norm() > tol or prod.norm() > tol:
        raise NotDisjoint("u and v are not disjointly supported")
    for name, e in (("u", u), ("v", v)):
        if abs(module_norm(e) - 1.0) > tol:
            raise ValueError(f"{name} must have norm one")
    grid = default_max_norm_grid() if grid is None else grid
    dev = 0.0
    for alpha, beta in grid:
        dev = max(dev, abs(module_norm(alpha * u + beta * v) - max(abs(alpha), abs(beta))))
    return dev <= tol, dev


def make_quasi_pair(space: ModuleSpace, rng=None, x: ModuleElement | None = None,
                    y0: ModuleElement | None = None, kind: str = "ginibre", return_witness: bool = False):
    """Pair ``(x, y)`` with ``x`` quasi-strongly orthogonal to ``y``.

    ``y = y0 - mu x`` with ``mu = <<x,y0> xi, xi> / ||x||^2`` for a top
    eigenvector ``xi`` of ``<x,x>`` on an attained block, so the vector
    state ``omega_xi`` attains the norm and kills ``<x,y>``.
    """
    rng = np.random.default_rng(rng)
    if x is None:
        x = sample_element(rng, space, kind)
    if y0 is None:
        y0 = sample_element(rng, space, "ginibre")
    nx = module_norm(x)
    if nx < 1e-12:
        raise DegenerateSample("x is numerically zero")
    p = inner_product(x, x)
    tops = []
    for k, blk in enumerate(p.blocks):
        w, vecs = np.linalg.eigh((blk + blk.conj().T) / 2)
        tops.append((w[-1], k, vecs[:, -1]))
    _, k, xi = max(tops, key=lambda t: t[0])
    c0 = inner_product(x, y0).blocks[k]
    mu = complex(np.vdot(xi, c0 @ xi)) / (nx * nx)
    y = y0 - mu * x
    if module_norm(y) <= 64 * np.finfo(float).eps * (module_norm(y0) + abs(mu) * nx):
        # total cancellation (y0 parallel to x): the exact answer is y = 0
        y = space.zeros()
    if return_witness:
        return x, y, PureState(space.algebra, k, xi)
    return x, y
