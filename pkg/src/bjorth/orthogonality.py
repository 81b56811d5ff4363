"""Certified Birkhoff-James, quasi-strong and strong orthogonality.

All three predicates normalize ``x`` and ``y`` to norm one (the relations
are invariant under nonzero scalings), build the norm-attaining frame of
``<x,x>`` and compress ``c = <x,y>`` to it:

* BJ holds iff 0 lies in the convex hull of the compressed numerical
  ranges over all attained blocks (states are mixtures of pure states);
* quasi-strong holds iff 0 lies in one compressed numerical range;
* strong holds iff ``c* xi = 0`` for some unit ``xi`` in the frame, i.e.
  ``rho(<x,y> a) = 0`` for every ``a``.

Failures carry replayable certificates: a scalar ``lam`` and algebra
element ``b`` with ``||x + lam y b|| < ||x||``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .algebra import AlgebraElement, PureState, StateMixture, operator_norm, state_evaluate
from .module import ModuleElement, ModuleSpace, inner_product, module_norm, right_action
from .numrange import (
    Answer,
    CertifiedBool,
    _compress_blocks,
    _frame_from_blocks,
    _kernel_blocks,
    contains_zero,
)
from .errors import SpaceMismatch
from .tolerances import DEFAULT, Tolerances

# a Fails certificate must beat ||x|| by more than roundoff
_CERT_FLOOR = 1e-13


class Relation(str, enum.Enum):
    BJ = "bj"
    QUASI = "quasi"
    STRONG = "strong"

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class FailureCertificate:
    """``||x + lam * (y b)|| = achieved_norm < x_norm``; ``b is None`` means the unit."""

    lam: complex
    b: AlgebraElement | None
    achieved_norm: float
    x_norm: float

    @property
    def margin(self) -> float:
        return self.x_norm - self.achieved_norm

    def to_dict(self) -> dict:
        return {
            "lambda": [float(np.real(self.lam)), float(np.imag(self.lam))],
            "b": None if self.b is None else _blocks_json(self.b.blocks),
            "achieved_norm": self.achieved_norm,
            "x_norm": self.x_norm,
            "margin": self.margin,
        }


@dataclass(frozen=True, eq=False)
class QuasiObstruction:
    """Per attained block: how far 0 is from the compressed numerical range."""

    blocks: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {"per_block": [dict(b) for b in self.blocks]}


@dataclass(frozen=True, eq=False)
class Verdict:
    relation: Relation
    answer: Answer
    witness: PureState | StateMixture | None = None
    failure_certificate: FailureCertificate | QuasiObstruction | None = None
    tolerances: Tolerances = DEFAULT
    margin: float = 0.0
    method: str = "state-criterion"
    detail: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.answer is Answer.HOLDS

    @property
    def fails(self) -> bool:
        return self.answer is Answer.FAILS

    @property
    def certified(self) -> bool:
        return self.answer in (Answer.HOLDS, Answer.FAILS)

    def to_dict(self) -> dict:
        return {
            "relation": self.relation.value,
            "answer": self.answer.value,
            "method": self.method,
            "margin": self.margin,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "failure_certificate": (
                None if self.failure_certificate is None else self.failure_certificate.to_dict()
            ),
            "tolerances": self.tolerances.as_dict(),
            "detail": _jsonable(self.detail),
        }


def _blocks_json(blocks):
    return [[[[float(z.real), float(z.imag)] for z in row] for row in b] for b in blocks]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


class _Prepared:
    """Normalized pair with its attained frame and compressions."""

    def __init__(self, x: ModuleElement, y: ModuleElement, tolerances: Tolerances):
        if not isinstance(x, ModuleElement) or not isinstance(y, ModuleElement):
            raise TypeError("x and y must be ModuleElement instances")
        if x.space != y.space:
            raise SpaceMismatch(f"{x.space} vs {y.space}")
        self.x, self.y = x, y
        self.tol = tolerances
        self.algebra = x.algebra
        self.nx = module_norm(x)
        self.ny = module_norm(y)
        self.trivial = self.nx == 0.0 or self.ny == 0.0
        if self.nx == 0.0:
            self.xs = [np.zeros_like(b) for b in x.blocks]
        else:
            self.xs = [b / self.nx for b in x.blocks]
        self.ys = [b / self.ny for b in y.blocks] if self.ny > 0 else [np.zeros_like(b) for b in y.blocks]
        pblocks = [b.conj().T @ b for b in self.xs]
        self.frame = _frame_from_blocks(self.algebra, pblocks, tolerances.eps_eig)
        self.c = [a.conj().T @ b for a, b in zip(self.xs, self.ys)]
        self.compressions = _compress_blocks(self.c, self.frame)
        self._packed = None

    @property
    def packed(self):
        if self._packed is None:
            self._packed = (_kernels.pack(self.xs), _kernels.pack(self.ys))
        return self._packed

    def frame_state(self, k: int, v: np.ndarray) -> PureState:
        xi = self.frame.bases[k] @ v
        return PureState(self.algebra, k, xi / np.linalg.norm(xi))

    def any_top_state(self) -> PureState:
        k = self.frame.attained_blocks[0]
        return PureState(self.algebra, k, self.frame.bases[k][:, 0])

    def witness_from(self, res: CertifiedBool):
        ks = [k for k, _ in self.compressions]
        if len(res.witness) == 1:
            _, i, v = res.witness[0]
            return self.frame_state(ks[i], v)
        return StateMixture(tuple((w, self.frame_state(ks[i], v)) for w, i, v in res.witness))


def _theta_star(res: CertifiedBool) -> float:
    d = res.detail
    if "theta_min" in d:
        return float(d["theta_min"])
    per = d.get("per_matrix") or []
    best = min(per, key=lambda p: p.get("grid_min", np.inf))
    return float(best["theta_min"])


def _trivial(rel, prep, method="state-criterion"):
    return Verdict(rel, Answer.HOLDS, prep.any_top_state(), None, prep.tol, np.inf, method,
                   {"reason": "x = 0" if prep.nx == 0 else "y = 0"})


def _bj(prep: _Prepared, quasi: CertifiedBool | None = None) -> Verdict:
    tol = prep.tol
    if prep.trivial:
        return _trivial(Relation.BJ, prep)
    Cs = [C for _, C in prep.compressions]
    if quasi is not None and quasi.holds:
        # W(C_k) lies inside the hull, so the single-matrix certificate carries over
        res = CertifiedBool(Answer.HOLDS, quasi.margin, {"mode": "hull", "via": "single", **quasi.detail},
                            quasi.index, quasi.witness, quasi.residual)
    else:
        res = contains_zero(Cs, "hull", tolerances=tol)
    detail = {"certification": res.detail, "attained_blocks": prep.frame.attained_blocks}
    if res.answer is Answer.HOLDS:
        detail["witness_residual"] = res.residual
        return Verdict(Relation.BJ, Answer.HOLDS, prep.witness_from(res), None, tol, res.margin,
                       detail=detail)
    if res.answer is Answer.BORDERLINE:
        return Verdict(Relation.BJ, Answer.BORDERLINE, tolerances=tol, detail=detail)
    theta = _theta_star(res)
    xs, ys = prep.packed
    direction = np.exp(-1j * theta)
    t, achieved = _kernels.line_min(xs, ys, direction.real, direction.imag, 2.0, tol.minimize_tol)
    if achieved > 1.0 - _CERT_FLOOR:
        detail["certificate"] = "line search found no decrease"
        return Verdict(Relation.BJ, Answer.BORDERLINE, tolerances=tol, detail=detail)
    cert = FailureCertificate(complex(t * direction) * prep.nx / prep.ny, None, achieved * prep.nx, prep.nx)
    return Verdict(Relation.BJ, Answer.FAILS, None, cert, tol, res.margin, detail=detail)


def _quasi_cert(prep: _Prepared) -> CertifiedBool:
    Cs = [C for _, C in prep.compressions]
    return contains_zero(Cs, "single", tolerances=prep.tol)


def _quasi(prep: _Prepared, res: CertifiedBool | None = None) -> Verdict:
    tol = prep.tol
    if prep.trivial:
        return _trivial(Relation.QUASI, prep)
    res = res or _quasi_cert(prep)
    detail = {"certification": res.detail, "attained_blocks": prep.frame.attained_blocks}
    if res.answer is Answer.HOLDS:
        detail["witness_residual"] = res.residual
        return Verdict(Relation.QUASI, Answer.HOLDS, prep.witness_from(res), None, tol, res.margin,
                       detail=detail)
    if res.answer is Answer.BORDERLINE:
        return Verdict(Relation.QUASI, Answer.BORDERLINE, tolerances=tol, detail=detail)
    per = tuple(
        {"block": k, "margin": p["margin"], "min_support": p["upper_bound"], "theta": p["theta_min"]}
        for (k, _), p in zip(prep.compressions, res.detail["per_matrix"])
    )
    return Verdict(Relation.QUASI, Answer.FAILS, None, QuasiObstruction(per), tol, res.margin, detail=detail)


def _strong(prep: _Prepared) -> Verdict:
    tol = prep.tol
    if prep.trivial:
        return _trivial(Relation.STRONG, prep)
    ks = _kernel_blocks(prep.c, prep.frame, tol.eps_zero)
    detail = {"sigma_min": ks.sigma, "attained_blocks": prep.frame.attained_blocks}
    if ks.found:
        state = PureState(prep.algebra, ks.block, ks.vector)
        return Verdict(Relation.STRONG, Answer.HOLDS, state, None, tol, tol.eps_zero - ks.sigma,
                       detail=detail)
    # b = <y,x> turns <x, yb> = c c*, positive definite on the frame
    bhat = [blk.conj().T for blk in prep.c]
    yb = [y @ b for y, b in zip(prep.ys, bhat)]
    xs, _ = prep.packed
    t, achieved = _kernels.line_min(xs, _kernels.pack(yb), -1.0, 0.0, 2.0, tol.minimize_tol)
    if achieved > 1.0 - _CERT_FLOOR:
        detail["certificate"] = "line search found no decrease"
        return Verdict(Relation.STRONG, Answer.BORDERLINE, tolerances=tol, detail=detail)
    b = AlgebraElement(prep.algebra, bhat)
    cert = FailureCertificate(complex(-t * prep.nx / prep.ny), b, achieved * prep.nx, prep.nx)
    return Verdict(Relation.STRONG, Answer.FAILS, None, cert, tol, ks.sigma - tol.eps_zero, detail=detail)


def is_bj(x: ModuleElement, y: ModuleElement, tolerances: Tolerances | None = None) -> Verdict:
    """Birkhoff-James orthogonality via the state criterion."""
    return _bj(_Prepared(x, y, tolerances or DEFAULT))


def is_quasi_strong(x: ModuleElement, y: ModuleElement, tolerances: Tolerances | None = None) -> Verdict:
    return _quasi(_Prepared(x, y, tolerances or DEFAULT))


def is_strong(x: ModuleElement, y: ModuleElement, tolerances: Tolerances | None = None) -> Verdict:
    """Strong orthogonality: ``x`` is BJ-orthogonal to ``y a`` for every ``a``.

    Decided by the kernel criterion ``c* xi = 0`` for a frame vector ``xi``,
    where ``c = <x, y>``.  On failure the certificate uses ``b = <y, x>``
    (normalized) and a negative real ``lam``.
    """
    return _strong(_Prepared(x, y, tolerances or DEFAULT))


def classify_pair(x: ModuleElement, y: ModuleElement, tolerances: Tolerances | None = None) -> dict:
    """All three verdicts for one pair, sharing the frame computation."""
    prep = _Prepared(x, y, tolerances or DEFAULT)
    if prep.trivial:
        return {r: _trivial(r, prep) for r in Relation}
    qres = _quasi_cert(prep)
    return {
        Relation.STRONG: _strong(prep),
        Relation.QUASI: _quasi(prep, qres),
        Relation.BJ: _bj(prep, qres),
    }


def check(relation, x, y, tolerances=None) -> Verdict:
    rel = Relation(relation)
    fn = {Relation.BJ: is_bj, Relation.QUASI: is_quasi_strong, Relation.STRONG: is_strong}[rel]
    return fn(x, y, tolerances)


def is_bj_minimization(x: ModuleElement, y: ModuleElement, tolerances: Tolerances | None = None) -> Verdict:
    """Birkhoff-James orthogonality straight from ``||x + lam y|| >= ||x||``.

    ``lam -> ||x + lam y||`` is convex and exceeds ``||x||`` once
    ``|lam| > 2||x||/||y||``, so minimizing over that square decides the
    relation.
    """
    tol = tolerances or DEFAULT
    if x.space != y.space:
        raise SpaceMismatch(f"{x.space} vs {y.space}")
    nx, ny = module_norm(x), module_norm(y)
    if nx == 0.0 or ny == 0.0:
        return Verdict(Relation.BJ, Answer.HOLDS, None, None, tol, np.inf, "minimization",
                       {"minimum": nx, "lambda": [0.0, 0.0]})
    xs = _kernels.pack([b / nx for b in x.blocks])
    ys = _kernels.pack([b / ny for b in y.blocks])
    a, b, fmin = _kernels.plane_min(xs, ys, 2.0, tol.minimize_tol)
    lam = complex(a, b) * nx / ny
    decrease = 1.0 - fmin
    detail = {"minimum": fmin * nx, "lambda": [lam.real, lam.imag], "x_norm": nx}
    if decrease <= tol.eps_zero:
        return Verdict(Relation.BJ, Answer.HOLDS, None, None, tol, tol.eps_zero - decrease,
                       "minimization", detail)
    if decrease <= 10 * tol.eps_zero:
        return Verdict(Relation.BJ, Answer.BORDERLINE, None, None, tol, 0.0, "minimization", detail)
    cert = FailureCertificate(lam, None, fmin * nx, nx)
    return Verdict(Relation.BJ, Answer.FAILS, None, cert, tol, decrease - tol.eps_zero,
                   "minimization", detail)


def _probe_samples(prep: _Prepared, rng, count):
    alg = prep.algebra
    # the criterion's own certificate direction comes first
    yield AlgebraElement(alg, [b.conj().T for b in prep.c])
    for k, n in enumerate(alg.block_dims):
        for p in range(n):
            for q in range(n):
                yield alg.matrix_unit(k, p, q)
    yield alg.unit()
    i = 0
    while True:
        kind = i % 3
        blocks = []
        for n in alg.block_dims:
            g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            if kind == 1:
                q, r = np.linalg.qr(g)
                g = q * (np.diag(r) / np.abs(np.diag(r)))
            elif kind == 2:
                g = g.conj().T @ g
            blocks.append(g)
        yield AlgebraElement(alg, blocks)
        i += 1


def strong_definitional_probe(x: ModuleElement, y: ModuleElement, sample_count: int = 200,
                              rng=None, tolerances: Tolerances | None = None) -> Verdict:
    """One-sided check of strong orthogonality by sampling ``a``.

    Any ``a`` with ``x`` not BJ-orthogonal to ``y a`` refutes strong
    orthogonality with a concrete ``(a, lam)``; exhausting the budget only
    yields NO_COUNTEREXAMPLE.  Directions ``y a`` below ``eps_zero`` relative
    to ``||y|| ||a||`` are treated as zero.
    """
    tol = tolerances or DEFAULT
    prep = _Prepared(x, y, tol)
    if prep.trivial:
        return Verdict(Relation.STRONG, Answer.NO_COUNTEREXAMPLE, None, None, tol, 0.0,
                       "definitional-probe", {"samples": 0})
    rng = np.random.default_rng(rng)
    ny = module_norm(y)
    for i, a in zip(range(sample_count), _probe_samples(prep, rng, sample_count)):
        ya = right_action(y, a)
        # y a at roundoff level relative to ||y|| ||a|| counts as the zero direction
        if module_norm(ya) <= tol.eps_zero * ny * operator_norm(a):
            continue
        v = is_bj_minimization(x, ya, tol)
        if v.fails:
            c = v.failure_certificate
            cert = FailureCertificate(c.lam, a, c.achieved_norm, c.x_norm)
            return Verdict(Relation.STRONG, Answer.FAILS, None, cert, tol, cert.margin,
                           "definitional-probe", {"samples": i + 1})
    return Verdict(Relation.STRONG, Answer.NO_COUNTEREXAMPLE, None, None, tol, 0.0,
                   "definitional-probe", {"samples": sample_count})


def bj_module_algebra_consistency(x: ModuleElement, y: ModuleElement,
                                  tolerances: Tolerances | None = None, return_verdicts: bool = False):
    """Compare ``x _|_ y`` in the module with ``<x,x> _|_ <x,y>`` in the algebra."""
    if x.space != y.space:
        raise SpaceMismatch(f"{x.space} vs {y.space}")
    v_mod = is_bj(x, y, tolerances)
    alg_space = ModuleSpace.over_itself(x.algebra)
    p = alg_space.from_algebra(inner_product(x, x))
    c = alg_space.from_algebra(inner_product(x, y))
    v_alg = is_bj(p, c, tolerances)
    agree = v_mod.answer == v_alg.answer
    if return_verdicts:
        return agree, v_mod, v_alg
    return agree


def replay_witness(verdict: Verdict, x: ModuleElement, y: ModuleElement) -> dict:
    """Re-evaluate a HOLDS witness on the original (unnormalized) pair.

    Residuals are relative: attainment against ``||x||^2`` and the zero
    condition against ``||x|| ||y||``.
    """
    rho = verdict.witness
    nx, ny = module_norm(x), module_norm(y)
    p = inner_product(x, x)
    c = inner_product(x, y)
    scale_p = max(nx * nx, np.finfo(float).tiny)
    scale_c = max(nx * ny, np.finfo(float).tiny)
    attain = abs(state_evaluate(rho, p) - nx * nx) / scale_p
    if verdict.relation is Relation.STRONG:
        terms = rho.terms if isinstance(rho, StateMixture) else ((1.0, rho),)
        zero = max(np.linalg.norm(c.blocks[s.block].conj().T @ s.vector) for _, s in terms) / scale_c
    else:
        zero = abs(state_evaluate(rho, c)) / scale_c
    return {"attain": float(attain), "zero": float(zero)}


def replay_certificate(cert: FailureCertificate, x: ModuleElement, y: ModuleElement) -> float:
    """``||x|| - ||x + lam (y b)||`` recomputed from scratch."""
    yb = y if cert.b is None else right_action(y, cert.b)
    return module_norm(x) - module_norm(x + cert.lam * yb)
