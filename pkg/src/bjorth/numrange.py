"""Norm-attaining eigenframes and certified numerical-range membership.

A pure state ``omega_xi`` attains ``rho(<x,x>) = ||x||^2`` exactly when
``xi`` lies in the top eigenspace of ``<x,x>`` on a block whose top
eigenvalue is the global maximum.  Compressing ``c = <x,y>`` to those
eigenspaces turns every state criterion into a question about numerical
ranges, which are decided here through support functions

    h_C(theta) = lambda_max( (e^{-i theta} C + e^{i theta} C*) / 2 ).

For a compact convex set ``W``, ``min_theta h_W(theta)`` is the signed
distance from 0 to the complement of ``W`` (negative outside), so
"0 in W up to tol" is ``min_theta h >= -tol``.  ``h`` is ``||C||``-Lipschitz,
which turns a finite grid into a certificate.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar, nnls

from . import _kernels
from .algebra import AlgebraElement, BlockAlgebra
from .errors import AlgebraMismatch, EmptyInput, NotPositive
from .tolerances import DEFAULT, Tolerances


class Answer(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    BORDERLINE = "borderline"
    NO_COUNTEREXAMPLE = "no_counterexample_found"

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class EigenFrame:
    algebra: BlockAlgebra
    attained: tuple[bool, ...]
    bases: tuple[np.ndarray, ...]
    top_values: tuple[float, ...]
    norm: float
    eps_eig: float = DEFAULT.eps_eig

    @property
    def attained_blocks(self) -> list[int]:
        return [k for k, a in enumerate(self.attained) if a]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(b.shape[1] for b in self.bases)


def _frame_from_blocks(algebra, pblocks, eps_eig):
    tops, bases = [], []
    for b in pblocks:
        if b.shape[0] == 1:
            tops.append(float(b[0, 0].real))
            bases.append((np.array([b[0, 0].real]), np.ones((1, 1), complex)))
            continue
        w, v = np.linalg.eigh((b + b.conj().T) * 0.5)
        tops.append(float(w[-1]))
        bases.append((w, v))
    gmax = max(tops)
    cut = eps_eig * max(gmax, 0.0)
    attained = []
    frames = []
    for top, (w, v) in zip(tops, bases):
        keep = w >= top - cut
        frames.append(v[:, keep])
        attained.append(bool(top >= gmax - cut))
    return EigenFrame(algebra, tuple(attained), tuple(frames), tuple(tops), gmax, eps_eig)


def top_eigenframe(p: AlgebraElement, eps_eig: float = DEFAULT.eps_eig) -> EigenFrame:
    """Orthonormal bases of the top eigenspaces of a positive element.

    Eigenvalues within ``eps_eig * ||p||`` of a block's maximum join that
    block's frame; a block is *attained* when its maximum is within the
    same window of the global maximum.

    Raises:
        NotPositive: if ``p`` is not positive within tolerance.
    """
    if not p.is_positive(eps_eig):
        raise NotPositive("top_eigenframe needs a positive element")
    return _frame_from_blocks(p.algebra, p.blocks, eps_eig)


def compress(c: AlgebraElement, frame: EigenFrame) -> list[tuple[int, np.ndarray]]:
    """``B_k* c_k B_k`` for every attained block ``k``."""
    if c.algebra != frame.algebra:
        raise AlgebraMismatch(f"{c.algebra} vs {frame.algebra}")
    return _compress_blocks(c.blocks, frame)


def _compress_blocks(cblocks, frame):
    out = []
    for k in frame.attained_blocks:
        B = frame.bases[k]
        out.append((k, B.conj().T @ cblocks[k] @ B))
    return out


def support_function(C, theta):
    """Top eigenvalue of ``Re(e^{-i theta} C)``; ``theta`` may be an array."""
    C = np.atleast_2d(np.asarray(C, complex))
    th = np.atleast_1d(np.asarray(theta, float))
    vals = np.asarray(_kernels.support_values(C, th))
    return float(vals[0]) if np.ndim(theta) == 0 else vals


@dataclass(frozen=True, eq=False)
class CertifiedBool:
    """Outcome of a certified membership test.

    ``margin`` is the certified distance of ``min_theta h`` from the
    threshold ``-tol``.  On HOLDS, ``index`` names the matrix containing 0
    (single mode) and ``witness`` holds ``(weight, index, unit vector)``
    triples whose weighted values average to 0 within ``residual``.
    """

    answer: Answer
    margin: float
    detail: dict = field(default_factory=dict)
    index: int | None = None
    witness: list | None = None
    residual: float | None = None

    @property
    def holds(self) -> bool:
        return self.answer is Answer.HOLDS


def _grid(n):
    return np.arange(n) * (2.0 * np.pi / n)


def _phi_factory(Cs):
    """Vectorized ``theta -> max_k h_{C_k}(theta)``.

    ``phi.points(theta)`` returns, for each angle, a point of the hull
    attaining the maximum.
    """
    scalars = np.array([C[0, 0] for C in Cs if C.shape[0] == 1], complex)
    mats = [C for C in Cs if C.shape[0] > 1]

    def phi(th):
        th = np.asarray(th, float)
        out = np.full(th.shape, -np.inf)
        if scalars.size:
            ph = np.exp(-1j * th)
            out = np.maximum(out, np.max(np.real(ph[:, None] * scalars[None, :]), axis=1))
        for C in mats:
            out = np.maximum(out, _kernels.support_values(C, th))
        return out

    def points(th):
        th = np.asarray(th, float)
        best = np.full(th.shape, -np.inf)
        z = np.zeros(th.shape, complex)
        ph = np.exp(-1j * th)
        if scalars.size:
            r = np.real(ph[:, None] * scalars[None, :])
            j = np.argmax(r, axis=1)
            best = r[np.arange(th.size), j]
            z = scalars[j]
        for C in mats:
            _, V = _kernels.support_points(C, th)
            zc = _values(C, np.asarray(V))
            h = np.real(ph * zc)
            better = h > best
            best = np.where(better, h, best)
            z = np.where(better, zc, z)
        return z

    phi.points = points
    return phi


def _segment_lower(a, b, za, zb):
    """Exact minimum over ``[a, b]`` of ``max(Re(e^{-it} za), Re(e^{-it} zb))``.

    Both points lie in the convex set, so this bounds its support function
    from below on the cell.
    """
    def g(t):
        ph = np.exp(-1j * t)
        return np.maximum(np.real(ph * za), np.real(ph * zb))

    best = np.minimum(g(a), g(b))
    base = np.angle(za - zb) + 0.5 * np.pi
    for t in (base, base + np.pi, np.angle(za) + np.pi, np.angle(zb) + np.pi):
        tt = a + np.mod(t - a, 2.0 * np.pi)
        inside = tt <= b
        best = np.where(inside, np.minimum(best, g(tt)), best)
    return best


def certify_min(phi, L, tol, grid_points=DEFAULT.grid_points, max_depth=DEFAULT.max_depth, max_cells=20000):
    """Certify the sign of ``min phi + tol`` for an ``L``-Lipschitz periodic ``phi``.

    ``L=None`` declares ``phi`` the support function of a compact convex set
    and derives the constant from the grid values.

    Returns ``(answer, margin, detail)``.  A grid value below ``-tol`` is a
    FAILS certificate by itself; HOLDS needs a lower bound above ``-tol``
    on every cell.  Cell bounds are the Lipschitz bound
    ``(f_a + f_b)/2 - L (b - a)/2`` and, when ``phi.points`` exists, the
    support function of the segment joining the endpoint support points.
    Undecided cells are bisected up to ``max_depth`` times.
    """
    points = getattr(phi, "points", None)
    th = _grid(grid_points)
    # every 16th grid angle first: one value below -tol already certifies FAILS
    if grid_points % 16 == 0 and grid_points >= 256:
        sub = th[::16]
        sv = phi(sub)
        i = int(np.argmin(sv))
        if sv[i] < -tol:
            # settle the minimum on the full grid near the coarse one
            near = th[(16 * i + np.arange(-16, 17)) % grid_points]
            nv = phi(near)
            j = int(np.argmin(nv))
            detail = {"grid_min": float(nv[j]), "theta_min": float(near[j]), "depth": 0,
                      "upper_bound": float(nv[j]), "coarse": True}
            return Answer.FAILS, -tol - float(nv[j]), detail
    vals = phi(th)
    if L is None:
        # support function of a convex set: Lipschitz with its radius, which the
        # grid bounds from above (the farthest point is within half a spacing of a grid angle)
        L = max(float(vals.max()), 0.0) / np.cos(np.pi / grid_points)
    L = max(float(L), 0.0)
    i = int(np.argmin(vals))
    upper, theta_up = float(vals[i]), float(th[i])
    detail = {"grid_min": upper, "theta_min": theta_up, "lipschitz": L, "depth": 0}
    if upper < -tol:
        detail["upper_bound"] = upper
        return Answer.FAILS, -tol - upper, detail
    a = th
    b = th + 2.0 * np.pi / grid_points
    fa = vals
    fb = np.roll(vals, -1)
    za = zb = None
    lower_done = np.inf
    lb = None
    for depth in range(max_depth + 1):
        lb = 0.5 * (fa + fb) - 0.5 * L * (b - a)
        if points is not None:
            open_ = lb <= -tol
            if open_.any():
                if za is None:
                    zs = points(th)
                    za, zb = zs, np.roll(zs, -1)
                lb = np.where(open_, np.maximum(lb, _segment_lower(a, b, za, zb)), lb)
        ok = lb > -tol
        if ok.any():
            lower_done = min(lower_done, float(lb[ok].min()))
        keep = ~ok
        a, b, fa, fb, lb = a[keep], b[keep], fa[keep], fb[keep], lb[keep]
        if za is not None:
            za, zb = za[keep], zb[keep]
        detail["depth"] = depth
        if a.size == 0:
            detail["lower_bound"] = lower_done
            detail["upper_bound"] = upper
            return Answer.HOLDS, lower_done + tol, detail
        if depth == max_depth or 2 * a.size > max_cells:
            break
        mid = 0.5 * (a + b)
        fm = phi(mid)
        j = int(np.argmin(fm))
        if fm[j] < upper:
            upper, theta_up = float(fm[j]), float(mid[j])
            detail["theta_min"] = theta_up
            if upper < -tol:
                detail["upper_bound"] = upper
                return Answer.FAILS, -tol - upper, detail
        if za is not None:
            zm = points(mid)
            za, zb = np.concatenate([za, zm]), np.concatenate([zm, zb])
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])
        fa, fb = np.concatenate([fa, fm]), np.concatenate([fm, fb])
    detail["lower_bound"] = float(min(lower_done, lb.min()))
    detail["upper_bound"] = upper
    detail["residual_interval"] = [detail["lower_bound"], upper]
    return Answer.BORDERLINE, 0.0, detail


def _refine_theta(phi, theta0, width):
    res = minimize_scalar(
        lambda t: float(phi(np.array([t]))[0]),
        bounds=(theta0 - width, theta0 + width),
        method="bounded",
        options={"xatol": 1e-13},
    )
    return float(res.x)


def _values(C, V):
    return np.asarray(_kernels.nr_values(C, np.ascontiguousarray(V)))


def segment_reach(C, u, v, target, tol=DEFAULT.witness_tol, max_iter=200):
    """Unit vector in ``span{u, v}`` whose numerical-range value is ``target``.

    ``target`` must lie on the segment between ``<Cu,u>`` and ``<Cv,v>``.
    Along the path ``(1-t) u + t e^{i phi} v`` with ``phi`` chosen so that the
    component orthogonal to the segment stays zero, the value moves
    continuously from one endpoint to the other.  The real part of the
    value minus ``target`` is a quadratic form in ``t``, so the crossing is a
    root of a quadratic; bisection is the fallback.
    """
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    z1 = complex(np.vdot(u, C @ u))
    z2 = complex(np.vdot(v, C @ v))
    d = z2 - z1
    if abs(d) <= tol:
        return u if abs(target - z1) <= abs(target - z2) else v
    omega = np.conj(d) / abs(d)
    D = omega * (C - z1 * np.eye(C.shape[0]))
    S = (D - D.conj().T) / 2j
    g = complex(np.vdot(u, S @ v))
    phase = 1j * np.conj(g) / abs(g) if abs(g) > 0 else 1.0 + 0j
    # of the two admissible phases pick the one that keeps the path away from 0
    if (phase * np.vdot(u, v)).real < 0:
        phase = -phase
    goal = (omega * (complex(target) - z1)).real
    span = abs(d)
    goal = min(max(goal, 0.0), span)

    def point(t):
        w = (1.0 - t) * u + t * phase * v
        return w / np.linalg.norm(w)

    def val(w):
        return complex(np.vdot(w, D @ w)).real

    Hr = 0.5 * (D + D.conj().T) - goal * np.eye(C.shape[0])
    alpha = np.vdot(u, Hr @ u).real
    gamma = np.vdot(v, Hr @ v).real
    beta = (phase * np.vdot(u, Hr @ v)).real
    qa, qb, qc = alpha - 2.0 * beta + gamma, 2.0 * (beta - alpha), alpha
    roots = np.roots([qa, qb, qc]) if abs(qa) > 1e-300 else np.array([-qc / qb if qb else 0.0])
    for r in roots:
        if abs(r.imag) < 1e-12 and -1e-12 <= r.real <= 1.0 + 1e-12:
            w = point(min(max(r.real, 0.0), 1.0))
            if abs(val(w) - goal) <= tol * 1e-2:
                return w

    lo, hi = 0.0, 1.0
    w = point(0.5)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        w = point(mid)
        f = val(w)
        if abs(f - goal) <= tol * 1e-2 or hi - lo < 1e-16:
            break
        if f < goal:
            lo = mid
        else:
            hi = mid
    return w


def _merge(C, vecs, vals, weights, tol):
    """Fold weighted points of W(C) into one vector realizing their average."""
    order = np.argsort(-np.asarray(weights))
    acc_v = vecs[order[0]]
    acc_z = vals[order[0]]
    acc_w = weights[order[0]]
    for j in order[1:]:
        w = weights[j]
        if w <= 0:
            continue
        target = (acc_w * acc_z + w * vals[j]) / (acc_w + w)
        acc_v = segment_reach(C, acc_v, vecs[j], target, tol)
        acc_z = complex(np.vdot(acc_v, C @ acc_v))
        acc_w += w
    return acc_v, acc_z


def _convex_zero_weights(points):
    """Nonnegative weights summing to 1 with ``sum w z`` as close to 0 as possible."""
    P = len(points)
    A = np.vstack([points.real, points.imag, np.ones(P)])
    w, _ = nnls(A, np.array([0.0, 0.0, 1.0]), maxiter=50 * P)
    s = w.sum()
    if s <= 0:
        return None
    return w / s


def _fan_weights(points):
    """Barycentric weights of 0 in a fan triangulation of an ordered convex polygon."""
    z0 = points[0]
    a = points[1:-1] - z0
    b = points[2:] - z0
    r = -z0
    det = a.real * b.imag - a.imag * b.real
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (r.real * b.imag - r.imag * b.real) / det
        t = (a.real * r.imag - a.imag * r.real) / det
        ok = (np.abs(det) > 1e-14 * max(np.abs(points).max(), 1.0) ** 2) & (s >= 0) & (t >= 0) & (s + t <= 1)
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        return None
    j = int(idx[0])
    w = np.zeros(len(points))
    w[0] = 1.0 - s[j] - t[j]
    w[j + 1] = s[j]
    w[j + 2] = t[j]
    return w


def _candidate_points(C, theta_star, grid_points):
    th = _grid(grid_points)
    if theta_star is not None:
        th = np.concatenate([th, theta_star + np.array([0.0, -1e-7, 1e-7, -1e-4, 1e-4])])
    h, V = _kernels.support_points(C, th)
    V = np.asarray(V)
    return V, _values(C, V)


def numerical_range_witness(C, tol=DEFAULT.eps_zero, theta_star=None, grid_points=DEFAULT.grid_points,
                            witness_tol=DEFAULT.witness_tol):
    """Unit vector ``xi`` with ``|<C xi, xi>|`` as small as possible (target 0).

    Returns ``(xi, value)``; the caller checks ``|value|`` against its
    tolerance.  Support points ordered by angle form a polygon inscribed
    in ``W(C)``; 0 is located in a fan triangle (or via a least-squares
    convex combination) and the triangle's vertices are merged along
    Toeplitz-Hausdorff paths.
    """
    C = np.asarray(C, complex)
    d = C.shape[0]
    if d == 1:
        return np.ones(1, complex), complex(C[0, 0])
    best = None
    # a coarse inscribed polygon usually already surrounds 0
    for n in sorted({min(48, grid_points), grid_points}):
        xi, val = _polygon_witness(C, theta_star, n, witness_tol)
        if best is None or abs(val) < abs(best[1]):
            best = (xi, val)
        if abs(val) <= witness_tol:
            break
    return best


def _polygon_witness(C, theta_star, grid_points, witness_tol):
    V, z = _candidate_points(C, theta_star, grid_points)
    j = int(np.argmin(np.abs(z)))
    if abs(z[j]) <= witness_tol:
        return V[j], complex(z[j])
    w = _fan_weights(z[:grid_points])
    if w is None:
        w = _convex_zero_weights(z)
        if w is None:
            return V[j], complex(z[j])
        Vs, zs = V, z
    else:
        Vs, zs = V[:grid_points], z[:grid_points]
    keep = np.flatnonzero(w > 1e-15)
    # collapse onto at most three supporting points
    if keep.size > 3:
        keep = keep[np.argsort(-w[keep])[:3]]
    ww = w[keep] / w[keep].sum()
    xi, val = _merge(C, [Vs[i] for i in keep], zs[keep], ww, witness_tol)
    if abs(val) > abs(z[j]):
        return V[j], complex(z[j])
    return xi, val


def contains_zero(compressions: Sequence, mode: str = "single", tol: float | None = None,
                  tolerances: Tolerances | None = None, witness: bool = True) -> CertifiedBool:
    """Certified test of ``0 in W(C)`` (single) or ``0 in conv(U_k W(C_k))`` (hull).

    In single mode with several matrices the answer is HOLDS as soon as one
    matrix contains 0; ``index`` names it.  FAILS needs every matrix
    certified to exclude 0.
    """
    tolerances = tolerances or DEFAULT
    tol = tolerances.eps_zero if tol is None else tol
    Cs = [np.atleast_2d(np.asarray(C, complex)) for C in compressions]
    if not Cs:
        raise EmptyInput("contains_zero needs at least one matrix")
    for C in Cs:
        if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape[0] == 0:
            raise ValueError(f"compressions must be nonempty square matrices, got {C.shape}")
    if mode == "single":
        return _single(Cs, tol, tolerances, witness)
    if mode == "hull":
        return _hull(Cs, tol, tolerances, witness)
    raise ValueError(f"unknown mode {mode!r}")


def _certify_one(C, tol, tolerances):
    if C.shape[0] == 1:
        c = complex(C[0, 0])
        s = -abs(c)
        th = float(np.angle(c)) + np.pi if c != 0 else 0.0
        detail = {"grid_min": s, "theta_min": th, "lipschitz": abs(c), "depth": 0,
                  "lower_bound": s, "upper_bound": s, "exact": True}
        if s >= -tol:
            return Answer.HOLDS, s + tol, detail
        return Answer.FAILS, -tol - s, detail
    return certify_min(_phi_factory([C]), None, tol, tolerances.grid_points, tolerances.max_depth)


def _single(Cs, tol, tolerances, want_witness):
    per = []
    borderline = False
    for i, C in enumerate(Cs):
        ans, margin, detail = _certify_one(C, tol, tolerances)
        per.append({"answer": ans.value, "margin": margin, **detail})
        if ans is Answer.HOLDS:
            if not want_witness:
                return CertifiedBool(ans, margin, {"per_matrix": per}, index=i)
            xi, val = numerical_range_witness(C, tol, detail.get("theta_min"), tolerances.grid_points,
                                              tolerances.witness_tol)
            if abs(val) <= 10 * tol:
                return CertifiedBool(ans, margin, {"per_matrix": per}, index=i,
                                     witness=[(1.0, i, xi)], residual=abs(val))
            per[-1]["witness_residual"] = abs(val)
            borderline = True
        elif ans is Answer.BORDERLINE:
            borderline = True
    if borderline:
        return CertifiedBool(Answer.BORDERLINE, 0.0, {"per_matrix": per})
    return CertifiedBool(Answer.FAILS, min(p["margin"] for p in per), {"per_matrix": per})


def _hull(Cs, tol, tolerances, want_witness):
    if len(Cs) == 1:
        res = _single(Cs, tol, tolerances, want_witness)
        return CertifiedBool(res.answer, res.margin, {"mode": "hull", **res.detail}, res.index,
                             res.witness, res.residual)
    phi = _phi_factory(Cs)
    ans, margin, detail = certify_min(phi, None, tol, tolerances.grid_points, tolerances.max_depth)
    detail["mode"] = "hull"
    if ans is not Answer.HOLDS or not want_witness:
        return CertifiedBool(ans, margin, detail)
    # a single block containing 0 gives a pure witness
    single = _single(Cs, tol, tolerances, True)
    if single.answer is Answer.HOLDS:
        return CertifiedBool(ans, margin, detail, single.index, single.witness, single.residual)
    mix = _hull_witness(Cs, phi, detail, tolerances)
    if mix is None:
        return CertifiedBool(Answer.BORDERLINE, 0.0, {**detail, "witness": "not found"})
    terms, residual = mix
    if residual > 10 * tol:
        return CertifiedBool(Answer.BORDERLINE, 0.0, {**detail, "witness_residual": residual})
    return CertifiedBool(ans, margin, detail, None, terms, residual)


def _hull_witness(Cs, phi, detail, tolerances, per_block_points=180):
    theta_star = detail.get("theta_min")
    if theta_star is not None:
        theta_star = _refine_theta(phi, theta_star, 2 * np.pi / tolerances.grid_points)
    best = None
    for n in sorted({min(36, per_block_points), per_block_points}):
        mix = _hull_witness_at(Cs, theta_star, tolerances, n)
        if mix is not None and (best is None or mix[1] < best[1]):
            best = mix
        if best is not None and best[1] <= tolerances.eps_zero:
            break
    return best


def _hull_witness_at(Cs, theta_star, tolerances, per_block_points):
    vecs, vals, owner = [], [], []
    for i, C in enumerate(Cs):
        if C.shape[0] == 1:
            vecs.append(np.ones(1, complex))
            vals.append(complex(C[0, 0]))
            owner.append(i)
            continue
        V, z = _candidate_points(C, theta_star, per_block_points)
        vecs.extend(V)
        vals.extend(z)
        owner.extend([i] * len(z))
    vals = np.asarray(vals)
    owner = np.asarray(owner)
    w = _convex_zero_weights(vals)
    if w is None:
        return None
    keep = np.flatnonzero(w > 1e-15)
    if keep.size > 3:
        keep = keep[np.argsort(-w[keep])[:3]]
    w = np.zeros_like(w)
    total = 0.0
    terms = []
    ww = _convex_zero_weights(vals[keep])
    if ww is None:
        return None
    acc = 0j
    for blk in np.unique(owner[keep]):
        sel = keep[owner[keep] == blk]
        wsel = ww[np.isin(keep, sel)]
        if wsel.sum() <= 0:
            continue
        C = Cs[blk]
        xi, z = _merge(C, [vecs[i] for i in sel], vals[sel], wsel / wsel.sum(), tolerances.witness_tol)
        terms.append((float(wsel.sum()), int(blk), xi))
        acc += wsel.sum() * z
        total += wsel.sum()
    terms = [(wt / total, blk, xi) for wt, blk, xi in terms if wt > 0]
    return terms, abs(acc / total)


@dataclass(frozen=True, eq=False)
class KernelSearch:
    """Smallest ``||c_k* xi||`` over unit ``xi`` in the attained frames."""

    block: int | None
    vector: np.ndarray | None
    sigma: float

    @property
    def found(self) -> bool:
        return self.block is not None


def kernel_vector_in_frame(c: AlgebraElement, frame: EigenFrame, tol: float = DEFAULT.eps_zero) -> KernelSearch:
    """Find a frame vector annihilated by ``c*`` (within ``tol``)."""
    if c.algebra != frame.algebra:
        raise AlgebraMismatch(f"{c.algebra} vs {frame.algebra}")
    return _kernel_blocks(c.blocks, frame, tol)


def _kernel_blocks(cblocks, frame, tol):
    best = (np.inf, None, None)
    for k in frame.attained_blocks:
        B = frame.bases[k]
        M = cblocks[k].conj().T @ B
        d = B.shape[1]
        if d == 1:
            sig = float(np.linalg.norm(M))
            if sig < best[0]:
                best = (sig, k, B[:, 0])
            continue
        _, s, vh = np.linalg.svd(M)
        sig = float(s[d - 1]) if s.size >= d else 0.0
        if sig < best[0]:
            v = vh[d - 1].conj()
            best = (sig, k, B @ v)
    sig, k, xi = best
    if sig <= tol:
        return KernelSearch(k, xi / np.linalg.norm(xi), sig)
    return KernelSearch(None, None, sig)
