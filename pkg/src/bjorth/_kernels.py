"""Hot numeric kernels with a numba path and a pure-numpy path.

The numba versions are used when numba imports cleanly, unless the
environment variable ``BJO_DISABLE_NUMBA`` is set to a non-empty value
other than ``0``.  Both paths compute the same quantities; the numpy path
batches work into stacked LAPACK calls instead of compiled loops.

Module elements are passed to the norm kernels as zero-padded stacks of
shape ``(K, M, N)``: padding with zero rows and columns leaves every
singular value unchanged, so the C*-norm of ``x + lam*y`` is unaffected.
"""
from __future__ import annotations

import math
import os

import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

_flag = os.environ.get("BJO_DISABLE_NUMBA", "").strip()
_disabled = _flag not in ("", "0")

try:
    if _disabled:
        raise ImportError("disabled by BJO_DISABLE_NUMBA")
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

BACKEND = "numba" if NUMBA_AVAILABLE else "numpy"


def pack(blocks) -> np.ndarray:
    """Stack ragged ``m_k x n_k`` blocks into a zero-padded ``(K, M, N)`` array."""
    m = max(b.shape[0] for b in blocks)
    n = max(b.shape[1] for b in blocks)
    out = np.zeros((len(blocks), m, n), complex)
    for k, b in enumerate(blocks):
        out[k, : b.shape[0], : b.shape[1]] = b
    return out


# ---------------------------------------------------------------------------
# numpy path


def _np_hermitian_parts(C, thetas):
    ph = np.exp(-1j * np.asarray(thetas, float))[:, None, None]
    A = ph * C[None]
    return 0.5 * (A + np.conj(np.swapaxes(A, 1, 2)))


def np_support_values(C, thetas):
    C = np.asarray(C, complex)
    if C.shape[0] == 1:
        return np.real(np.exp(-1j * np.asarray(thetas, float)) * C[0, 0])
    return np.linalg.eigvalsh(_np_hermitian_parts(C, thetas))[:, -1]


def np_support_points(C, thetas):
    """Top eigenpairs of ``Re(e^{-i theta} C)``: returns ``(h, vectors)``."""
    C = np.asarray(C, complex)
    w, v = np.linalg.eigh(_np_hermitian_parts(C, thetas))
    return w[:, -1].copy(), v[:, :, -1].copy()


def _np_norms(xs, ys, lams):
    lams = np.asarray(lams, complex)
    M = xs[None] + lams[:, None, None, None] * ys[None]
    if M.shape[3] == 1:
        top = np.sum(np.abs(M[..., 0]) ** 2, axis=2)
    else:
        G = np.conj(np.swapaxes(M, 2, 3)) @ M
        top = np.linalg.eigvalsh(G)[..., -1]
    return np.sqrt(np.maximum(top.max(axis=1), 0.0))


def np_norm_at(xs, ys, lr, li):
    return float(_np_norms(xs, ys, [complex(lr, li)])[0])


def _np_zoom_1d(fbatch, lo, hi, tol, points=17):
    # Convex f: the minimizer lies within one spacing of the best grid point.
    best_t, best_f = lo, np.inf
    while True:
        ts = np.linspace(lo, hi, points)
        fs = fbatch(ts)
        i = int(np.argmin(fs))
        if fs[i] < best_f:
            best_t, best_f = float(ts[i]), float(fs[i])
        step = (hi - lo) / (points - 1)
        if hi - lo <= tol:
            return best_t, best_f
        lo, hi = max(lo, ts[i] - step), min(hi, ts[i] + step)


def _np_leftmost(f1, t_hi, fmin, slack, iters=80, lo=0.0):
    # Smallest t in [0, t_hi] with f(t) <= fmin + slack (f decreasing there).
    if f1(0.0) <= fmin + slack:
        return 0.0
    hi = t_hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f1(mid) <= fmin + slack:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-15:
            break
    return hi


def np_line_min(xs, ys, dr, di, tmax, tol):
    d = complex(dr, di)

    def fb(ts):
        return _np_norms(xs, ys, d * np.asarray(ts))

    t, fmin = _np_zoom_1d(fb, 0.0, tmax, tol)
    lo = 0.0
    near = t - 4.0 * tol
    if near > 0.0 and float(fb([near])[0]) > fmin + 1e-13:
        lo = near
    t = _np_leftmost(lambda s: float(fb([s])[0]), t, fmin, 1e-13, lo=lo)
    return t, float(fb([t])[0])


def np_plane_min(xs, ys, R, tol, points=17):
    def inner(a_values):
        # minimize over b for every a simultaneously
        a_values = np.asarray(a_values, float)
        lo = np.full(a_values.shape, -R)
        hi = np.full(a_values.shape, R)
        best_b = np.zeros(a_values.shape)
        best_f = np.full(a_values.shape, np.inf)
        grid = np.linspace(0.0, 1.0, points)
        while True:
            bs = lo[:, None] + (hi - lo)[:, None] * grid[None]
            lam = a_values[:, None] + 1j * bs
            fs = _np_norms(xs, ys, lam.ravel()).reshape(lam.shape)
            i = np.argmin(fs, axis=1)
            rows = np.arange(len(a_values))
            fi = fs[rows, i]
            upd = fi < best_f
            best_f = np.where(upd, fi, best_f)
            best_b = np.where(upd, bs[rows, i], best_b)
            step = (hi - lo) / (points - 1)
            if np.all(hi - lo <= tol):
                return best_b, best_f
            lo = np.maximum(lo, bs[rows, i] - step)
            hi = np.minimum(hi, bs[rows, i] + step)

    cache = {}

    def g(avals):
        b, f = inner(avals)
        for a, bb, ff in zip(avals, b, f):
            cache[float(a)] = (float(bb), float(ff))
        return f

    a, fmin = _np_zoom_1d(g, -R, R, tol, points)
    b = cache[a][0]
    f0 = np_norm_at(xs, ys, 0.0, 0.0)
    if f0 <= fmin:
        return 0.0, 0.0, f0
    return a, b, fmin


def np_nr_values(C, Z):
    """``<C z, z>`` for every row ``z`` of ``Z``."""
    return np.einsum("ti,ij,tj->t", np.conj(Z), C, Z)


# ---------------------------------------------------------------------------
# numba path

if NUMBA_AVAILABLE:

    @njit(cache=True)
    def _top_herm(H):
        n = H.shape[0]
        if n == 1:
            return H[0, 0].real
        if n == 2:
            a = H[0, 0].real
            d = H[1, 1].real
            b = H[0, 1]
            half = 0.5 * (a - d)
            return 0.5 * (a + d) + math.sqrt(half * half + b.real * b.real + b.imag * b.imag)
        return _jacobi_top(H.copy())

    @njit(cache=True)
    def _jacobi_top(H):
        # Cyclic complex Jacobi; overwrites H.  Accurate at clustered tops,
        # which is where norm minimizers sit.
        n = H.shape[0]
        for _ in range(60):
            off = 0.0
            scale = 0.0
            for p in range(n):
                scale += H[p, p].real * H[p, p].real
                for q in range(p + 1, n):
                    off += H[p, q].real * H[p, q].real + H[p, q].imag * H[p, q].imag
            if off <= 1e-32 * scale or off == 0.0:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    h = H[p, q]
                    g = abs(h)
                    if g == 0.0:
                        continue
                    u = h / g
                    a = H[p, p].real
                    d = H[q, q].real
                    tau = (d - a) / (2.0 * g)
                    if tau >= 0.0:
                        t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    s = t * c
                    ub = u.conjugate()
                    for r in range(n):
                        if r == p or r == q:
                            continue
                        hrp = H[r, p]
                        hrq = H[r, q]
                        nrp = c * hrp - s * ub * hrq
                        nrq = s * hrp + c * ub * hrq
                        H[r, p] = nrp
                        H[p, r] = nrp.conjugate()
                        H[r, q] = nrq
                        H[q, r] = nrq.conjugate()
                    H[p, p] = a - t * g
                    H[q, q] = d + t * g
                    H[p, q] = 0.0
                    H[q, p] = 0.0
        top = H[0, 0].real
        for p in range(1, n):
            if H[p, p].real > top:
                top = H[p, p].real
        return top

    @njit(cache=True)
    def nb_top_eigenvalue(H):
        return _top_herm(H)

    @njit(cache=True)
    def nb_support_values(C, thetas):
        d = C.shape[0]
        out = np.empty(thetas.shape[0])
        H = np.empty((d, d), np.complex128)
        for t in range(thetas.shape[0]):
            ph = complex(math.cos(thetas[t]), -math.sin(thetas[t]))
            for i in range(d):
                for j in range(d):
                    H[i, j] = 0.5 * (ph * C[i, j] + (ph * C[j, i]).conjugate())
            out[t] = _top_herm(H)
        return out

    @njit(cache=True)
    def _jacobi_top_vector(H, v):
        # Same sweeps as _jacobi_top, accumulating the rotations; writes the
        # top eigenvector into v and returns the top eigenvalue.
        n = H.shape[0]
        V = np.zeros((n, n), np.complex128)
        for i in range(n):
            V[i, i] = 1.0
        for _ in range(60):
            off = 0.0
            scale = 0.0
            for p in range(n):
                scale += H[p, p].real * H[p, p].real
                for q in range(p + 1, n):
                    off += H[p, q].real * H[p, q].real + H[p, q].imag * H[p, q].imag
            if off <= 1e-32 * scale or off == 0.0:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    h = H[p, q]
                    g = abs(h)
                    if g == 0.0:
                        continue
                    u = h / g
                    a = H[p, p].real
                    d = H[q, q].real
                    tau = (d - a) / (2.0 * g)
                    if tau >= 0.0:
                        t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    s = t * c
                    ub = u.conjugate()
                    for r in range(n):
                        vrp = V[r, p]
                        vrq = V[r, q]
                        V[r, p] = c * vrp - s * ub * vrq
                        V[r, q] = s * vrp + c * ub * vrq
                        if r == p or r == q:
                            continue
                        hrp = H[r, p]
                        hrq = H[r, q]
                        nrp = c * hrp - s * ub * hrq
                        nrq = s * hrp + c * ub * hrq
                        H[r, p] = nrp
                        H[p, r] = nrp.conjugate()
                        H[r, q] = nrq
                        H[q, r] = nrq.conjugate()
                    H[p, p] = a - t * g
                    H[q, q] = d + t * g
                    H[p, q] = 0.0
                    H[q, p] = 0.0
        best = 0
        for p in range(1, n):
            if H[p, p].real > H[best, best].real:
                best = p
        for i in range(n):
            v[i] = V[i, best]
        return H[best, best].real

    @njit(cache=True)
    def nb_support_points(C, thetas):
        d = C.shape[0]
        T = thetas.shape[0]
        h = np.empty(T)
        V = np.empty((T, d), np.complex128)
        H = np.empty((d, d), np.complex128)
        v = np.empty(d, np.complex128)
        for t in range(T):
            ph = complex(math.cos(thetas[t]), -math.sin(thetas[t]))
            for i in range(d):
                for j in range(d):
                    H[i, j] = 0.5 * (ph * C[i, j] + (ph * C[j, i]).conjugate())
            if d == 1:
                h[t] = H[0, 0].real
                V[t, 0] = 1.0
                continue
            h[t] = _jacobi_top_vector(H, v)
            for i in range(d):
                V[t, i] = v[i]
        return h, V

    @njit(cache=True)
    def _nb_norm(xs, ys, lr, li):
        K, M, N = xs.shape
        lam = complex(lr, li)
        G = np.empty((N, N), np.complex128)
        A = np.empty((M, N), np.complex128)
        best = 0.0
        for k in range(K):
            for i in range(M):
                for j in range(N):
                    A[i, j] = xs[k, i, j] + lam * ys[k, i, j]
            for p in range(N):
                for q in range(p, N):
                    s = 0j
                    for i in range(M):
                        s += A[i, p].conjugate() * A[i, q]
                    G[p, q] = s
                    G[q, p] = s.conjugate()
            top = _top_herm(G)
            if top > best:
                best = top
        return math.sqrt(best)

    @njit(cache=True)
    def _nb_golden(xs, ys, fixed, along_real, lo, hi, tol):
        # 1-D golden section over one real coordinate of lambda.
        a, b = lo, hi
        c = b - GOLDEN * (b - a)
        d = a + GOLDEN * (b - a)
        if along_real:
            fc = _nb_norm(xs, ys, c, fixed)
            fd = _nb_norm(xs, ys, d, fixed)
        else:
            fc = _nb_norm(xs, ys, fixed, c)
            fd = _nb_norm(xs, ys, fixed, d)
        while b - a > tol:
            if fc <= fd:
                b, d, fd = d, c, fc
                c = b - GOLDEN * (b - a)
                fc = _nb_norm(xs, ys, c, fixed) if along_real else _nb_norm(xs, ys, fixed, c)
            else:
                a, c, fc = c, d, fd
                d = a + GOLDEN * (b - a)
                fd = _nb_norm(xs, ys, d, fixed) if along_real else _nb_norm(xs, ys, fixed, d)
        if fc <= fd:
            return c, fc
        return d, fd

    @njit(cache=True)
    def nb_norm_at(xs, ys, lr, li):
        return _nb_norm(xs, ys, lr, li)

    @njit(cache=True)
    def _nb_line_f(xs, ys, dr, di, t):
        return _nb_norm(xs, ys, t * dr, t * di)

    @njit(cache=True)
    def nb_line_min(xs, ys, dr, di, tmax, tol):
        a, b = 0.0, tmax
        c = b - GOLDEN * (b - a)
        d = a + GOLDEN * (b - a)
        fc = _nb_line_f(xs, ys, dr, di, c)
        fd = _nb_line_f(xs, ys, dr, di, d)
        while b - a > tol:
            if fc <= fd:
                b, d, fd = d, c, fc
                c = b - GOLDEN * (b - a)
                fc = _nb_line_f(xs, ys, dr, di, c)
            else:
                a, c, fc = c, d, fd
                d = a + GOLDEN * (b - a)
                fd = _nb_line_f(xs, ys, dr, di, d)
        t = c if fc <= fd else d
        fmin = min(fc, fd)
        # leftmost point of a flat bottom
        slack = 1e-13
        if _nb_line_f(xs, ys, dr, di, 0.0) <= fmin + slack:
            return 0.0, _nb_line_f(xs, ys, dr, di, 0.0)
        lo, hi = 0.0, t
        # a strict minimum brackets the leftmost point within a few tolerances
        near = t - 4.0 * tol
        if near > 0.0 and _nb_line_f(xs, ys, dr, di, near) > fmin + slack:
            lo = near
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if _nb_line_f(xs, ys, dr, di, mid) <= fmin + slack:
                hi = mid
            else:
                lo = mid
            if hi - lo < 1e-15:
                break
        return hi, _nb_line_f(xs, ys, dr, di, hi)

    @njit(cache=True)
    def nb_plane_min(xs, ys, R, tol):
        # Nested golden section: g(a) = min_b f(a + ib) is convex in a.
        a0, a1 = -R, R
        c = a1 - GOLDEN * (a1 - a0)
        d = a0 + GOLDEN * (a1 - a0)
        bc, fc = _nb_golden(xs, ys, c, False, -R, R, tol)
        bd, fd = _nb_golden(xs, ys, d, False, -R, R, tol)
        while a1 - a0 > tol:
            if fc <= fd:
                a1, d, fd, bd = d, c, fc, bc
                c = a1 - GOLDEN * (a1 - a0)
                bc, fc = _nb_golden(xs, ys, c, False, -R, R, tol)
            else:
                a0, c, fc, bc = c, d, fd, bd
                d = a0 + GOLDEN * (a1 - a0)
                bd, fd = _nb_golden(xs, ys, d, False, -R, R, tol)
        if fc <= fd:
            a, b, f = c, bc, fc
        else:
            a, b, f = d, bd, fd
        f0 = _nb_norm(xs, ys, 0.0, 0.0)
        if f0 <= f:
            return 0.0, 0.0, f0
        return a, b, f

    @njit(cache=True)
    def nb_nr_values(C, Z):
        T, d = Z.shape
        out = np.empty(T, np.complex128)
        for t in range(T):
            s = 0j
            for i in range(d):
                acc = 0j
                for j in range(d):
                    acc += C[i, j] * Z[t, j]
                s += Z[t, i].conjugate() * acc
            out[t] = s
        return out


# ---------------------------------------------------------------------------
# dispatch

if NUMBA_AVAILABLE:
    support_values = nb_support_values
    support_points = nb_support_points
    norm_at = nb_norm_at
    line_min = nb_line_min
    plane_min = nb_plane_min
    nr_values = nb_nr_values
else:
    support_values = np_support_values
    support_points = np_support_points
    norm_at = np_norm_at
    line_min = np_line_min
    plane_min = np_plane_min
    nr_values = np_nr_values


def backends():
    """Map backend name to its kernel table (numba only when importable)."""
    table = {
        "numpy": dict(
            support_values=np_support_values,
            support_points=np_support_points,
            norm_at=np_norm_at,
            line_min=np_line_min,
            plane_min=np_plane_min,
            nr_values=np_nr_values,
        )
    }
    if NUMBA_AVAILABLE:
        table["numba"] = dict(
            support_values=nb_support_values,
            support_points=nb_support_points,
            norm_at=nb_norm_at,
            line_min=nb_line_min,
            plane_min=nb_plane_min,
            nr_values=nb_nr_values,
        )
    return table
