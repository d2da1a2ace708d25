"""Compiled hot kernels: componentwise regularizer values and dense grid scans.

Mirrors ``_kernels_py`` (same signatures, same semantics).  The flattened
regularizer description is

    kind 0: weighted l1,      R_i(x) = lam[i] * |x|
    kind 1: discrete Laplace scale mixture,
            R_i(x) = lse0 - logsumexp_k(loga[k] - lam[i]*|x|/atoms[k])
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, log

cnp.import_array()

IS_COMPILED = True


cdef inline double _rval(int kind, double lam_i, double x,
                         const double* atoms, const double* loga,
                         Py_ssize_t n_atoms, double lse0) noexcept nogil:
    cdef double t, m, s, acc
    cdef Py_ssize_t k
    if kind == 0:
        return lam_i * fabs(x)
    t = lam_i * fabs(x)
    m = loga[0] - t / atoms[0]
    for k in range(1, n_atoms):
        s = loga[k] - t / atoms[k]
        if s > m:
            m = s
    acc = 0.0
    for k in range(n_atoms):
        acc += exp(loga[k] - t / atoms[k] - m)
    return lse0 - (m + log(acc))


cdef inline double _row_total(int kind, const double* lam, const double* x,
                              Py_ssize_t n, const double* atoms, const double* loga,
                              Py_ssize_t n_atoms, double lse0) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        acc += _rval(kind, lam[i], x[i], atoms, loga, n_atoms, lse0)
    return acc


def component_values(X, int kind, lam, atoms, loga, double lse0):
    """Componentwise regularizer values for a batch X of shape (N, n)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Xc = np.ascontiguousarray(X, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lamc = np.ascontiguousarray(lam, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] atomsc = np.ascontiguousarray(atoms, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] logac = np.ascontiguousarray(loga, dtype=np.float64)
    cdef Py_ssize_t N = Xc.shape[0], n = Xc.shape[1], n_atoms = atomsc.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((N, n), dtype=np.float64)
    cdef Py_ssize_t r, i
    cdef const double* ap = &atomsc[0] if n_atoms > 0 else NULL
    cdef const double* lp = &logac[0] if n_atoms > 0 else NULL
    with nogil:
        for r in range(N):
            for i in range(n):
                out[r, i] = _rval(kind, lamc[i], Xc[r, i], ap, lp, n_atoms, lse0)
    return out


def scan_affine_min(c0, B, grids, int kind, lam, atoms, loga, double lse0):
    """Minimum of sum_i R_i((c0 + B t)_i) over the product grid of t (dim <= 3)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c0c = np.ascontiguousarray(c0, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Bc = np.ascontiguousarray(B, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lamc = np.ascontiguousarray(lam, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] atomsc = np.ascontiguousarray(atoms, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] logac = np.ascontiguousarray(loga, dtype=np.float64)
    cdef Py_ssize_t n = c0c.shape[0], d = Bc.shape[1], n_atoms = atomsc.shape[0]
    if d != len(grids):
        raise ValueError("one grid per kernel coordinate required")
    if d == 0:
        v0 = component_values(c0c[None, :], kind, lamc, atomsc, logac, lse0).sum()
        return float(v0), np.zeros(0)
    if d > 3:
        raise ValueError("affine scan supports at most 3 kernel dimensions")

    cdef cnp.ndarray[cnp.float64_t, ndim=1] g0 = np.ascontiguousarray(grids[0], dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] g1esc = np.zeros(1), g2esc = np.zeros(1)
    if d >= 2:
        g1esc = np.ascontiguousarray(grids[1], dtype=np.float64)
    if d >= 3:
        g2esc = np.ascontiguousarray(grids[2], dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x1 = np.empty(n), x2 = np.empty(n)
    cdef const double* ap = &atomsc[0] if n_atoms > 0 else NULL
    cdef const double* lp = &logac[0] if n_atoms > 0 else NULL

    cdef double best = np.inf
    cdef double bt0 = 0.0, bt1 = 0.0, bt2 = 0.0
    cdef double t0, t1, t2, val
    cdef Py_ssize_t i0, i1, i2, i
    cdef Py_ssize_t m0 = g0.shape[0]
    cdef Py_ssize_t m1 = g1esc.shape[0] if d >= 2 else 0
    cdef Py_ssize_t m2 = g2esc.shape[0] if d >= 3 else 0

    with nogil:
        for i0 in range(m0):
            t0 = g0[i0]
            for i in range(n):
                x1[i] = c0c[i] + t0 * Bc[i, 0]
            if d == 1:
                val = _row_total(kind, &lamc[0], &x1[0], n, ap, lp, n_atoms, lse0)
                if val < best:
                    best = val
                    bt0 = t0
            elif d == 2:
                for i1 in range(m1):
                    t1 = g1esc[i1]
                    for i in range(n):
                        x2[i] = x1[i] + t1 * Bc[i, 1]
                    val = _row_total(kind, &lamc[0], &x2[0], n, ap, lp, n_atoms, lse0)
                    if val < best:
                        best = val
                        bt0 = t0
                        bt1 = t1
            else:
                for i1 in range(m1):
                    t1 = g1esc[i1]
                    for i in range(n):
                        x2[i] = x1[i] + t1 * Bc[i, 1]
                    for i2 in range(m2):
                        t2 = g2esc[i2]
                        val = 0.0
                        for i in range(n):
                            val += _rval(kind, lamc[i], x2[i] + t2 * Bc[i, 2], ap, lp, n_atoms, lse0)
                        if val < best:
                            best = val
                            bt0 = t0
                            bt1 = t1
                            bt2 = t2
    return float(best), np.array([bt0, bt1, bt2])[:d]


def scan_nsp_max(B, tgrid, Py_ssize_t K, gammas, int kind, lam, atoms, loga, double lse0):
    """Maximize R(x_S) - gamma*R(x_tail) over the cube grid tgrid^d, x = B t."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Bc = np.ascontiguousarray(B, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tg = np.ascontiguousarray(tgrid, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gam = np.ascontiguousarray(gammas, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lamc = np.ascontiguousarray(lam, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] atomsc = np.ascontiguousarray(atoms, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] logac = np.ascontiguousarray(loga, dtype=np.float64)
    cdef Py_ssize_t n = Bc.shape[0], d = Bc.shape[1], n_atoms = atomsc.shape[0]
    cdef Py_ssize_t G = gam.shape[0], m = tg.shape[0]
    if d < 1 or d > 3:
        raise ValueError("cube scan supports 1 to 3 kernel dimensions")

    cdef cnp.ndarray[cnp.float64_t, ndim=1] best = np.full(G, -np.inf)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] best_t = np.zeros((G, d))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x1 = np.empty(n), x2 = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vals = np.empty(n)
    cdef const double* ap = &atomsc[0] if n_atoms > 0 else NULL
    cdef const double* lp = &logac[0] if n_atoms > 0 else NULL

    cdef double t0, t1, t2, total, top, vmax, v
    cdef Py_ssize_t i0, i1, i2, i, g, k, jmax
    cdef Py_ssize_t m1 = m if d >= 2 else 1
    cdef Py_ssize_t m2 = m if d >= 3 else 1

    with nogil:
        for i0 in range(m):
            t0 = tg[i0]
            for i in range(n):
                x1[i] = t0 * Bc[i, 0]
            for i1 in range(m1):
                if d >= 2:
                    t1 = tg[i1]
                    for i in range(n):
                        x2[i] = x1[i] + t1 * Bc[i, 1]
                else:
                    t1 = 0.0
                    for i in range(n):
                        x2[i] = x1[i]
                for i2 in range(m2):
                    t2 = tg[i2] if d >= 3 else 0.0
                    total = 0.0
                    for i in range(n):
                        if d >= 3:
                            vals[i] = _rval(kind, lamc[i], x2[i] + t2 * Bc[i, 2], ap, lp, n_atoms, lse0)
                        else:
                            vals[i] = _rval(kind, lamc[i], x2[i], ap, lp, n_atoms, lse0)
                        total += vals[i]
                    # sum of the K largest values via repeated max extraction
                    top = 0.0
                    for k in range(K if K < n else n):
                        vmax = -1.0
                        jmax = -1
                        for i in range(n):
                            if vals[i] > vmax:
                                vmax = vals[i]
                                jmax = i
                        top += vmax
                        vals[jmax] = -1.0
                    for g in range(G):
                        v = top - gam[g] * (total - top)
                        if v > best[g]:
                            best[g] = v
                            best_t[g, 0] = t0
                            if d >= 2:
                                best_t[g, 1] = t1
                            if d >= 3:
                                best_t[g, 2] = t2
    return best, best_t


def scan_sigma_budget(gtabs, ctabs, double eps):
    """Minimize sum_j g_j[i_j] subject to sum_j c_j[i_j] <= eps.

    Tables must be nonnegative.  Returns (min_value, argmin index tuple),
    or (inf, None) when no assignment is feasible.
    """
    cdef Py_ssize_t d = len(gtabs)
    if d == 0:
        return (0.0, ()) if eps >= 0.0 else (np.inf, None)
    if d > 6:
        raise ValueError("budget scan supports at most 6 axes")

    gcat = np.concatenate([np.ascontiguousarray(g, dtype=np.float64) for g in gtabs])
    ccat = np.concatenate([np.ascontiguousarray(c, dtype=np.float64) for c in ctabs])
    lens_list = [len(g) for g in gtabs]
    offs_list = np.concatenate([[0], np.cumsum(lens_list)])
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gc = gcat
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cc = ccat
    cdef cnp.ndarray[cnp.int64_t, ndim=1] lens = np.asarray(lens_list, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] offs = np.asarray(offs_list, dtype=np.int64)

    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.zeros(d, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] best_idx = np.full(d, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] psg = np.zeros(d + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] psc = np.zeros(d + 1)

    cdef double best = np.inf
    cdef Py_ssize_t j, lev
    cdef bint done = False

    with nogil:
        for j in range(d):
            psg[j + 1] = psg[j] + gc[offs[j] + idx[j]]
            psc[j + 1] = psc[j] + cc[offs[j] + idx[j]]
        while not done:
            if psc[d] <= eps and psg[d] < best:
                best = psg[d]
                for j in range(d):
                    best_idx[j] = idx[j]
            # odometer increment from the innermost axis
            lev = d - 1
            while lev >= 0:
                idx[lev] += 1
                if idx[lev] < lens[lev]:
                    for j in range(lev, d):
                        psg[j + 1] = psg[j] + gc[offs[j] + idx[j]]
                        psc[j + 1] = psc[j] + cc[offs[j] + idx[j]]
                    break
                idx[lev] = 0
                lev -= 1
            if lev < 0:
                done = True

    if best_idx[0] < 0:
        return np.inf, None
    return float(best), tuple(best_idx.tolist())
