"""Pure-NumPy implementations of the hot kernels.

These mirror the compiled ``_kernels`` extension exactly; the backend module
picks whichever is available.  Every function takes a flattened regularizer
description instead of a regularizer object:

    kind 0: weighted l1,      R_i(x) = lam[i] * |x|
    kind 1: discrete Laplace scale mixture,
            R_i(x) = lse0 - logsumexp_k(loga[k] - lam[i]*|x|/atoms[k])

with ``loga[k] = log(pi_k) - log(z_k)`` and ``lse0 = logsumexp(loga)``.

Grid scans chunk over the leading axis so peak memory stays at one
two-dimensional slab regardless of total grid size.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.special import logsumexp

IS_COMPILED = False


def component_values(X, kind, lam, atoms, loga, lse0):
    """Componentwise regularizer values for a batch X of shape (N, n)."""
    X = np.asarray(X, dtype=float)
    lam = np.asarray(lam, dtype=float)
    scaled = np.abs(X) * lam
    if kind == 0:
        return scaled
    exponents = loga[np.newaxis, np.newaxis, :] - scaled[:, :, np.newaxis] / atoms[np.newaxis, np.newaxis, :]
    return lse0 - logsumexp(exponents, axis=-1)


def _row_values(X, kind, lam, atoms, loga, lse0):
    return component_values(X, kind, lam, atoms, loga, lse0)


def scan_affine_min(c0, B, grids, kind, lam, atoms, loga, lse0):
    """Minimum of sum_i R_i((c0 + B t)_i) over the product grid of t.

    Returns (min_value, argmin_t).  Grid dimension = B.shape[1] (at most 3).
    """
    c0 = np.asarray(c0, dtype=float)
    B = np.asarray(B, dtype=float)
    grids = [np.asarray(g, dtype=float) for g in grids]
    d = B.shape[1]
    if d != len(grids):
        raise ValueError("one grid per kernel coordinate required")
    if d == 0:
        val = float(_row_values(c0[np.newaxis, :], kind, lam, atoms, loga, lse0).sum())
        return val, np.zeros(0)

    best = np.inf
    best_t = None
    if d == 1:
        X = c0[np.newaxis, :] + grids[0][:, np.newaxis] * B[:, 0][np.newaxis, :]
        totals = _row_values(X, kind, lam, atoms, loga, lse0).sum(axis=1)
        j = int(np.argmin(totals))
        return float(totals[j]), np.array([grids[0][j]])

    for i0, t0 in enumerate(grids[0]):
        base = c0 + t0 * B[:, 0]
        if d == 2:
            X = base[np.newaxis, :] + grids[1][:, np.newaxis] * B[:, 1][np.newaxis, :]
            totals = _row_values(X, kind, lam, atoms, loga, lse0).sum(axis=1)
            j = int(np.argmin(totals))
            if totals[j] < best:
                best = float(totals[j])
                best_t = np.array([t0, grids[1][j]])
        else:
            for i1, t1 in enumerate(grids[1]):
                X = (base + t1 * B[:, 1])[np.newaxis, :] + grids[2][:, np.newaxis] * B[:, 2][np.newaxis, :]
                totals = _row_values(X, kind, lam, atoms, loga, lse0).sum(axis=1)
                j = int(np.argmin(totals))
                if totals[j] < best:
                    best = float(totals[j])
                    best_t = np.array([t0, t1, grids[2][j]])
    return best, best_t


def _topk_and_total(vals, K):
    """Per-row (sum of K largest, total) for a values matrix."""
    totals = vals.sum(axis=1)
    if K == 0:
        return np.zeros_like(totals), totals
    n = vals.shape[1]
    if K >= n:
        return totals, totals
    top = np.partition(vals, n - K, axis=1)[:, n - K:].sum(axis=1)
    return top, totals


def scan_nsp_max(B, tgrid, K, gammas, kind, lam, atoms, loga, lse0):
    """Maximize R(x_S) - gamma * R(x_tail) over a cube grid in kernel coordinates.

    x = B t with t ranging over tgrid^d; S is the top-K support of the
    componentwise values.  Returns (per-gamma maxima, per-gamma argmax t).
    """
    B = np.asarray(B, dtype=float)
    tgrid = np.asarray(tgrid, dtype=float)
    gammas = np.asarray(gammas, dtype=float)
    d = B.shape[1]
    G = gammas.shape[0]
    best = np.full(G, -np.inf)
    best_t = np.zeros((G, d))

    def update(X, prefix, axis_vals):
        nonlocal best, best_t
        vals = _row_values(X, kind, lam, atoms, loga, lse0)
        S, total = _topk_and_total(vals, K)
        tail = total - S
        for g in range(G):
            v = S - gammas[g] * tail
            j = int(np.argmax(v))
            if v[j] > best[g]:
                best[g] = float(v[j])
                best_t[g] = np.array(prefix + [axis_vals[j]])

    if d == 1:
        X = tgrid[:, np.newaxis] * B[:, 0][np.newaxis, :]
        update(X, [], tgrid)
    elif d == 2:
        for t0 in tgrid:
            X = (t0 * B[:, 0])[np.newaxis, :] + tgrid[:, np.newaxis] * B[:, 1][np.newaxis, :]
            update(X, [t0], tgrid)
    elif d == 3:
        for t0 in tgrid:
            base = t0 * B[:, 0]
            for t1 in tgrid:
                X = (base + t1 * B[:, 1])[np.newaxis, :] + tgrid[:, np.newaxis] * B[:, 2][np.newaxis, :]
                update(X, [t0, t1], tgrid)
    else:
        raise ValueError("cube scan supports at most 3 kernel dimensions")
    return best, best_t


def scan_sigma_budget(gtabs, ctabs, eps):
    """Minimize sum_j g_j[i_j] subject to sum_j c_j[i_j] <= eps.

    gtabs/ctabs are per-axis value tables (equal lengths within an axis).
    Returns (min_value, argmin index tuple); (inf, None) when infeasible.
    """
    gtabs = [np.asarray(g, dtype=float) for g in gtabs]
    ctabs = [np.asarray(c, dtype=float) for c in ctabs]
    d = len(gtabs)
    eps = float(eps)
    if d == 0:
        return (0.0, ()) if eps >= 0.0 else (np.inf, None)
    if d == 1:
        feasible = ctabs[0] <= eps
        if not feasible.any():
            return np.inf, None
        masked = np.where(feasible, gtabs[0], np.inf)
        j = int(np.argmin(masked))
        return float(masked[j]), (j,)

    g_last2 = gtabs[-2][:, np.newaxis] + gtabs[-1][np.newaxis, :]
    c_last2 = ctabs[-2][:, np.newaxis] + ctabs[-1][np.newaxis, :]
    best = np.inf
    best_idx = None
    prefix_axes = [range(len(g)) for g in gtabs[: d - 2]]
    for prefix in itertools.product(*prefix_axes):
        g_pre = sum(gtabs[j][i] for j, i in enumerate(prefix))
        c_pre = sum(ctabs[j][i] for j, i in enumerate(prefix))
        if g_pre >= best:
            continue
        feasible = c_pre + c_last2 <= eps
        if not feasible.any():
            continue
        masked = np.where(feasible, g_pre + g_last2, np.inf)
        flat = int(np.argmin(masked))
        val = float(masked.flat[flat])
        if val < best:
            best = val
            i_a, i_b = np.unravel_index(flat, masked.shape)
            best_idx = tuple(prefix) + (int(i_a), int(i_b))
    return best, best_idx
