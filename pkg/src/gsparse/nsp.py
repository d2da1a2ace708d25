"""Weak null space property estimation and falsification.

The pair (B, R) with B = {c : Ac = y} satisfies the (K, gamma, delta)-weak
null space property when every kernel vector x of A and every support S with
|S| <= K obey R(x_S) <= gamma * R(x off S) + delta.  Because R is
componentwise, only the top-K support of the componentwise values has to be
tested per vector.

The checker is a falsifier: a False verdict comes with a witness whose
violation is re-verified with fresh arithmetic, while a True verdict is only
sampling evidence.  A dense deterministic grid over kernel coordinates can be
enabled to raise confidence at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import OutOfRange
from .linalg import as_matrix, kernel_basis
from .sparsity import top_k_indices

#: Default radius grid: logarithmic, 10^-2 .. 10^2.
DEFAULT_RADII = tuple(float(r) for r in np.logspace(-2, 2, 9))


@dataclass(frozen=True)
class NspQuery:
    K: int
    gamma: float
    delta: float

    def __post_init__(self):
        if self.gamma <= 0 or self.delta < 0:
            raise OutOfRange("gamma must be > 0 and delta >= 0")


@dataclass(frozen=True)
class NspSampling:
    """Sampling plan: random kernel directions scaled by every radius.

    ``grid_points`` > 0 additionally scans a deterministic cube grid with
    that many points per kernel dimension at every radius (kernel dimension
    at most 3).
    """

    count: int = 10_000
    radii: tuple = DEFAULT_RADII
    seed: int = 0
    grid_points: int = 0
    chunk: int = 65_536
    violation_tol_rel: float = 1e-12

    def __post_init__(self):
        if self.count < 0:
            raise OutOfRange("count must be >= 0")
        if any(r <= 0 for r in self.radii):
            raise OutOfRange("radii must be positive")
        if self.violation_tol_rel < 0:
            raise OutOfRange("violation_tol_rel must be >= 0")


@dataclass(frozen=True)
class NspReport:
    holds_on_samples: bool
    worst_deficit: float
    witness: np.ndarray | None
    samples_used: int
    radii: tuple
    seed: int
    delta_frontier: tuple | None = None


def worst_support(reg, x, K: int) -> tuple:
    """The support maximizing R(x_S) over |S| <= K: the top-K components."""
    x = np.asarray(x, dtype=float)
    return top_k_indices(reg.component_values(x), K)


def split_sums(reg, x, K: int) -> tuple:
    """(R(x_S), R(x off S)) at the worst support, evaluated on masked vectors."""
    x = np.asarray(x, dtype=float)
    support = worst_support(reg, x, K)
    mask = np.zeros(x.size, dtype=bool)
    mask[list(support)] = True
    return reg.eval(np.where(mask, x, 0.0)), reg.eval(np.where(mask, 0.0, x))


def _batch_top_tail(reg, X, K: int) -> tuple:
    """Per-row (top-K sum, tail sum) of componentwise values."""
    vals = reg.batch_component_values(X)
    totals = vals.sum(axis=1)
    n = vals.shape[1]
    if K == 0:
        tops = np.zeros_like(totals)
    elif K >= n:
        tops = totals.copy()
    else:
        tops = np.partition(vals, n - K, axis=1)[:, n - K:].sum(axis=1)
    return tops, totals - tops


def _iter_sample_batches(basis: np.ndarray, sampling: NspSampling):
    """Yield (n_rows, X) batches of kernel vectors, deterministic in the seed."""
    d = basis.shape[1]
    rng = np.random.default_rng(sampling.seed)
    radii = np.asarray(sampling.radii, dtype=float)
    remaining = sampling.count
    while remaining > 0:
        take = min(remaining, max(1, sampling.chunk // max(1, len(radii))))
        dirs = rng.standard_normal((take, d))
        norms = np.linalg.norm(dirs, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        dirs /= norms
        T = (radii[:, np.newaxis, np.newaxis] * dirs[np.newaxis, :, :]).reshape(-1, d)
        yield T @ basis.T
        remaining -= take


def _scan(A, reg, K: int, gammas: np.ndarray, sampling: NspSampling):
    """Max of R(x_S) - gamma * R(x_tail) per gamma over samples (and grid).

    Returns (per-gamma max, per-gamma witness x, samples_used).
    """
    A = as_matrix(A, "A")
    basis = kernel_basis(A)
    d = basis.shape[1]
    G = gammas.size
    best = np.full(G, -np.inf)
    witnesses = [None] * G
    used = 0

    if d == 0:
        # kernel is {0}: R(0_S) - gamma R(0) = 0 for every support
        return np.zeros(G), [np.zeros(A.shape[1])] * G, 0

    for X in _iter_sample_batches(basis, sampling):
        tops, tails = _batch_top_tail(reg, X, K)
        used += X.shape[0]
        for g in range(G):
            v = tops - gammas[g] * tails
            j = int(np.argmax(v))
            if v[j] > best[g]:
                best[g] = float(v[j])
                witnesses[g] = X[j].copy()

    if sampling.grid_points > 0:
        spec = reg.kernel_spec()
        for r in sampling.radii:
            tgrid = np.linspace(-r, r, sampling.grid_points)
            if spec is not None and 1 <= d <= 3:
                vals, ts = backend.scan_nsp_max(basis, tgrid, K, gammas, *spec)
                used += len(tgrid) ** d
                for g in range(G):
                    if vals[g] > best[g]:
                        best[g] = float(vals[g])
                        witnesses[g] = basis @ ts[g]
            else:
                mesh = np.stack(np.meshgrid(*([tgrid] * d), indexing="ij"), axis=-1).reshape(-1, d)
                X = mesh @ basis.T
                tops, tails = _batch_top_tail(reg, X, K)
                used += X.shape[0]
                for g in range(G):
                    v = tops - gammas[g] * tails
                    j = int(np.argmax(v))
                    if v[j] > best[g]:
                        best[g] = float(v[j])
                        witnesses[g] = X[j].copy()

    return best, witnesses, used


def check_nsp(A, reg, query: NspQuery, sampling: NspSampling | None = None) -> NspReport:
    """Falsify the (K, gamma, delta)-weak null space property by sampling.

    The reported deficit is re-evaluated on the best sample with fresh
    arithmetic (masked-vector evaluation), so a False verdict is a certified
    violation; True only says no sampled vector violated the inequality.
    The kernel basis is itself numerical, so deficits within a relative
    rounding tolerance of zero certify nothing and are reported as exactly
    zero (equality at working precision).
    """
    sampling = sampling if sampling is not None else NspSampling()
    gammas = np.array([query.gamma])
    best, witnesses, used = _scan(A, reg, query.K, gammas, sampling)

    if witnesses[0] is None or not np.any(np.asarray(witnesses[0]) != 0.0):
        # trivial kernel or no samples: the inequality holds with margin delta
        return NspReport(
            holds_on_samples=True,
            worst_deficit=-query.delta,
            witness=None,
            samples_used=used,
            radii=tuple(sampling.radii),
            seed=sampling.seed,
        )

    x = np.asarray(witnesses[0], dtype=float)
    top, tail = split_sums(reg, x, query.K)
    deficit = top - query.gamma * tail - query.delta
    tol = sampling.violation_tol_rel * max(1.0, top + query.gamma * tail + query.delta)
    holds = deficit <= tol
    if holds and deficit > 0.0:
        deficit = 0.0
    return NspReport(
        holds_on_samples=bool(holds),
        worst_deficit=float(deficit),
        witness=None if holds else x,
        samples_used=used,
        radii=tuple(sampling.radii),
        seed=sampling.seed,
    )


def estimate_frontier(A, reg, K: int, gammas, sampling: NspSampling | None = None) -> NspReport:
    """Smallest delta making the sampled inequality hold, per gamma.

    delta_frontier[g] = max over sampled x of R(x_S) - gamma_g * R(x_tail),
    clamped below at zero; nonincreasing in gamma.  The check-mode fields
    (deficit, witness) are not meaningful here and are reported as trivially
    holding.
    """
    sampling = sampling if sampling is not None else NspSampling()
    gammas = np.asarray(gammas, dtype=float)
    best, _, used = _scan(A, reg, K, gammas, sampling)
    frontier = tuple((float(g), float(max(0.0, b))) for g, b in zip(gammas, best))
    return NspReport(
        holds_on_samples=True,
        worst_deficit=0.0,
        witness=None,
        samples_used=used,
        radii=tuple(sampling.radii),
        seed=sampling.seed,
        delta_frontier=frontier,
    )
