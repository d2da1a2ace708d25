"""Generalized sparsity: tail values, membership, and approximation degree.

A vector x is (K, R, eps)-sparse when some support S with |S| <= K leaves
R(x off S) <= eps.  Because R is componentwise, the best S is always the set
of K largest componentwise values, so the tail value is the sum of the n - K
smallest R_i(x_i).  The approximation degree

    sigma(x) = inf { R(x - x') : x' is (K, R, eps)-sparse }

is bracketed analytically and, for small n, bounded from above by an
exhaustive grid oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import OutOfRange, TooLarge


@dataclass(frozen=True)
class SparsityReport:
    K: int
    epsilon: float
    tail_value: float
    selected_support: tuple
    is_member: bool
    sigma_bracket: tuple


def rearranged_value(values, K: int) -> float:
    """The (K+1)-th largest entry of ``values`` (nonincreasing rearrangement)."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if K + 1 > n:
        raise OutOfRange(f"need K+1 <= {n}, got K = {K}")
    return float(np.partition(values, n - K - 1)[n - K - 1])


def top_k_indices(values, K: int) -> tuple:
    """Indices of the K largest entries, ties broken by lowest index."""
    values = np.asarray(values, dtype=float)
    if K > values.size:
        raise OutOfRange(f"K = {K} exceeds length {values.size}")
    order = np.argsort(-values, kind="stable")
    return tuple(sorted(int(j) for j in order[:K]))


def tail_value(reg, x, K: int):
    """Smallest R(x off S) over supports |S| <= K, with the selected support.

    Equals the sum of the n - K smallest componentwise values; the sum is
    taken in index order so it is bit-for-bit reproducible by enumeration.
    """
    x = np.asarray(x, dtype=float)
    vals = reg.component_values(x)
    support = top_k_indices(vals, K)
    mask = np.ones(vals.size, dtype=bool)
    mask[list(support)] = False
    return float(vals[mask].sum()), support


def is_generalized_sparse(reg, x, K: int, eps: float) -> bool:
    """Membership in the (K, R, eps)-sparse set: tail value <= eps."""
    if eps < 0:
        raise OutOfRange("eps must be >= 0")
    value, _ = tail_value(reg, x, K)
    return value <= eps


def sigma_bracket(reg, x, K: int, eps: float) -> tuple:
    """Provable bracket (lo, hi) around the approximation degree sigma.

    hi: the truncation x' = x_S is (K, R, 0)-sparse, so sigma <= tail value.
    lo: the selected support realizes R(x off S) <= sigma + eps, hence
    sigma >= tail value - eps (clamped at zero).
    """
    if eps < 0:
        raise OutOfRange("eps must be >= 0")
    value, _ = tail_value(reg, x, K)
    return (max(0.0, value - eps), value)


def near_minimizer_check(reg, x, eps: float, feasible_min: float) -> bool:
    """R(x) <= feasible_min + eps (closed inequality).

    ``feasible_min`` must come from a trusted oracle for the feasible set,
    e.g. solvers.bruteforce_min_R_over_Gy.
    """
    return reg.eval(x) <= feasible_min + eps


def sigma_bruteforce(reg, x, K: int, eps: float, step: float | None = None,
                     padding: float = 1.0) -> float:
    """Grid upper bound on sigma: min R(x - x') over grid x' with tail <= eps.

    Each coordinate ranges over a uniform grid on [-(max|x|+padding),
    max|x|+padding] augmented with {0, x_i}, so the truncation witnesses are
    on the grid and the result never exceeds the analytic bracket's hi.  The
    scan is decomposed over the C(n, K) protected supports (x' = x there,
    which is optimal), leaving a budget-constrained scan over the free
    coordinates; this is exactly equivalent to scanning the full product grid.
    Only n <= 6 is supported; runtime grows combinatorially.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n > 6:
        raise TooLarge("sigma_bruteforce supports n <= 6")
    if eps < 0:
        raise OutOfRange("eps must be >= 0")
    if K >= n:
        return 0.0
    if step is None:
        step = 1e-2 if n <= 4 else 5e-2
    half = float(np.max(np.abs(x))) + padding
    base = np.arange(-half, half + 0.5 * step, step)

    axes = []
    for i in range(n):
        axes.append(np.unique(np.concatenate([base, [0.0, x[i]]])))

    best = np.inf
    for protected in itertools.combinations(range(n), K):
        free = [i for i in range(n) if i not in protected]
        gtabs = []
        ctabs = []
        for i in free:
            grid = axes[i]
            gtabs.append(np.array([reg.eval_component(i, float(x[i] - v)) for v in grid]))
            ctabs.append(np.array([reg.eval_component(i, float(v)) for v in grid]))
        val, idx = backend.scan_sigma_budget(gtabs, ctabs, eps)
        if idx is not None and val < best:
            best = float(val)
    return best


def analyze(reg, x, K: int, eps: float) -> SparsityReport:
    """Full sparsity report for one vector."""
    value, support = tail_value(reg, x, K)
    return SparsityReport(
        K=K,
        epsilon=eps,
        tail_value=value,
        selected_support=support,
        is_member=value <= eps,
        sigma_bracket=sigma_bracket(reg, x, K, eps),
    )
