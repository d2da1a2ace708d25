"""Generalized iteratively reweighted least squares and its oracles.

The iteration alternates an exactly feasible weighted minimum-norm step

    c <- D A^T (A D A^T)^{-1} y,   D = diag(w)^{-1},

with the smoothing update eps <- min(eps, (K+1)-th largest componentwise
regularizer value) and the weight update w_j <- R_j(sqrt(t_j)) / t_j at
t_j = c_j^2 + eps^2, which is the closed form of (f_j')^{-1}(-t_j).  With the
plain l1 regularizer this is classic IRLS: w_j = 1 / sqrt(c_j^2 + eps^2).

Which eps enters the weight update is configurable: ``weight_eps="pre"``
(default) uses the value from before the smoothing update, ``"post"`` the
value after it.  Both keep the surrogate loss

    L(c, w, eps) = 1/2 sum_j (c_j^2 w_j + eps^2 w_j + f_j(w_j))

nonincreasing along the trace.

Also here: the MAP objective for noisy problems (evaluation only, no solver),
a dense-grid oracle for min R over {c : Ac = y} at kernel dimension <= 3, and
the bound on the limiting smoothing level implied by a certified weak null
space property.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import backend
from .errors import (
    DegenerateWeights,
    DimensionMismatch,
    InvalidSpec,
    MissingNoiseVariance,
    NonFiniteIterate,
    OutOfRange,
    RankDeficient,
    TooLarge,
)
from .linalg import RANK_RTOL, as_matrix, as_vector, kernel_basis, solve_spd
from .sparsity import rearranged_value


@dataclass(frozen=True)
class SensingProblem:
    """Observation y = A c (+ optional noise variance for the MAP objective)."""

    A: np.ndarray
    y: np.ndarray
    ground_truth: np.ndarray | None = None
    noise_var: float | None = None

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        y = as_vector(self.y, "y")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "y", y)
        m, n = A.shape
        if y.shape[0] != m:
            raise DimensionMismatch(f"y has length {y.shape[0]}, A has {m} rows")
        if m > n:
            raise InvalidSpec("A must have full row rank, which requires m <= n")
        s = scipy.linalg.svdvals(A)
        if s[0] == 0.0 or s[-1] < RANK_RTOL * s[0]:
            raise RankDeficient("A does not have full row rank")
        if self.ground_truth is not None:
            gt = as_vector(self.ground_truth, "ground_truth")
            if gt.shape[0] != n:
                raise DimensionMismatch("ground_truth length must equal A's column count")
            object.__setattr__(self, "ground_truth", gt)
        if self.noise_var is not None and not self.noise_var > 0:
            raise InvalidSpec("noise_var must be positive when given")

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


class Termination(enum.Enum):
    EPS_BELOW_THRESHOLD = "eps_below_threshold"
    MAX_ITERATIONS = "max_iterations"
    STAGNATION = "stagnation"


@dataclass(frozen=True)
class GirlsConfig:
    """Loop parameters: sparsity target K, smoothing floor eps_bar, budget max_iter.

    eps0 defaults to the ambient dimension n.  ``weight_eps`` selects which
    smoothing level enters the weight update ("pre" or "post", see module
    docstring).  ``stagnation_tol`` = 0 disables the optional early exit.
    """

    K: int
    eps_bar: float
    max_iter: int
    eps0: float | None = None
    spd_jitter: float = 0.0
    stagnation_tol: float = 0.0
    record_trace: bool = False
    weight_eps: str = "pre"

    def __post_init__(self):
        if self.K < 0:
            raise InvalidSpec("K must be >= 0")
        if not self.eps_bar > 0:
            raise InvalidSpec("eps_bar must be positive")
        if self.max_iter < 1:
            raise InvalidSpec("max_iter must be >= 1")
        if self.eps0 is not None and not self.eps0 > 0:
            raise InvalidSpec("eps0 must be positive when given")
        if self.spd_jitter < 0 or self.stagnation_tol < 0:
            raise InvalidSpec("spd_jitter and stagnation_tol must be >= 0")
        if self.weight_eps not in ("pre", "post"):
            raise InvalidSpec('weight_eps must be "pre" or "post"')


@dataclass(frozen=True)
class TraceEntry:
    c: np.ndarray
    w: np.ndarray
    eps: float
    loss: float
    feasibility_residual: float


@dataclass(frozen=True)
class GirlsResult:
    c_bar: np.ndarray
    iterations: int
    eps_final: float
    termination: Termination
    trace: tuple | None


def wls_step(A, w, y, jitter: float = 0.0) -> np.ndarray:
    """Feasible minimizer of sum_j w_j c_j^2 over {c : Ac = y}.

    Solves (A D A^T) x = y by Cholesky (D = diag(1/w)) and returns D A^T x;
    no explicit inverse is ever formed.
    """
    A = as_matrix(A, "A")
    y = as_vector(y, "y")
    w = np.asarray(w, dtype=float)
    if w.shape != (A.shape[1],):
        raise DimensionMismatch("w must have one weight per column of A")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise DegenerateWeights("weights must be positive and finite")
    d = 1.0 / w
    AD = A * d[np.newaxis, :]
    M = AD @ A.T
    M = 0.5 * (M + M.T)
    x = solve_spd(M, y, jitter=jitter)
    return d * (A.T @ x)


def g_irls(problem: SensingProblem, reg, config: GirlsConfig) -> GirlsResult:
    """Run the generalized IRLS loop until eps < eps_bar or the budget is spent.

    Every iterate is feasible by construction and the smoothing levels are
    nonincreasing.  The trace (when recorded) carries one entry per
    iteration: the iterate, the weights, the post-update smoothing level, the
    surrogate loss at that triple, and the feasibility residual.
    """
    A, y = problem.A, problem.y
    n = problem.n
    if reg.n != n:
        raise DimensionMismatch(f"regularizer has dimension {reg.n}, problem has {n}")
    if config.K + 1 > n:
        raise InvalidSpec("need K + 1 <= n")

    w = np.ones(n)
    eps = float(config.eps0) if config.eps0 is not None else float(n)
    c = None
    k = 0
    entries: list[TraceEntry] = []
    termination = None

    while eps >= config.eps_bar and k < config.max_iter:
        c_new = wls_step(A, w, y, jitter=config.spd_jitter)
        if not np.all(np.isfinite(c_new)):
            raise NonFiniteIterate("iterate left the representable range")
        comp = reg.component_values(c_new)
        eps_new = min(eps, rearranged_value(comp, config.K))
        eps_w = eps if config.weight_eps == "pre" else eps_new
        if eps_w > 0.0:
            w = reg.weights(c_new * c_new + eps_w * eps_w)
            if not np.all(np.isfinite(w)):
                raise NonFiniteIterate("weights left the representable range")
        # eps_w == 0 means the loop is about to exit; weights stay untouched
        stagnated = (
            config.stagnation_tol > 0.0
            and c is not None
            and float(np.max(np.abs(c_new - c))) <= config.stagnation_tol
        )
        c = c_new
        eps = eps_new
        k += 1
        if config.record_trace:
            entries.append(
                TraceEntry(
                    c=c.copy(),
                    w=w.copy(),
                    eps=eps,
                    loss=girls_loss(reg, c, w, eps),
                    feasibility_residual=float(np.max(np.abs(A @ c - y))),
                )
            )
        if stagnated:
            termination = Termination.STAGNATION
            break

    if c is None:
        # eps0 below the floor: return the uniform-weight minimum-norm point
        c = wls_step(A, w, y, jitter=config.spd_jitter)
        termination = Termination.EPS_BELOW_THRESHOLD
    if termination is None:
        termination = (
            Termination.EPS_BELOW_THRESHOLD if eps < config.eps_bar else Termination.MAX_ITERATIONS
        )
    return GirlsResult(
        c_bar=c,
        iterations=k,
        eps_final=eps,
        termination=termination,
        trace=tuple(entries) if config.record_trace else None,
    )


def map_objective(problem: SensingProblem, reg, c) -> float:
    """(1 / (2 sigma)) ||Ac - y||_2^2 + R(c) for problems with noise variance."""
    if problem.noise_var is None:
        raise MissingNoiseVariance("problem has no noise variance attached")
    c = as_vector(c, "c")
    r = problem.A @ c - problem.y
    return float(r @ r) / (2.0 * problem.noise_var) + reg.eval(c)


def girls_loss(reg, c, w, eps: float) -> float:
    """Surrogate loss L(c, w, eps) = 1/2 sum_j (c_j^2 w_j + eps^2 w_j + f_j(w_j))."""
    c = np.asarray(c, dtype=float)
    w = np.asarray(w, dtype=float)
    total = 0.0
    for j in range(c.size):
        f_j = reg.reconstruct_f(j)(float(w[j]))
        total += c[j] * c[j] * w[j] + eps * eps * w[j] + f_j
    return 0.5 * total


@dataclass(frozen=True)
class OracleResult:
    min_value: float
    minimizer: np.ndarray
    kernel_dim: int
    step: float
    halfwidth: float


def bruteforce_min_R_over_Gy(problem: SensingProblem, reg,
                             points_per_axis: int = 401,
                             halfwidth: float | None = None) -> OracleResult:
    """Dense-grid upper bound on min R over {c : Ac = y} (kernel dim <= 3).

    The solution set is c0 + B t with c0 the minimum-norm particular solution
    and B an orthonormal kernel basis; t is scanned over a centered cube of
    the given halfwidth (default ||c0||_inf + ||y||_1 + 1, which contains
    every vertex solution at desk scale).  The result is within one grid-cell
    modulus of continuity of the true infimum when the box contains it.
    """
    if reg.n != problem.n:
        raise DimensionMismatch("regularizer dimension must match the problem")
    if points_per_axis < 2:
        raise InvalidSpec("points_per_axis must be >= 2")
    c0 = wls_step(problem.A, np.ones(problem.n), problem.y)
    B = kernel_basis(problem.A)
    d = B.shape[1]
    if d > 3:
        raise TooLarge("brute-force oracle supports kernel dimension <= 3")
    if d == 0:
        return OracleResult(reg.eval(c0), c0, 0, 0.0, 0.0)
    if halfwidth is None:
        halfwidth = float(np.max(np.abs(c0)) + np.sum(np.abs(problem.y)) + 1.0)
    grid = np.linspace(-halfwidth, halfwidth, points_per_axis)
    spec = reg.kernel_spec()
    if spec is not None:
        val, t = backend.scan_affine_min(c0, B, [grid] * d, *spec)
    else:
        val, t = _generic_affine_min(reg, c0, B, [grid] * d)
    return OracleResult(
        min_value=float(val),
        minimizer=c0 + B @ t,
        kernel_dim=d,
        step=float(grid[1] - grid[0]),
        halfwidth=halfwidth,
    )


def _generic_affine_min(reg, c0, B, grids):
    """Chunked scan for regularizers without a compiled kernel description."""
    d = B.shape[1]
    best = math.inf
    best_t = None
    if d == 1:
        T = grids[0][:, np.newaxis]
    else:
        mesh = np.meshgrid(*grids, indexing="ij")
        T = np.stack([m.ravel() for m in mesh], axis=-1)
    chunk = 8192
    for start in range(0, T.shape[0], chunk):
        block = T[start:start + chunk]
        X = c0[np.newaxis, :] + block @ B.T
        totals = reg.batch_component_values(X).sum(axis=1)
        j = int(np.argmin(totals))
        if totals[j] < best:
            best = float(totals[j])
            best_t = block[j]
    return best, best_t


@dataclass(frozen=True)
class EpsilonBoundReport:
    applicable: bool
    bound: float
    satisfied: bool


def epsilon_bound_check(eps_final: float, gamma: float, delta: float,
                        K: int, kappa: int) -> EpsilonBoundReport:
    """Bound on the limiting smoothing level under a (K, gamma, delta) certificate.

    Applicable when 0 < kappa < K - (4 + 6 gamma) / (1 - gamma) and a
    kappa-sparse feasible point exists; then the limit obeys

        eps <= 2 (1 + gamma) delta / ((1 - gamma)(K - kappa) - 4 - 6 gamma).

    Inapplicable parameter combinations are flagged, never raised.
    """
    if not gamma < 1:
        raise OutOfRange("the bound requires gamma < 1")
    threshold = K - (4.0 + 6.0 * gamma) / (1.0 - gamma)
    applicable = 0 < kappa < threshold
    if not applicable:
        return EpsilonBoundReport(False, math.nan, False)
    bound = 2.0 * (1.0 + gamma) * delta / ((1.0 - gamma) * (K - kappa) - 4.0 - 6.0 * gamma)
    return EpsilonBoundReport(True, float(bound), bool(eps_final <= bound))
