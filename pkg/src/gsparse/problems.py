"""Seeded generation of synthetic sensing problems.

A problem is A c* = y with A an iid Gaussian ensemble scaled by 1/sqrt(m) and
c* either exactly K-sparse or K-sparse plus a dense perturbation whose
regularizer tail mass is calibrated to a requested level.  Generation is
deterministic in the seed; the draw order (matrix entries, support, values,
perturbation direction) is fixed and must not be reordered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .errors import InvalidSpec
from .regularizers import L1Regularizer
from .solvers import SensingProblem
from .sparsity import tail_value

EXACT_SPARSE = "exact"
GENERALIZED_SPARSE = "generalized"


@dataclass(frozen=True)
class ProblemSpec:
    m: int
    n: int
    K_true: int
    seed: int
    ensemble: str = "gaussian-iid"
    truth_model: str = EXACT_SPARSE
    eps_mass: float = 0.0

    def __post_init__(self):
        if not (1 <= self.K_true <= self.m <= self.n):
            raise InvalidSpec("need 1 <= K_true <= m <= n")
        if self.ensemble != "gaussian-iid":
            raise InvalidSpec(f"unknown ensemble {self.ensemble!r}")
        if self.truth_model not in (EXACT_SPARSE, GENERALIZED_SPARSE):
            raise InvalidSpec(f"unknown truth model {self.truth_model!r}")
        if self.truth_model == GENERALIZED_SPARSE and not self.eps_mass > 0:
            raise InvalidSpec("generalized truth model requires eps_mass > 0")


def generate_problem(spec: ProblemSpec, reg=None) -> SensingProblem:
    """Instantiate a problem from its spec; deterministic in spec.seed.

    ``reg`` is the regularizer whose tail mass calibrates the generalized
    truth model (unit-rate l1 when omitted); it is ignored for exact-sparse
    truths.
    """
    rng = np.random.default_rng(spec.seed)
    A = rng.standard_normal((spec.m, spec.n)) / math.sqrt(spec.m)
    support = rng.choice(spec.n, size=spec.K_true, replace=False)
    values = rng.standard_normal(spec.K_true)
    c_star = np.zeros(spec.n)
    c_star[support] = values

    if spec.truth_model == GENERALIZED_SPARSE:
        if reg is None:
            reg = L1Regularizer(1.0, n=spec.n)
        direction = rng.standard_normal(spec.n)

        def tail_at(scale: float) -> float:
            value, _ = tail_value(reg, c_star + scale * direction, spec.K_true)
            return value

        hi = 1.0
        for _ in range(60):
            if tail_at(hi) >= spec.eps_mass:
                break
            hi *= 2.0
        else:
            raise InvalidSpec("could not bracket the requested tail mass")
        scale = scipy.optimize.brentq(
            lambda s: tail_at(s) - spec.eps_mass, 0.0, hi, xtol=1e-14, rtol=1e-15
        )
        c_star = c_star + scale * direction

    y = A @ c_star
    return SensingProblem(A=A, y=y, ground_truth=c_star)
