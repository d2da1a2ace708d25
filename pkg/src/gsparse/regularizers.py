"""Componentwise regularizers induced by Laplace scale-mixture priors.

A regularizer here is R(c) = sum_i R_i(c_i) with R_i(c) = log p_i(0) - log p_i(c)
for a symmetric prior density p_i.  Three families are provided:

* ``L1Regularizer``       -- R_i(x) = lam_i * |x| (Laplace prior).
* ``CLDiscreteRegularizer`` -- the prior is a finite mixture of Laplace
  densities with scales lam_i / z_k:  p_i(c) = sum_k pi_k (lam_i / 2 z_k)
  exp(-lam_i |c| / z_k).  Evaluated exactly in the log domain.
* ``CLQuadratureRegularizer`` -- continuous mixing density p_Z:
  p_i(c) = (lam_i/2) * integral_0^inf exp(-lam_i |c| / z) p_Z(z)/z dz,
  evaluated by adaptive quadrature after the substitution z = s/(1-s).

Every family satisfies R_i(0) = 0, evenness, monotonicity on [0, inf), and
(for the mixture families) concavity on [0, inf), hence subadditivity.

The weight function w(t) = R_i(sqrt(t)) / t and the auxiliary convex
functions f_i with f_i'(R_i(x)/x^2) = -x^2 used by the reweighted solver are
exposed here; see ``FCurve``.  Regularizers are immutable after construction
and safe for concurrent use (the per-component f-curve cache is idempotent).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate

from . import backend
from .errors import (
    DegenerateInput,
    DimensionMismatch,
    InvalidSpec,
    NotInvertible,
    QuadratureFailure,
)


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the semi-infinite mixing integrals.

    The domain transform is fixed: z = s/(1-s) maps (0, 1) onto (0, inf).
    """

    absolute_tol: float = 1e-12
    relative_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        if self.absolute_tol <= 0 or self.relative_tol <= 0:
            raise InvalidSpec("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise InvalidSpec("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class MixingDensity:
    """Evaluable mixing density on (0, inf) with optional known support.

    ``family``/``params`` are serialization hints used by the JSON spec
    format; the density itself only needs ``pdf`` and the support bounds.
    """

    pdf: object
    lo: float = 0.0
    hi: float = math.inf
    family: str | None = None
    params: dict | None = None


def uniform_bump(center: float, half_width: float) -> MixingDensity:
    """Uniform density on [center - half_width, center + half_width]."""
    if half_width <= 0 or center - half_width <= 0:
        raise InvalidSpec("bump must lie strictly inside (0, inf)")
    lo, hi = center - half_width, center + half_width
    h = 1.0 / (2.0 * half_width)

    def pdf(z):
        return h if lo <= z <= hi else 0.0

    return MixingDensity(pdf=pdf, lo=lo, hi=hi, family="uniform_bump",
                         params={"center": center, "half_width": half_width})


def rayleigh_mixing(sigma2: float) -> MixingDensity:
    """Rayleigh(sigma2) mixing density on (0, inf)."""
    if sigma2 <= 0:
        raise InvalidSpec("sigma2 must be positive")

    def pdf(z):
        return (z / sigma2) * math.exp(-(z * z) / (2.0 * sigma2)) if z >= 0 else 0.0

    return MixingDensity(pdf=pdf, lo=0.0, hi=math.inf, family="rayleigh",
                         params={"sigma2": sigma2})


def _as_rates(lam, n: int | None) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if arr.ndim != 1:
        raise InvalidSpec("rates must be a scalar or a 1-d sequence")
    if arr.size == 1 and n is not None:
        arr = np.full(n, float(arr[0]))
    if n is not None and arr.size != n:
        raise InvalidSpec(f"expected {n} rates, got {arr.size}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise InvalidSpec("rates must be positive and finite")
    return arr


class FCurve:
    """The convex auxiliary function f with f'(R(x)/x^2) = -x^2.

    f is determined by its derivative up to a constant; the anchor is
    f(u0) = x(u0)^2 * u0 at u0 = R(1), which makes the weighted-l1 case come
    out as f(u) = lam^2 / u exactly (f(u) = 1/u for unit rate).
    """

    def __call__(self, u: float) -> float:
        raise NotImplementedError

    def derivative(self, u: float) -> float:
        raise NotImplementedError

    def values(self, us) -> np.ndarray:
        """f at an array of points (override for batch efficiency)."""
        return np.array([self(float(u)) for u in np.asarray(us, dtype=float)])


class L1FCurve(FCurve):
    def __init__(self, rate: float):
        self.rate = float(rate)

    def __call__(self, u: float) -> float:
        if u <= 0:
            raise DegenerateInput("f is defined on (0, inf)")
        return self.rate**2 / u

    def derivative(self, u: float) -> float:
        if u <= 0:
            raise DegenerateInput("f' is defined on (0, inf)")
        return -((self.rate / u) ** 2)

    def values(self, us) -> np.ndarray:
        us = np.asarray(us, dtype=float)
        if np.any(us <= 0):
            raise DegenerateInput("f is defined on (0, inf)")
        return self.rate**2 / us


class NumericFCurve(FCurve):
    """f reconstructed numerically from a strictly decreasing u(x) = R(x)/x^2.

    The inverse x(u) is found by bisection after geometric bracket expansion
    from [1e-8, 1]; f values integrate f'(v) = -x(v)^2 adaptively from the
    anchor u0 = R(1).
    """

    _PROBE = np.geomspace(1e-6, 1e6, 121)

    def __init__(self, eval_component, probe: np.ndarray | None = None):
        self._R = eval_component
        probe = self._PROBE if probe is None else probe
        us = np.array([self._u(x) for x in probe])
        if not np.all(np.diff(us) < 0):
            raise NotInvertible("R(x)/x^2 is not strictly decreasing on the probed grid")
        self.u0 = self._u(1.0)

    def _u(self, x: float) -> float:
        return self._R(x) / (x * x)

    def inverse(self, u: float) -> float:
        """x with R(x)/x^2 = u, by bisection to ~1e-12."""
        if u <= 0:
            raise DegenerateInput("u must be positive")
        lo, hi = 1e-8, 1.0
        for _ in range(400):
            if self._u(lo) >= u:
                break
            lo *= 0.25
        else:
            raise DegenerateInput("u outside the invertible range")
        for _ in range(400):
            if self._u(hi) <= u:
                break
            hi *= 4.0
        else:
            raise DegenerateInput("u outside the invertible range")
        while hi - lo > 1e-12 * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if self._u(mid) > u:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def derivative(self, u: float) -> float:
        x = self.inverse(u)
        return -(x * x)

    def _integral(self, lo: float, hi: float) -> float:
        """integral of f' over [lo, hi], 0 < lo <= hi.

        Substituting v = lo * e^s keeps the integrand well scaled even when
        the endpoints span many decades (f' decays like 1/v^2).
        """
        if hi == lo:
            return 0.0
        length = math.log(hi / lo)

        def g(s: float) -> float:
            v = lo * math.exp(s)
            return self.derivative(v) * v

        val, _ = scipy.integrate.quad(g, 0.0, length, limit=400)
        return val

    def __call__(self, u: float) -> float:
        if u <= 0:
            raise DegenerateInput("f is defined on (0, inf)")
        if u == self.u0:
            return self.u0
        if u > self.u0:
            return self.u0 + self._integral(self.u0, u)
        return self.u0 - self._integral(u, self.u0)

    def values(self, us) -> np.ndarray:
        """Batch f values via cumulative integration along the sorted points."""
        us = np.asarray(us, dtype=float)
        if np.any(us <= 0):
            raise DegenerateInput("f is defined on (0, inf)")
        knots = np.unique(np.concatenate([us.ravel(), [self.u0]]))
        vals = np.empty_like(knots)
        i0 = int(np.searchsorted(knots, self.u0))
        vals[i0] = self.u0
        for j in range(i0 + 1, knots.size):
            vals[j] = vals[j - 1] + self._integral(knots[j - 1], knots[j])
        for j in range(i0 - 1, -1, -1):
            vals[j] = vals[j + 1] - self._integral(knots[j], knots[j + 1])
        lookup = dict(zip(knots.tolist(), vals.tolist()))
        return np.array([lookup[float(u)] for u in us.ravel()]).reshape(us.shape)


class Regularizer:
    """Base: componentwise even penalty with R_i(0) = 0."""

    kind = "base"

    def __init__(self, rates: np.ndarray):
        self.rates = rates
        self.n = rates.size
        self._f_curves: dict[int, FCurve] = {}

    # -- componentwise values ------------------------------------------------

    def eval_component(self, i: int, x: float) -> float:
        raise NotImplementedError

    def component_values(self, x) -> np.ndarray:
        """Vector (R_1(x_1), ..., R_n(x_n))."""
        return self.batch_component_values(np.asarray(x, dtype=float)[np.newaxis, :])[0]

    def batch_component_values(self, X) -> np.ndarray:
        spec = self.kernel_spec()
        if spec is not None:
            return backend.component_values(X, *spec)
        X = np.asarray(X, dtype=float)
        out = np.empty_like(X)
        for i in range(self.n):
            out[:, i] = [self.eval_component(i, float(v)) for v in X[:, i]]
        return out

    def eval(self, x) -> float:
        """R(x) = sum_i R_i(x_i)."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(f"expected length {self.n}, got shape {x.shape}")
        return float(self.component_values(x).sum())

    # -- reweighting support -------------------------------------------------

    def weight(self, i: int, t: float) -> float:
        """R_i(sqrt(t)) / t, the closed form of (f_i')^{-1}(-t)."""
        if not t > 0:
            raise DegenerateInput("weight requires t > 0")
        return self.eval_component(i, math.sqrt(t)) / t

    def weights(self, t) -> np.ndarray:
        """Vectorized weight over t = (t_1, ..., t_n), all positive."""
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DegenerateInput("weights require all t > 0")
        return self.component_values(np.sqrt(t)) / t

    def reconstruct_f(self, i: int) -> FCurve:
        """The auxiliary f_i (cached per component; construction is idempotent)."""
        curve = self._f_curves.get(i)
        if curve is None:
            curve = self._make_f_curve(i)
            self._f_curves[i] = curve
        return curve

    def _make_f_curve(self, i: int) -> FCurve:
        return NumericFCurve(lambda x: self.eval_component(i, x))

    def h_eval(self, i: int, eps: float, x: float) -> float:
        """h_{i,eps}(x) = (R_i(s) + f_i(R_i(s)/s^2)) / 2 with s = sqrt(x^2 + eps^2)."""
        if not eps > 0:
            raise DegenerateInput("h requires eps > 0")
        s2 = x * x + eps * eps
        r = self.eval_component(i, math.sqrt(s2))
        return 0.5 * (r + self.reconstruct_f(i)(r / s2))

    # -- backend / diagnostics -----------------------------------------------

    def kernel_spec(self):
        """Flattened description for the compiled kernels, or None."""
        return None

    def component_lipschitz(self) -> np.ndarray:
        """Upper bound on sup |R_i'| per component (slope at the origin)."""
        raise NotImplementedError


class L1Regularizer(Regularizer):
    """R_i(x) = lam_i |x| (Laplace priors; unit rates give the l1 norm)."""

    kind = "l1"

    def __init__(self, lam=1.0, n: int | None = None):
        super().__init__(_as_rates(lam, n))

    def eval_component(self, i: int, x: float) -> float:
        return self.rates[i] * abs(x)

    def kernel_spec(self):
        return (0, self.rates, np.zeros(0), np.zeros(0), 0.0)

    def _make_f_curve(self, i: int) -> FCurve:
        return L1FCurve(self.rates[i])

    def component_lipschitz(self) -> np.ndarray:
        return self.rates.copy()


class CLDiscreteRegularizer(Regularizer):
    """Finite Laplace scale mixture: atoms z_k > 0 with weights pi_k.

    R_i(x) = lse0 - logsumexp_k(a_k - lam_i |x| / z_k) where
    a_k = log pi_k - log z_k and lse0 = logsumexp(a).  The max-shifted
    log-sum-exp keeps large |x| exact where the density itself underflows.
    """

    kind = "cl-discrete"

    def __init__(self, lam, atoms, weights, n: int | None = None):
        super().__init__(_as_rates(lam, n))
        atoms = np.asarray(atoms, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if atoms.ndim != 1 or atoms.size == 0 or atoms.shape != weights.shape:
            raise InvalidSpec("atoms and weights must be equal-length 1-d and nonempty")
        if np.any(atoms <= 0):
            raise InvalidSpec("atoms must be strictly positive")
        if np.any(weights <= 0):
            raise InvalidSpec("weights must be strictly positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise InvalidSpec("weights must sum to 1 within 1e-12")
        self.atoms = atoms
        self.mix_weights = weights
        self._loga = np.log(weights) - np.log(atoms)
        m = self._loga.max()
        self._lse0 = float(m + math.log(np.exp(self._loga - m).sum()))

    def _log_mixture(self, i: int, x: float) -> float:
        t = self.rates[i] * abs(x)
        e = self._loga - t / self.atoms
        m = e.max()
        return float(m + math.log(np.exp(e - m).sum()))

    def eval_component(self, i: int, x: float) -> float:
        return self._lse0 - self._log_mixture(i, x)

    def eval_pdf_component(self, i: int, c: float) -> float:
        """p_i(c) = sum_k pi_k (lam_i / 2 z_k) exp(-lam_i |c| / z_k)."""
        return 0.5 * self.rates[i] * math.exp(self._log_mixture(i, c))

    def kernel_spec(self):
        return (1, self.rates, self.atoms, self._loga, self._lse0)

    def component_lipschitz(self) -> np.ndarray:
        s2 = (self.mix_weights / self.atoms**2).sum()
        s1 = (self.mix_weights / self.atoms).sum()
        return self.rates * (s2 / s1)


class CLQuadratureRegularizer(Regularizer):
    """Laplace scale mixture with a continuous mixing density.

    p_i(c) = (lam_i/2) * I(lam_i |c|) with
    I(t) = integral_0^inf exp(-t/z) p_Z(z)/z dz, computed by adaptive
    quadrature on s = z/(1+z) with a log shift at the integrand's peak so the
    value stays representable for large |c|.  I(0) is shared across
    components and cached.
    """

    kind = "cl-quadrature"

    def __init__(self, lam, mixing: MixingDensity, n: int | None = None,
                 quadrature: QuadratureConfig | None = None):
        super().__init__(_as_rates(lam, n))
        self.mixing = mixing
        self.quadrature = quadrature if quadrature is not None else QuadratureConfig()
        self._probes = self._build_probes()
        self._log_i0 = self._log_mixing_integral(0.0)

    def _build_probes(self) -> np.ndarray:
        lo, hi = self.mixing.lo, self.mixing.hi
        if math.isfinite(hi):
            span = hi - max(lo, 0.0)
            inner = np.linspace(max(lo, 0.0) + 1e-3 * span, hi - 1e-3 * span, 201)
            return inner
        start = max(lo, 1e-10)
        return np.geomspace(start, max(1e10, start * 1e4), 241)

    def _log_phi(self, z: float, t: float) -> float:
        """log of exp(-t/z) p_Z(z) / z; -inf where the density vanishes."""
        p = self.mixing.pdf(z)
        if not p > 0.0:
            return -math.inf
        return -t / z - math.log(z) + math.log(p)

    def _log_mixing_integral(self, t: float) -> float:
        """log I(t), I(t) = integral exp(-t/z) p_Z(z)/z dz, via shifted quadrature."""
        shift = max(self._log_phi(float(z), t) for z in self._probes)
        if not math.isfinite(shift):
            raise QuadratureFailure("mixing density vanished on every probe point")
        lo = max(self.mixing.lo, 0.0)
        hi = self.mixing.hi
        s_lo = lo / (1.0 + lo)
        s_hi = 1.0 if math.isinf(hi) else hi / (1.0 + hi)

        def integrand(s: float) -> float:
            if s <= 0.0 or s >= 1.0:
                return 0.0
            z = s / (1.0 - s)
            lp = self._log_phi(z, t)
            if not math.isfinite(lp):
                return 0.0
            return math.exp(lp - shift) / ((1.0 - s) ** 2)

        cfg = self.quadrature
        out = scipy.integrate.quad(
            integrand, s_lo, s_hi,
            epsabs=cfg.absolute_tol, epsrel=cfg.relative_tol,
            limit=cfg.max_subdivisions, full_output=1,
        )
        if len(out) > 3:
            raise QuadratureFailure(f"adaptive quadrature did not converge: {out[3]}")
        value = out[0]
        if not (math.isfinite(value) and value > 0.0):
            raise QuadratureFailure("mixing integral evaluated to a non-positive value")
        return shift + math.log(value)

    def eval_component(self, i: int, x: float) -> float:
        return self._log_i0 - self._log_mixing_integral(self.rates[i] * abs(x))

    def eval_pdf_component(self, i: int, c: float) -> float:
        """p_i(c) = (lam_i/2) integral exp(-lam_i |c|/z) p_Z(z)/z dz."""
        return 0.5 * self.rates[i] * math.exp(self._log_mixing_integral(self.rates[i] * abs(c)))

    def component_lipschitz(self) -> np.ndarray:
        h = 1e-9
        slope = self.eval_component(0, h) / h
        return np.array([slope * r / self.rates[0] for r in self.rates])


# -- property checks ----------------------------------------------------------


@dataclass(frozen=True)
class SampleSpec:
    """Sampling plan for the property checks: ``count`` pairs on [lo, hi]."""

    count: int = 10_000
    lo: float = -20.0
    hi: float = 20.0
    concavity_step: float = 1e-2


@dataclass(frozen=True)
class PropertyWitness:
    check: str
    component: int
    x: float
    y: float | None = None


@dataclass(frozen=True)
class PropertyReport:
    even_ok: bool
    subadditive_ok: bool
    concave_on_positive_ok: bool
    worst_violation: float
    witness: PropertyWitness | None


@dataclass(frozen=True)
class ConvexityReport:
    is_strictly_convex: bool
    min_second_difference: float
    witness: float | None


def check_convexity_h(reg, i: int, eps: float, grid, tol: float = 1e-10) -> ConvexityReport:
    """Centered second differences of h_{i,eps} on a sorted grid.

    Strictly convex verdict iff every second difference exceeds ``tol``.
    Any witness is reported at its nonnegative representative.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 3:
        raise InvalidSpec("convexity check needs at least 3 grid points")
    if not eps > 0:
        raise DegenerateInput("h requires eps > 0")
    s2 = grid * grid + eps * eps
    r = np.array([reg.eval_component(i, s) for s in np.sqrt(s2)])
    f_vals = reg.reconstruct_f(i).values(r / s2)
    h = 0.5 * (r + f_vals)
    d2 = h[:-2] - 2.0 * h[1:-1] + h[2:]
    j = int(np.argmin(d2))
    min_d2 = float(d2[j])
    ok = bool(min_d2 > tol)
    witness = None if ok else abs(float(grid[j + 1]))
    return ConvexityReport(is_strictly_convex=ok, min_second_difference=min_d2, witness=witness)


def check_properties(reg, spec: SampleSpec | None = None, seed: int = 0,
                     even_tol: float = 1e-12, subadd_tol: float = 1e-9,
                     concavity_tol: float = 1e-9) -> PropertyReport:
    """Sampled falsification of evenness, subadditivity, and concavity on [0, inf).

    Works on anything exposing ``n`` and ``eval_component``; the checks are
    componentwise.  ``worst_violation`` <= 0 means every sampled inequality
    held with margin.
    """
    spec = spec if spec is not None else SampleSpec()
    rng = np.random.default_rng(seed)
    xs = rng.uniform(spec.lo, spec.hi, spec.count)
    ys = rng.uniform(spec.lo, spec.hi, spec.count)
    pos_grid = np.arange(0.0, max(abs(spec.lo), abs(spec.hi)) + spec.concavity_step,
                         spec.concavity_step)

    worst = -math.inf
    witness = None
    even_ok = subadd_ok = concave_ok = True
    for i in range(reg.n):
        rx = np.array([reg.eval_component(i, v) for v in xs])
        rnegx = np.array([reg.eval_component(i, v) for v in -xs])
        ry = np.array([reg.eval_component(i, v) for v in ys])
        rxy = np.array([reg.eval_component(i, v) for v in xs + ys])

        even_viol = np.abs(rnegx - rx)
        j = int(np.argmax(even_viol))
        if even_viol[j] > even_tol:
            even_ok = False
        if even_viol[j] > worst:
            worst = float(even_viol[j])
            witness = PropertyWitness("even", i, float(xs[j]))

        sub_viol = rxy - rx - ry
        j = int(np.argmax(sub_viol))
        if sub_viol[j] > subadd_tol:
            subadd_ok = False
        if sub_viol[j] > worst:
            worst = float(sub_viol[j])
            witness = PropertyWitness("subadditive", i, float(xs[j]), float(ys[j]))

        rg = np.array([reg.eval_component(i, v) for v in pos_grid])
        d2 = rg[2:] - 2.0 * rg[1:-1] + rg[:-2]
        j = int(np.argmax(d2))
        if d2[j] > concavity_tol:
            concave_ok = False
        if d2[j] > worst:
            worst = float(d2[j])
            witness = PropertyWitness("concave", i, float(pos_grid[j + 1]))

    return PropertyReport(
        even_ok=even_ok,
        subadditive_ok=subadd_ok,
        concave_on_positive_ok=concave_ok,
        worst_violation=worst,
        witness=witness,
    )
