"""Scalar distributions and Monte Carlo checks of scale-mixture identities.

Sampling is deterministic per seed: every draw goes through
``numpy.random.Generator`` with the PCG64 bit generator.  Normal variates use
the generator's ziggurat ``standard_normal``; Rayleigh and Laplace use exact
inverse-cdf transforms of ``Generator.random`` uniforms; discrete mixing uses
inverse-cdf lookup on the cumulative weights.  Draw order inside the verify
functions is part of the reproducibility contract and is documented there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.stats

from .errors import InvalidSpec


@dataclass(frozen=True)
class Normal:
    mu: float
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise InvalidSpec("Normal requires sigma2 > 0")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        s = math.sqrt(self.sigma2)
        return np.exp(-((x - self.mu) ** 2) / (2.0 * self.sigma2)) / (math.sqrt(2.0 * math.pi) * s)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.mu + math.sqrt(self.sigma2) * rng.standard_normal(n)


@dataclass(frozen=True)
class Laplace:
    mu: float
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise InvalidSpec("Laplace requires rate > 0")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * self.rate * np.exp(-self.rate * np.abs(x - self.mu))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        z = x - self.mu
        return np.where(z < 0, 0.5 * np.exp(self.rate * z), 1.0 - 0.5 * np.exp(-self.rate * z))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        # inverse cdf: u < 1/2 -> mu + ln(2u)/rate, else mu - ln(2(1-u))/rate
        u = rng.random(n)
        return self.mu + np.where(
            u < 0.5, np.log(2.0 * u), -np.log(2.0 * (1.0 - u))
        ) / self.rate


@dataclass(frozen=True)
class Rayleigh:
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise InvalidSpec("Rayleigh requires sigma2 > 0")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, (x / self.sigma2) * np.exp(-(x**2) / (2.0 * self.sigma2)), 0.0)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        # inverse cdf: x = sigma * sqrt(-2 ln(1 - u))
        u = rng.random(n)
        return math.sqrt(self.sigma2) * np.sqrt(-2.0 * np.log1p(-u))


@dataclass(frozen=True)
class DiscreteMixing:
    """Point masses at positive atoms; the mixing variable of a scale mixture."""

    atoms: tuple
    weights: tuple

    def __post_init__(self):
        atoms = tuple(float(a) for a in self.atoms)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)
        if len(atoms) == 0 or len(atoms) != len(weights):
            raise InvalidSpec("atoms and weights must be equal-length and nonempty")
        if any(a <= 0 for a in atoms):
            raise InvalidSpec("mixing atoms must be strictly positive")
        if any(w <= 0 for w in weights):
            raise InvalidSpec("mixing weights must be strictly positive")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise InvalidSpec("mixing weights must sum to 1 within 1e-12")

    def pdf(self, x):
        """Point-mass weight at x (zero off the atoms); there is no density."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x, dtype=float)
        for a, w in zip(self.atoms, self.weights):
            out = out + np.where(x == a, w, 0.0)
        return out

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        cum = np.cumsum(self.weights)
        u = rng.random(n)
        idx = np.searchsorted(cum, u, side="right")
        return np.asarray(self.atoms, dtype=float)[np.minimum(idx, len(self.atoms) - 1)]


ScalarDistribution = Normal | Laplace | Rayleigh | DiscreteMixing


@dataclass(frozen=True)
class MonteCarloReport:
    sample_count: int
    ks_statistic: float
    seed: int


def pdf(dist: ScalarDistribution, x):
    """Density of ``dist`` at x (point-mass weight for DiscreteMixing)."""
    return dist.pdf(x)


def sample(dist: ScalarDistribution, n: int, seed: int) -> np.ndarray:
    """n draws from ``dist``, deterministic in (dist, n, seed)."""
    if n < 1:
        raise InvalidSpec("n must be >= 1")
    rng = np.random.default_rng(seed)
    return dist.sample(n, rng)


def _require_mc_size(n: int):
    if n < 10_000:
        raise InvalidSpec("Monte Carlo verification requires n >= 10^4")


def verify_laplace_identity(sigma: float, lam: float, n: int, seed: int) -> MonteCarloReport:
    """KS distance of Z*U samples against the Laplace(0, lam) cdf.

    Z ~ Rayleigh(sigma2 = 1/(sigma^2 lam^2)) and U ~ Normal(0, sigma^2) drawn
    independently from one PCG64 stream (Z uniforms first, then U normals);
    the product is Laplace(0, lam) in distribution, so the statistic decays
    as O(1/sqrt(n)).
    """
    _require_mc_size(n)
    if sigma <= 0 or lam <= 0:
        raise InvalidSpec("sigma and lam must be positive")
    rng = np.random.default_rng(seed)
    z = Rayleigh(1.0 / (sigma**2 * lam**2)).sample(n, rng)
    u = Normal(0.0, sigma**2).sample(n, rng)
    target = Laplace(0.0, lam)
    stat = scipy.stats.kstest(z * u, target.cdf).statistic
    return MonteCarloReport(sample_count=n, ks_statistic=float(stat), seed=seed)


def verify_cl_in_cg(mixing: DiscreteMixing, sigma: float, lam: float, n: int, seed: int) -> MonteCarloReport:
    """Two-sample KS distance between Z*Zbar*U and Z'*L.

    Zbar ~ Rayleigh(1/(sigma^2 lam^2)), U ~ Normal(0, sigma^2),
    L ~ Laplace(0, lam), and Z, Z' are independent draws from ``mixing``;
    equality in distribution makes the statistic decay to zero.  Draw order:
    Z, Zbar, U for the first sample, then Z', L for the second.
    """
    _require_mc_size(n)
    if sigma <= 0 or lam <= 0:
        raise InvalidSpec("sigma and lam must be positive")
    rng = np.random.default_rng(seed)
    z1 = mixing.sample(n, rng)
    zbar = Rayleigh(1.0 / (sigma**2 * lam**2)).sample(n, rng)
    u = Normal(0.0, sigma**2).sample(n, rng)
    first = z1 * zbar * u
    z2 = mixing.sample(n, rng)
    ell = Laplace(0.0, lam).sample(n, rng)
    second = z2 * ell
    stat = scipy.stats.ks_2samp(first, second, method="asymp").statistic
    return MonteCarloReport(sample_count=n, ks_statistic=float(stat), seed=seed)
