import math

import numpy as np
import pytest
import scipy.integrate

from gsparse.distributions import (
    DiscreteMixing,
    Laplace,
    Normal,
    Rayleigh,
    pdf,
    sample,
    verify_cl_in_cg,
    verify_laplace_identity,
)
from gsparse.errors import InvalidSpec


def test_laplace_pdf_peak():
    assert pdf(Laplace(0.0, 2.0), 0.0) == pytest.approx(1.0, abs=0)


def test_rayleigh_pdf_negative_is_zero():
    assert pdf(Rayleigh(1.0), -1.0) == 0.0


def test_normal_pdf_at_zero():
    assert pdf(Normal(0.0, 1.0), 0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-12)


@pytest.mark.parametrize("dist,lo,hi", [
    (Normal(0.3, 2.0), -np.inf, np.inf),
    (Laplace(-1.0, 0.7), -np.inf, np.inf),
    (Rayleigh(2.5), 0.0, np.inf),
])
def test_pdfs_integrate_to_one(dist, lo, hi):
    total, _ = scipy.integrate.quad(lambda x: float(pdf(dist, x)), lo, hi)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_normal_sample_mean():
    xs = sample(Normal(0.0, 1.0), 10**6, seed=0)
    assert abs(xs.mean()) < 0.01


def test_rayleigh_sample_mean_and_support():
    xs = sample(Rayleigh(1.0), 10**6, seed=1)
    assert (xs >= 0).all()
    assert abs(xs.mean() - math.sqrt(math.pi / 2.0)) < 0.01


def test_sampling_deterministic():
    a = sample(Laplace(0.0, 1.0), 1000, seed=42)
    b = sample(Laplace(0.0, 1.0), 1000, seed=42)
    np.testing.assert_array_equal(a, b)


def test_discrete_mixing_validation():
    with pytest.raises(InvalidSpec):
        DiscreteMixing(atoms=(1.0, -2.0), weights=(0.5, 0.5))
    with pytest.raises(InvalidSpec):
        DiscreteMixing(atoms=(1.0, 2.0), weights=(0.5, 0.6))


def test_discrete_mixing_sample_hits_atoms():
    mix = DiscreteMixing(atoms=(1.0, 3.0), weights=(0.25, 0.75))
    xs = sample(mix, 10**5, seed=7)
    assert set(np.unique(xs)) == {1.0, 3.0}
    assert abs((xs == 3.0).mean() - 0.75) < 0.01


def test_laplace_identity_small_ks():
    rep = verify_laplace_identity(1.0, 1.0, 10**6, seed=0)
    assert rep.ks_statistic < 0.003
    rep = verify_laplace_identity(2.0, 0.5, 10**6, seed=1)
    assert rep.ks_statistic < 0.003


def test_laplace_identity_bookkeeping():
    for seed in (0, 1):
        rep = verify_laplace_identity(1.0, 1.0, 10**4, seed=seed)
        assert rep.sample_count == 10**4
        assert rep.seed == seed


def test_laplace_identity_requires_large_n():
    with pytest.raises(InvalidSpec):
        verify_laplace_identity(1.0, 1.0, 100, seed=0)


def test_ks_statistic_shrinks_with_n():
    # O(1/sqrt(n)) decay: compare n=1e4 vs n=1e6 over ten seeds, allow one inversion
    inversions = sum(
        verify_laplace_identity(1.0, 1.0, 10**6, seed=s).ks_statistic
        >= verify_laplace_identity(1.0, 1.0, 10**4, seed=s).ks_statistic
        for s in range(10)
    )
    assert inversions <= 1


def test_cl_in_cg_point_mass_reduces_to_laplace_identity():
    mix = DiscreteMixing(atoms=(1.0,), weights=(1.0,))
    rep = verify_cl_in_cg(mix, 1.0, 1.0, 10**6, seed=3)
    assert rep.ks_statistic < 0.003


def test_cl_in_cg_two_atoms():
    mix = DiscreteMixing(atoms=(1.0, 3.0), weights=(0.5, 0.5))
    rep = verify_cl_in_cg(mix, 1.0, 1.0, 10**6, seed=4)
    assert rep.ks_statistic < 0.003


def test_cl_in_cg_deterministic():
    mix = DiscreteMixing(atoms=(1.0, 2.0), weights=(0.5, 0.5))
    a = verify_cl_in_cg(mix, 1.0, 1.0, 10**4, seed=9)
    b = verify_cl_in_cg(mix, 1.0, 1.0, 10**4, seed=9)
    assert a.ks_statistic == b.ks_statistic
