import math

import numpy as np
import pytest
import scipy.integrate

from gsparse.errors import DegenerateInput, InvalidSpec, NotInvertible
from gsparse.regularizers import (
    CLDiscreteRegularizer,
    CLQuadratureRegularizer,
    L1Regularizer,
    SampleSpec,
    check_convexity_h,
    check_properties,
    uniform_bump,
)


def single_laplace():
    # one-atom mixture at z=1 is exactly the unit-rate Laplace prior
    return CLDiscreteRegularizer(1.0, [1.0], [1.0], n=1)


class QuadraticDouble:
    """Adversarial non-mixture penalty R(x) = x^2 for falsification tests."""

    n = 1

    def eval_component(self, i, x):
        return x * x


# -- pdf values ----------------------------------------------------------------


def test_pdf_single_atom_at_zero():
    assert single_laplace().eval_pdf_component(0, 0.0) == pytest.approx(0.5, abs=0)


def test_pdf_single_atom_closed_form():
    assert single_laplace().eval_pdf_component(0, 2.0) == pytest.approx(0.5 * math.exp(-2.0), rel=1e-12)


def test_pdf_quadrature_narrow_bump_matches_point_mass():
    quad = CLQuadratureRegularizer(1.0, uniform_bump(1.0, 1e-4), n=1)
    disc = single_laplace()
    for c in (0.0, 0.5, 3.0):
        assert quad.eval_pdf_component(0, c) == pytest.approx(
            disc.eval_pdf_component(0, c), abs=1e-6
        )


def test_prior_density_integrates_to_one():
    reg = CLDiscreteRegularizer(1.0, [1.0, 3.0], [0.5, 0.5], n=1)
    total, _ = scipy.integrate.quad(lambda c: reg.eval_pdf_component(0, c), -np.inf, np.inf)
    assert total == pytest.approx(1.0, abs=1e-8)


# -- componentwise values -------------------------------------------------------


def test_l1_component():
    reg = L1Regularizer(1.0, n=1)
    assert reg.eval_component(0, -3.0) == 3.0


def test_component_zero_is_zero():
    for reg in (L1Regularizer(1.0, n=1), single_laplace(),
                CLDiscreteRegularizer(1.0, [1.0, 4.0], [0.5, 0.5], n=1)):
        assert reg.eval_component(0, 0.0) == pytest.approx(0.0, abs=1e-14)


def test_single_atom_is_exactly_l1():
    reg = single_laplace()
    assert reg.eval_component(0, 5.0) == pytest.approx(5.0, abs=1e-10)


def test_eval_is_sum():
    reg = L1Regularizer(1.0, n=3)
    assert reg.eval(np.array([1.0, -2.0, 0.0])) == 3.0
    assert reg.eval(np.zeros(3)) == 0.0


def test_eval_symmetry_cross_check():
    reg = CLDiscreteRegularizer(1.0, [1.0, 3.0], [0.5, 0.5], n=2)
    both = reg.eval(np.array([1.0, 1.0]))
    assert both == pytest.approx(2.0 * reg.eval_component(0, 1.0), rel=1e-12)


def test_large_argument_stays_finite():
    # direct density evaluation underflows near |x| ~ 750; log-domain must not
    reg = CLDiscreteRegularizer(1.0, [1.0, 2.0], [0.5, 0.5], n=1)
    val = reg.eval_component(0, 5000.0)
    assert np.isfinite(val) and val > 2000.0


def test_rate_validation():
    with pytest.raises(InvalidSpec):
        L1Regularizer(-1.0, n=2)
    with pytest.raises(InvalidSpec):
        CLDiscreteRegularizer(1.0, [1.0, 2.0], [0.7, 0.7], n=1)


# -- weights -------------------------------------------------------------------


def test_weight_classic_irls():
    reg = L1Regularizer(1.0, n=1)
    assert reg.weight(0, 4.0) == pytest.approx(0.5, rel=1e-14)
    assert reg.weight(0, 1.0) == pytest.approx(1.0, rel=1e-14)


def test_weight_single_atom():
    assert single_laplace().weight(0, 9.0) == pytest.approx(1.0 / 3.0, abs=1e-10)


def test_weight_rejects_nonpositive():
    with pytest.raises(DegenerateInput):
        L1Regularizer(1.0, n=1).weight(0, 0.0)


# -- f reconstruction -----------------------------------------------------------


def test_l1_f_closed_form():
    f = L1Regularizer(1.0, n=1).reconstruct_f(0)
    assert f(2.0) == pytest.approx(0.5, abs=1e-8)


def test_numeric_f_matches_l1_on_single_atom():
    f = single_laplace().reconstruct_f(0)
    for u in (0.05, 0.5, 2.0, 50.0):
        assert f(u) == pytest.approx(1.0 / u, abs=1e-8)


@pytest.mark.parametrize("reg", [
    L1Regularizer(1.0, n=1),
    CLDiscreteRegularizer(1.0, [1.0, 3.0], [0.5, 0.5], n=1),
])
def test_f_derivative_weight_consistency(reg):
    # the defining condition: f'(R(sqrt(t))/t) = -t
    f = reg.reconstruct_f(0)
    for t in (0.1, 1.0, 10.0):
        u = reg.weight(0, t)
        assert f.derivative(u) == pytest.approx(-t, rel=1e-6)


def test_f_finite_difference_matches_derivative():
    reg = CLDiscreteRegularizer(1.0, [1.0, 3.0], [0.5, 0.5], n=1)
    f = reg.reconstruct_f(0)
    for u in (0.2, 1.0, 3.0):
        h = 1e-5 * u
        fd = (f(u + h) - f(u - h)) / (2.0 * h)
        assert fd == pytest.approx(f.derivative(u), rel=1e-5, abs=1e-5)


def test_non_monotone_penalty_raises():
    from gsparse.regularizers import NumericFCurve

    with pytest.raises(NotInvertible):
        NumericFCurve(lambda x: x * x)  # R(x)/x^2 constant


# -- h functions ----------------------------------------------------------------


def test_h_l1_closed_form():
    reg = L1Regularizer(1.0, n=1)
    assert reg.h_eval(0, 1.0, 0.0) == pytest.approx(1.0, rel=1e-12)
    assert reg.h_eval(0, 1.0, math.sqrt(3.0)) == pytest.approx(2.0, rel=1e-12)


def test_h_even():
    reg = CLDiscreteRegularizer(1.0, [1.0, 2.0], [0.5, 0.5], n=1)
    for x in (0.3, 1.7, 4.0):
        assert reg.h_eval(0, 0.5, -x) == pytest.approx(reg.h_eval(0, 0.5, x), rel=1e-12)


def test_h_convexity_l1():
    reg = L1Regularizer(1.0, n=1)
    grid = np.arange(-5.0, 5.0 + 0.005, 0.01)
    report = check_convexity_h(reg, 0, 1.0, grid)
    assert report.is_strictly_convex
    assert report.min_second_difference > 0


def test_h_convexity_degenerates_as_eps_vanishes():
    # at eps ~ 0, h approaches |x| away from the origin: flat second differences
    reg = L1Regularizer(1.0, n=1)
    grid = np.arange(0.5, 5.0, 0.01)
    report = check_convexity_h(reg, 0, 1e-8, grid)
    assert abs(report.min_second_difference) < 1e-9


def test_h_convexity_witness_nonnegative():
    reg = L1Regularizer(1.0, n=1)
    grid = np.arange(-3.0, 3.0 + 0.05, 0.1)
    report = check_convexity_h(reg, 0, 1e-8, grid, tol=1e-3)
    assert not report.is_strictly_convex
    assert report.witness is not None and report.witness >= 0


# -- property checks --------------------------------------------------------------


def test_properties_l1():
    report = check_properties(L1Regularizer(1.0, n=2), SampleSpec(count=2000), seed=0)
    assert report.even_ok and report.subadditive_ok and report.concave_on_positive_ok
    assert report.worst_violation <= 0.0


def test_properties_mixture():
    reg = CLDiscreteRegularizer(1.0, [1.0, 4.0], [0.5, 0.5], n=1)
    report = check_properties(reg, SampleSpec(count=10_000), seed=1)
    assert report.even_ok and report.subadditive_ok and report.concave_on_positive_ok


def test_properties_reject_quadratic_double():
    report = check_properties(QuadraticDouble(), SampleSpec(count=500), seed=2)
    assert not report.subadditive_ok
    assert report.witness is not None


def test_vector_subadditivity(rng):
    reg = CLDiscreteRegularizer(1.0, [0.5, 2.0], [0.3, 0.7], n=4)
    for _ in range(200):
        x = rng.uniform(-20, 20, 4)
        y = rng.uniform(-20, 20, 4)
        assert reg.eval(x + y) <= reg.eval(x) + reg.eval(y) + 4e-9


def test_quadrature_regularizer_matches_l1_on_grid():
    quad = CLQuadratureRegularizer(1.0, uniform_bump(1.0, 1e-4), n=1)
    for x in np.arange(-10.0, 10.0 + 0.05, 0.5):
        assert quad.eval_component(0, x) == pytest.approx(abs(x), abs=1e-6)
