import math

import numpy as np
import pytest
from scipy import integrate, special

from mlfrac.models import MLBranch, MLParams, PrecisionFlag, SeriesControl
from mlfrac.services.errors import (
    DomainError,
    GammaOverflowError,
    MLOverflowError,
    PoleError,
)
from mlfrac.services.mlcore import gamma_fn, ml_deriv, ml_eval, ml_eval_array, mittag_leffler


def erfc_form(z):
    """E_{1/2}(z) = exp(z^2) erfc(-z)."""
    return math.exp(z * z) * special.erfc(-z)


# Test gamma values and guards
def test_gamma_values():
    assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-14)
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma_fn(-0.5) == pytest.approx(-2.0 * math.sqrt(math.pi), rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, -7.0])
def test_gamma_poles(x):
    with pytest.raises(PoleError):
        gamma_fn(x)


def test_gamma_overflow():
    with pytest.raises(GammaOverflowError):
        gamma_fn(172.0)


# Test printed base values
@pytest.mark.parametrize("alpha,expected", [
    (1.0, 2.7183),
    (0.5, 5.009),
    (0.1, 23.1605),
])
def test_base_values(alpha, expected):
    assert mittag_leffler(alpha, 1.0) == pytest.approx(expected, rel=5e-4)


def test_exponential_identity():
    for z in [-3.0, -0.5, 0.3, 2.0, 10.0]:
        assert mittag_leffler(1.0, z) == pytest.approx(math.exp(z), rel=1e-12)


def test_half_order_erfc_identity():
    for z in [-4.0, -1.0, 0.5, 1.0, 3.0]:
        assert mittag_leffler(0.5, z) == pytest.approx(erfc_form(z), rel=1e-11)


def test_erfc_identity_by_quadrature():
    # e * erfc(-1) = e * (1 + 2/sqrt(pi) * int_0^1 exp(-s^2) ds)
    integral, _ = integrate.quad(lambda s: math.exp(-s * s), 0.0, 1.0)
    expected = math.e * (1.0 + 2.0 / math.sqrt(math.pi) * integral)
    assert mittag_leffler(0.5, 1.0) == pytest.approx(expected, rel=1e-10)


def test_two_parameter_identities():
    # E_2(z) = cosh(sqrt(z)), E_{1,2}(z) = (e^z - 1) / z
    assert mittag_leffler(2.0, 4.0) == pytest.approx(math.cosh(2.0), rel=1e-13)
    assert mittag_leffler(1.0, 2.0, beta=2.0) == pytest.approx((math.exp(2.0) - 1.0) / 2.0, rel=1e-13)


def test_value_at_zero():
    value = ml_eval(MLParams(alpha=0.3), 0.0)
    assert value.value == 1.0
    assert value.terms_used == 1
    assert ml_eval(MLParams(alpha=0.3, beta=3.0), 0.0).value == pytest.approx(0.5)


def test_beta_one_is_default():
    a = ml_eval(MLParams(alpha=0.7), 1.3)
    b = ml_eval(MLParams(alpha=0.7, beta=1.0), 1.3)
    assert a.value == b.value


# Test branch selection on the negative axis
def test_exponential_branch():
    value = ml_eval(MLParams(alpha=1.0), -20.0)
    assert value.branch == MLBranch.EXPONENTIAL
    assert value.value == pytest.approx(math.exp(-20.0), rel=1e-15)


def test_asymptotic_branch():
    value = ml_eval(MLParams(alpha=0.5), -20.0)
    assert value.branch == MLBranch.ASYMPTOTIC
    assert value.precision_flag == PrecisionFlag.OK
    assert value.value == pytest.approx(special.erfcx(20.0), rel=1e-10)


def test_cancelling_series_is_resummed():
    value = ml_eval(MLParams(alpha=0.5), -6.0)
    assert value.branch == MLBranch.EXTENDED
    assert value.precision_flag == PrecisionFlag.OK
    assert value.value == pytest.approx(special.erfcx(6.0), rel=1e-11)


def test_cancellation_flagged_without_resummation():
    ctrl = SeriesControl(extended_precision=False, cancel_ratio_limit=1e3)
    value = ml_eval(MLParams(alpha=0.5), -6.0, ctrl)
    assert value.branch == MLBranch.SERIES
    assert value.precision_flag == PrecisionFlag.DEGRADED


def test_overflow_above_z_max():
    with pytest.raises(MLOverflowError):
        ml_eval(MLParams(alpha=1.0), 60.0)


def test_non_finite_argument():
    with pytest.raises(DomainError):
        ml_eval(MLParams(alpha=0.5), math.nan)


# Test monotonicity for 0 < alpha <= 1
@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7, 0.9, 1.0])
def test_strictly_increasing(alpha):
    zs = np.linspace(-8.0, 1.0, 37)
    values = ml_eval_array(MLParams(alpha=alpha), zs)
    assert np.all(np.diff(values) > 0)


# Test the derivative against central differences
@pytest.mark.parametrize("alpha,z", [(0.5, 0.7), (0.8, -2.0), (1.0, 1.5), (0.6, -15.0)])
def test_derivative_matches_difference(alpha, z):
    params = MLParams(alpha=alpha)
    step = 1e-5 * max(1.0, abs(z))
    numeric = (ml_eval(params, z + step).value - ml_eval(params, z - step).value) / (2 * step)
    assert ml_deriv(params, z).value == pytest.approx(numeric, rel=1e-6)


def test_array_helper_shape():
    zs = np.array([[0.0, 0.5], [1.0, -1.0]])
    out = ml_eval_array(MLParams(alpha=1.0), zs)
    assert out.shape == (2, 2)
    assert out[1, 0] == pytest.approx(math.e, rel=1e-14)


@pytest.mark.parametrize("alpha", [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])
def test_value_at_zero_for_every_order(alpha):
    assert ml_eval(MLParams(alpha=alpha), 0.0).value == 1.0


def test_order_one_matches_exp_on_grid():
    zs = np.linspace(-20.0, 20.0, 401)
    values = ml_eval_array(MLParams(alpha=1.0), zs)
    np.testing.assert_allclose(values, np.exp(zs), rtol=1e-12)


# Test the positive axis up to z_max
@pytest.mark.parametrize("alpha", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])
def test_positive_axis_is_finite_or_overflows(alpha):
    params = MLParams(alpha=alpha)
    last = 0.0
    overflowed = False
    for z in np.linspace(0.05, 50.0, 120):
        try:
            value = ml_eval(params, float(z)).value
        except MLOverflowError:
            overflowed = True
            continue
        assert not overflowed, (alpha, z)
        assert math.isfinite(value) and value > last, (alpha, z)
        last = value


def test_half_order_far_along_positive_axis():
    # E_{1/2}(20) = exp(400) erfc(-20), beyond a 500-term window
    value = ml_eval(MLParams(alpha=0.5), 20.0)
    assert value.terms_used > 500
    assert value.value == pytest.approx(math.exp(400.0) * special.erfc(-20.0), rel=1e-11)


def test_small_order_overflow_below_z_max():
    with pytest.raises(MLOverflowError):
        ml_eval(MLParams(alpha=0.1), 5.0)
    assert math.isfinite(ml_eval(MLParams(alpha=0.1), 1.9).value)
