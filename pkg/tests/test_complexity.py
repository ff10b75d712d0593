"""Closed-form sample-size and rate calculators.

Expected numerals were computed independently with 60-digit arithmetic from
the stated formulas and frozen here; equality is exact for the integer
calculators and to float precision for the log-scale ones.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from obcs.complexity import (
    PacQuery,
    noisy_rate_bound,
    noisy_rate_bound_log,
    obcs_plan,
    rate_upper,
    rate_upper_log2,
    samples_necessary,
    samples_sufficient,
    uniform_convergence_bound,
    uniform_convergence_bound_log,
)
from obcs.errors import InvalidArgumentError
from obcs.metrics import gw_alpha

probabilities = st.floats(min_value=1e-6, max_value=1.0 - 1e-6)


def test_samples_sufficient_frozen_values():
    assert samples_sufficient(0.1, 0.1, 10) == 6212
    assert samples_sufficient(0.1, 1e-9, 1) == 1236


def test_samples_necessary_frozen_values():
    assert samples_necessary(0.1, 0.1, 10) == 21
    assert samples_necessary(0.01, 0.5, 66) == 204


def test_rate_upper_log2_frozen_value():
    assert rate_upper_log2(2000, 0.2, 5) == pytest.approx(
        -143.56724384668155, rel=1e-14)


def test_uniform_convergence_log_frozen_value():
    assert uniform_convergence_bound_log(1e6, 0.1, 1) == pytest.approx(
        -1116.5529791835784, rel=1e-14)


def test_noisy_rate_log_frozen_value():
    assert noisy_rate_bound_log(1e6, 0.1, 1) == pytest.approx(
        -666.5529791835784, rel=1e-14)


def test_plan_frozen_values():
    plan = obcs_plan(1000, 20, 0.1, 0.1)
    assert plan["d_used"] == 456
    assert plan["m_required"] == 283254
    assert plan["mse_guarantee"] == pytest.approx(0.45528674114653234, rel=1e-14)


def test_plan_affine_frozen_values():
    plan = obcs_plan(1000, 20, 0.1, 0.1, affine=True)
    assert plan["d_used"] == 479
    assert plan["m_required"] == 297541
    assert plan["mse_guarantee"] == pytest.approx(0.45528674114653234, rel=1e-14)


def test_plan_guarantee_is_the_angular_conversion():
    plan = obcs_plan(100, 3, 0.05, 0.2)
    assert plan["mse_guarantee"] == (4.0 / gw_alpha()) * 0.05


def test_rate_upper_matches_its_log_companion():
    log2_value = rate_upper_log2(2000, 0.2, 5)
    assert rate_upper(2000, 0.2, 5) == 2.0 ** log2_value


def test_rate_upper_clamps_to_one_for_small_samples():
    assert rate_upper_log2(10, 0.1, 10) > 0.0
    assert rate_upper(10, 0.1, 10) == 1.0


def test_uniform_convergence_matches_its_log_companion():
    log_value = uniform_convergence_bound_log(1e6, 0.1, 1)
    assert uniform_convergence_bound(1e6, 0.1, 1) == math.exp(log_value)
    assert uniform_convergence_bound(100, 0.1, 5) == 1.0


def test_noisy_rate_matches_its_log_companion():
    log_value = noisy_rate_bound_log(1e6, 0.1, 1)
    assert noisy_rate_bound(1e6, 0.1, 1) == math.exp(log_value)
    assert noisy_rate_bound(100, 0.1, 5) == 1.0


def test_noisy_rate_decomposition():
    # the noisy bound is the uniform-convergence bound at accuracy 0.8 eps
    # plus a bare concentration exponential, on the unclamped scale
    for m, eps, d in [(5000, 0.2, 3), (1e5, 0.1, 7), (2e6, 0.05, 1)]:
        lhs = noisy_rate_bound_log(m, eps, d)
        rhs = np.logaddexp(uniform_convergence_bound_log(m, 0.8 * eps, d),
                           -0.08 * m * eps * eps)
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_huge_arguments_stay_finite():
    assert math.isfinite(rate_upper_log2(1e12, 0.01, 1_000_000))
    assert math.isfinite(noisy_rate_bound_log(1e12, 0.01, 1_000_000))
    assert math.isfinite(uniform_convergence_bound_log(1e12, 0.01, 1_000_000))
    assert 0.0 <= rate_upper(1e12, 0.01, 1_000_000) <= 1.0
    assert 0.0 <= noisy_rate_bound(1e12, 0.01, 1_000_000) <= 1.0


@given(eps=probabilities, delta=probabilities,
       d=st.integers(min_value=2, max_value=10_000))
def test_necessary_never_exceeds_sufficient(eps, delta, d):
    assert samples_necessary(eps, delta, d) <= samples_sufficient(eps, delta, d)


@given(eps=probabilities, delta=probabilities,
       d1=st.integers(min_value=1, max_value=10_000),
       d2=st.integers(min_value=1, max_value=10_000))
def test_sufficient_monotone_in_dimension(eps, delta, d1, d2):
    lo, hi = sorted((d1, d2))
    assert samples_sufficient(eps, delta, lo) <= samples_sufficient(eps, delta, hi)


@given(e1=probabilities, e2=probabilities, delta=probabilities,
       d=st.integers(min_value=1, max_value=10_000))
def test_sufficient_antitone_in_accuracy(e1, e2, delta, d):
    lo, hi = sorted((e1, e2))
    assert samples_sufficient(lo, delta, d) >= samples_sufficient(hi, delta, d)


@given(eps=probabilities, d1=probabilities, d2=probabilities,
       d=st.integers(min_value=1, max_value=10_000))
def test_sufficient_antitone_in_confidence_residual(eps, d1, d2, d):
    lo, hi = sorted((d1, d2))
    assert samples_sufficient(eps, lo, d) >= samples_sufficient(eps, hi, d)


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.3])
@pytest.mark.parametrize("delta", [0.01, 0.2])
@pytest.mark.parametrize("d", [2, 10, 66])
def test_sufficient_sample_size_achieves_the_target_rate(eps, delta, d):
    m = samples_sufficient(eps, delta, d)
    assert rate_upper(m, eps, d) <= delta


def test_probability_preconditions():
    for bad in (0.0, 1.0, -0.1, 1.5, math.nan):
        with pytest.raises(InvalidArgumentError):
            samples_sufficient(bad, 0.1, 5)
        with pytest.raises(InvalidArgumentError):
            samples_sufficient(0.1, bad, 5)


def test_dimension_preconditions():
    with pytest.raises(InvalidArgumentError):
        samples_sufficient(0.1, 0.1, 0)
    with pytest.raises(InvalidArgumentError):
        samples_necessary(0.1, 0.1, 1)
    with pytest.raises(InvalidArgumentError):
        rate_upper_log2(100, 0.1, 2.5)


def test_rate_needs_enough_samples():
    with pytest.raises(InvalidArgumentError):
        rate_upper_log2(5, 0.1, 10)
    with pytest.raises(InvalidArgumentError):
        rate_upper(5, 0.1, 10)


def test_eps_must_be_positive_for_rates():
    with pytest.raises(InvalidArgumentError):
        rate_upper(100, 0.0, 5)
    with pytest.raises(InvalidArgumentError):
        noisy_rate_bound(100, -0.1, 5)


def test_query_fills_in_the_sufficient_sample_size():
    q = PacQuery(accuracy=0.1, confidence_residual=0.1, vc_dim_bound=10)
    assert q.sample_size() == 6212
    q2 = PacQuery(accuracy=0.1, confidence_residual=0.1, vc_dim_bound=10,
                  samples=500)
    assert q2.sample_size() == 500


def test_query_validation():
    with pytest.raises(InvalidArgumentError):
        PacQuery(accuracy=0.0, confidence_residual=0.1, vc_dim_bound=10)
    with pytest.raises(InvalidArgumentError):
        PacQuery(accuracy=0.1, confidence_residual=0.1, vc_dim_bound=10,
                 samples=0)


def test_query_report_fields():
    rep = PacQuery(accuracy=0.1, confidence_residual=0.1, vc_dim_bound=10).report()
    assert rep["samples"] == rep["samples_sufficient"] == 6212
    assert rep["samples_necessary"] == 21
    assert rep["rate_upper"] == rate_upper(6212, 0.1, 10)
    assert rep["rate_upper_log2"] < 0.0
    assert rep["noisy_rate_bound_log"] == noisy_rate_bound_log(6212, 0.1, 10)
    assert set(rep) == {
        "accuracy", "confidence_residual", "vc_dim_bound", "samples",
        "samples_sufficient", "samples_necessary", "rate_upper",
        "rate_upper_log2", "uniform_convergence_bound",
        "uniform_convergence_bound_log", "noisy_rate_bound",
        "noisy_rate_bound_log",
    }


def test_query_report_below_the_necessary_regime():
    rep = PacQuery(accuracy=0.1, confidence_residual=0.1, vc_dim_bound=1).report()
    assert rep["samples_necessary"] is None


def test_query_report_skips_rate_when_samples_are_too_few():
    rep = PacQuery(accuracy=0.1, confidence_residual=0.1, vc_dim_bound=10,
                   samples=5).report()
    assert rep["rate_upper"] is None and rep["rate_upper_log2"] is None
