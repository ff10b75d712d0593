"""Sample-complexity and error-rate calculators for learning halfspaces
from sign measurements.

Closed-form bounds only; nothing here samples or solves. Every probability
bound is evaluated in log space so that astronomically small rates survive
(m up to 1e12, dimension bounds up to 1e6 stay finite), clamped to [0, 1]
on the probability scale, and paired with a raw-log companion. "lg" means
the binary logarithm throughout; the consistent-learner rate is reported
base 2 because it is a power of two, the noisy-rate and uniform-convergence
bounds base e because their exponentials are.

Sample-size calculators return ceilings: a bound of 6211.7 samples means
6212 are enough.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .metrics import gw_alpha
from .vc_tools import vc_bounds_affine, vc_upper_bound


def _check_probability(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or not 0.0 < value < 1.0:
        raise InvalidArgumentError(f"{name} must lie strictly inside (0, 1)")
    return value


def _check_dim(d, minimum: int = 1) -> int:
    if not isinstance(d, (int, np.integer)) or d < minimum:
        raise InvalidArgumentError(f"dimension bound must be an integer >= {minimum}")
    return int(d)


def _check_samples(m, lower: float, what: str) -> float:
    m = float(m)
    if not np.isfinite(m) or m < lower:
        raise InvalidArgumentError(f"sample count must satisfy m >= {what}")
    return m


def rate_upper_log2(m, eps: float, d) -> float:
    """lg of the consistent-learner rate bound 2 (2em/d)^d 2^(-m eps / 2),
    unclamped."""
    d = _check_dim(d)
    m = _check_samples(m, d, "d")
    eps = float(eps)
    if not np.isfinite(eps) or eps <= 0:
        raise InvalidArgumentError("eps must be positive")
    return 1.0 + d * math.log2(2.0 * math.e * m / d) - m * eps / 2.0

def rate_upper(m, eps: float, d) -> float:
    """Worst-case error rate of any consistent hypothesis after m samples:
    min(1, 2 (2em/d)^d 2^(-m eps / 2)).

    The polynomial front grows until m ~ 2d/(eps ln 2) and the exponential
    then takes over, so for small m the clamp at 1 is active.
    """
    log2_value = rate_upper_log2(m, eps, d)
    if log2_value >= 0.0:
        return 1.0
    return float(2.0 ** log2_value)


def samples_sufficient(eps: float, delta: float, d) -> int:
    """Samples guaranteeing, with confidence 1 - delta, error below eps for
    every consistent learner: ceil of max((8d/eps) lg(8e/eps),
    (4/eps) lg(2/delta))."""
    eps = _check_probability(eps, "eps")
    delta = _check_probability(delta, "delta")
    d = _check_dim(d)
    accuracy_term = (8.0 * d / eps) * math.log2(8.0 * math.e / eps)
    confidence_term = (4.0 / eps) * math.log2(2.0 / delta)
    return math.ceil(max(accuracy_term, confidence_term))


def samples_necessary(eps: float, delta: float, d) -> int:
    """Information-theoretic floor no algorithm beats: ceil of
    max((d-1)/(32 eps), ((1-eps)/eps) ln(1/delta)). Needs d >= 2."""
    eps = _check_probability(eps, "eps")
    delta = _check_probability(delta, "delta")
    d = _check_dim(d, minimum=2)
    dimension_term = (d - 1) / (32.0 * eps)
    confidence_term = ((1.0 - eps) / eps) * math.log(1.0 / delta)
    return math.ceil(max(dimension_term, confidence_term))


def uniform_convergence_bound_log(m, eps: float, d) -> float:
    """ln of 4 (0.2 e m / d)^(10 d) exp(-m eps^2 / 8), unclamped."""
    d = _check_dim(d)
    m = _check_samples(m, 1, "1")
    eps = float(eps)
    if not np.isfinite(eps) or eps <= 0:
        raise InvalidArgumentError("eps must be positive")
    return (math.log(4.0) + 10.0 * d * math.log(0.2 * math.e * m / d)
            - m * eps * eps / 8.0)


def uniform_convergence_bound(m, eps: float, d) -> float:
    """Probability that some hypothesis's empirical and true risks differ by
    more than eps: min(1, 4 (0.2em/d)^(10d) exp(-m eps^2 / 8))."""
    log_value = uniform_convergence_bound_log(m, eps, d)
    if log_value >= 0.0:
        return 1.0
    return math.exp(log_value)


def noisy_rate_bound_log(m, eps: float, d) -> float:
    """ln of [4 (0.2em/d)^(10d) + 1] exp(-0.08 m eps^2), unclamped.

    The bracket's +1 rides through logaddexp; the flip probability of the
    corrupting channel does not enter the bound at all.
    """
    d = _check_dim(d)
    m = _check_samples(m, 1, "1")
    eps = float(eps)
    if not np.isfinite(eps) or eps <= 0:
        raise InvalidArgumentError("eps must be positive")
    bracket = math.log(4.0) + 10.0 * d * math.log(0.2 * math.e * m / d)
    return float(np.logaddexp(bracket, 0.0)) - 0.08 * m * eps * eps


def noisy_rate_bound(m, eps: float, d) -> float:
    """Rate bound for empirical-risk minimization under label-flip noise:
    min(1, [4 (0.2em/d)^(10d) + 1] exp(-0.08 m eps^2)).

    Decomposes as uniform_convergence_bound at accuracy 0.8 eps plus a
    exp(-2 m (0.2 eps)^2) concentration term; both carry the same
    exponential, which is where the 0.08 comes from.
    """
    log_value = noisy_rate_bound_log(m, eps, d)
    if log_value >= 0.0:
        return 1.0
    return math.exp(log_value)


@dataclass(frozen=True)
class PacQuery:
    """One learning question: accuracy eps, confidence residual delta, a
    VC-dimension bound d, and optionally a sample count m. When m is left
    None the sufficient sample size fills in."""

    accuracy: float
    confidence_residual: float
    vc_dim_bound: int
    samples: int | None = None

    def __post_init__(self) -> None:
        _check_probability(self.accuracy, "accuracy")
        _check_probability(self.confidence_residual, "confidence_residual")
        _check_dim(self.vc_dim_bound)
        if self.samples is not None:
            m = self.samples
            if not isinstance(m, (int, np.integer)) or m < 1:
                raise InvalidArgumentError("samples must be a positive integer or None")

    def sample_size(self) -> int:
        if self.samples is not None:
            return int(self.samples)
        return samples_sufficient(self.accuracy, self.confidence_residual,
                                  self.vc_dim_bound)

    def report(self) -> dict:
        """Every calculator evaluated at this query, log companions included.

        samples_necessary is None below the d >= 2 regime where its formula
        is stated.
        """
        eps = float(self.accuracy)
        delta = float(self.confidence_residual)
        d = int(self.vc_dim_bound)
        m = self.sample_size()
        necessary = samples_necessary(eps, delta, d) if d >= 2 else None
        return {
            "accuracy": eps,
            "confidence_residual": delta,
            "vc_dim_bound": d,
            "samples": m,
            "samples_sufficient": samples_sufficient(eps, delta, d),
            "samples_necessary": necessary,
            "rate_upper": rate_upper(m, eps, d) if m >= d else None,
            "rate_upper_log2": rate_upper_log2(m, eps, d) if m >= d else None,
            "uniform_convergence_bound": uniform_convergence_bound(m, eps, d),
            "uniform_convergence_bound_log": uniform_convergence_bound_log(m, eps, d),
            "noisy_rate_bound": noisy_rate_bound(m, eps, d),
            "noisy_rate_bound_log": noisy_rate_bound_log(m, eps, d),
        }


def obcs_plan(n: int, k: int, eps: float, delta: float,
              affine: bool = False) -> dict:
    """End-to-end recipe for one-bit recovery of a k-sparse direction in
    R^n: bound the halfspace class's VC dimension, size the sample, and
    translate angular accuracy eps into a Euclidean MSE guarantee.

    Returns {d_used, m_required, mse_guarantee} where mse_guarantee is
    (4 / gw_alpha()) * eps under radially invariant sampling. The numbers
    are what the theory certifies, not what solvers need in practice; the
    guarantee is honest but very conservative.
    """
    d_used = vc_bounds_affine(n, k)[1] if affine else vc_upper_bound(n, k)
    m_required = samples_sufficient(eps, delta, d_used)
    return {
        "d_used": d_used,
        "m_required": m_required,
        "mse_guarantee": (4.0 / gw_alpha()) * float(eps),
    }
