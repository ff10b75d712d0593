"""Error measures for one-bit recovery.

The headline quantity is the disagreement probability J between the
halfspaces of an estimate and the truth. Under any radially invariant row
distribution J has the closed form arccos(<u, v>)/pi on the normalized
pair, and the expected one-bit Hamming distance rho equals 2J. Under a
symmetric flip channel with rate alpha the noisy disagreement satisfies
J_N = alpha + (1 - 2 alpha) J.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateInputError, InvalidArgumentError
from .measurement import NoiseChannel, SamplingDistribution, apply_channel, measure, sample_rows
from .sparse_core import SparseVector, as_float_vector, truncate_top_k


def _unit(v, name: str) -> np.ndarray:
    vec = v.values if isinstance(v, SparseVector) else as_float_vector(v, name)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise DegenerateInputError(f"{name} is the zero vector; its direction is undefined")
    return vec / norm


def gen_error_closed_form(xhat, x) -> float:
    """J = arccos(<u, v>)/pi on the normalized pair; valid for radially
    invariant sampling. The inner product is clamped to [-1, 1]."""
    u = _unit(xhat, "xhat")
    v = _unit(x, "x")
    if u.size != v.size:
        raise InvalidArgumentError("xhat and x must share a dimension")
    t = float(np.clip(u @ v, -1.0, 1.0))
    return math.acos(t) / math.pi


def gen_error_monte_carlo(xhat, x, dist: SamplingDistribution, trials: int, seed) -> float:
    """Empirical fraction of rows whose one-bit measurements of xhat and x
    disagree."""
    if trials < 1:
        raise InvalidArgumentError("trials must be positive")
    u = _unit(xhat, "xhat")
    v = _unit(x, "x")
    if u.size != v.size:
        raise InvalidArgumentError("xhat and x must share a dimension")
    rows, _ = sample_rows(dist, trials, u.size, seed)
    return float(np.mean(measure(u, rows) != measure(v, rows)))


def noisy_risk(xhat, x, dist: SamplingDistribution, channel: NoiseChannel,
               trials: int, seed: int) -> float:
    """Monte Carlo estimate of the disagreement against channel-corrupted
    labels of x.

    The row stream is keyed by seed exactly as in gen_error_monte_carlo and
    the flip stream by a spawned child, so a zero-rate channel reproduces
    gen_error_monte_carlo(xhat, x, dist, trials, seed) to the bit.
    """
    if trials < 1:
        raise InvalidArgumentError("trials must be positive")
    u = _unit(xhat, "xhat")
    v = _unit(x, "x")
    if u.size != v.size:
        raise InvalidArgumentError("xhat and x must share a dimension")
    rows, _ = sample_rows(dist, trials, u.size, int(seed))
    flip_seed = np.random.SeedSequence(int(seed)).spawn(1)[0]
    observed = apply_channel(measure(v, rows), channel, flip_seed)
    return float(np.mean(measure(u, rows) != observed))


def empirical_risk(labels, predictions) -> float:
    """Fraction of positions where two bipolar label vectors disagree."""
    p = np.asarray(labels)
    o = np.asarray(predictions)
    if p.shape != o.shape or p.ndim != 1 or p.size == 0:
        raise InvalidArgumentError("label vectors must be 1-d, nonempty, same length")
    for arr in (p, o):
        if not np.all(np.isin(arr, (-1, 1))):
            raise InvalidArgumentError("labels must be +1 or -1")
    return float(np.mean(p != o))


@lru_cache(maxsize=1)
def gw_minimum() -> tuple[float, float]:
    """Minimizer and minimum of (2/pi) * theta / (1 - cos theta) over
    (0, 2 pi). The minimum is the constant linking angular error to
    Euclidean error; the function blows up at both ends of the interval
    and equals 1 at theta = pi."""
    f = lambda th: (2.0 / math.pi) * th / (1.0 - math.cos(th))
    grid = np.linspace(0.5, 2.0 * math.pi, 2048, endpoint=False)
    coarse = grid[int(np.argmin([f(t) for t in grid]))]
    res = minimize_scalar(f, bounds=(coarse - 0.02, coarse + 0.02), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.x), float(res.fun)


def gw_alpha() -> float:
    """The angular-to-Euclidean constant, about 0.8785672."""
    return gw_minimum()[1]


@dataclass(frozen=True)
class EuclideanBound:
    """lhs = ||u - v||^2 on the normalized pair, rhs = (4/alpha) J."""

    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + 1e-9


def euclidean_bound_check(xhat, x) -> EuclideanBound:
    """Squared-distance bound on the unit sphere implied by J."""
    u = _unit(xhat, "xhat")
    v = _unit(x, "x")
    if u.size != v.size:
        raise InvalidArgumentError("xhat and x must share a dimension")
    lhs = float(np.sum((u - v) ** 2))
    rhs = (4.0 / gw_alpha()) * gen_error_closed_form(u, v)
    return EuclideanBound(lhs=lhs, rhs=rhs)


@dataclass(frozen=True)
class ErrorReport:
    """Recovery quality summary.

    direction_defined is False when the estimate is the zero vector; the
    angular fields are then None. noisy_risk_JN is filled only when a
    channel is supplied to recovery_report.
    """

    mse: float
    support_hits: int
    gen_error_J: float | None
    rho: float | None
    direction_defined: bool
    noisy_risk_JN: float | None = None

    def to_dict(self) -> dict:
        return {
            "mse": self.mse,
            "support_hits": self.support_hits,
            "gen_error_J": self.gen_error_J,
            "rho": self.rho,
            "direction_defined": self.direction_defined,
            "noisy_risk_JN": self.noisy_risk_JN,
        }


def recovery_report(estimate, truth, k: int, *, dist: SamplingDistribution | None = None,
                    channel: NoiseChannel | None = None, trials: int = 100_000,
                    seed=0) -> ErrorReport:
    """Score an estimate against the truth.

    mse is the mean squared entrywise error on the raw vectors;
    support_hits counts true support indices among the k largest-magnitude
    estimate entries; the angular fields use the closed form. Passing a
    channel (with a distribution) adds the Monte Carlo noisy risk.
    """
    est = estimate.values if isinstance(estimate, SparseVector) else as_float_vector(estimate, "estimate")
    tru = truth.values if isinstance(truth, SparseVector) else as_float_vector(truth, "truth")
    if est.size != tru.size:
        raise InvalidArgumentError("estimate and truth must share a dimension")
    if not isinstance(k, (int, np.integer)) or k < 1 or k > tru.size:
        raise InvalidArgumentError("k must be an integer in [1, dim]")
    mse = float(np.sum((est - tru) ** 2) / est.size)
    top = truncate_top_k(est, int(k))
    truth_support = set(np.flatnonzero(tru).tolist())
    hits = len(truth_support.intersection(top.support.tolist()))
    if np.count_nonzero(est) == 0:
        return ErrorReport(mse=mse, support_hits=hits, gen_error_J=None, rho=None,
                           direction_defined=False)
    j = gen_error_closed_form(est, tru)
    jn = None
    if channel is not None:
        if dist is None:
            raise InvalidArgumentError("noisy risk needs a sampling distribution")
        jn = noisy_risk(est, tru, dist, channel, trials, seed)
    return ErrorReport(mse=mse, support_hits=hits, gen_error_J=j, rho=2.0 * j,
                       direction_defined=True, noisy_risk_JN=jn)
