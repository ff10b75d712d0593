"""Recovery programs for one-bit measurements.

Four linear programs over the split representation z = z+ - z- (and
v = v+ - v- when offsets are in play):

  l1svm          minimize (1-lambda) * sum(slack) + lambda * |z|_1
                 subject to a hinge row per measurement,
                 -y_i <a_i, z> - s_i <= -1.
  l1svm-affine   same with <a_i, z> + b_i v inside the hinge and an extra
                 tau * |v| cost.
  pv             minimize |z|_1 subject to y_i <a_i, z> >= 0 and
                 sum_i y_i <a_i, z> = m.
  ksw            pv with the offset term and tau * |v|.

The slack programs are always feasible; the hard-constraint baselines
report infeasible on sign-inconsistent data, which is the point of
carrying them. Affine solves return the point estimate z/v once |v| clears
the tolerance, otherwise the solution is flagged direction-only and the
raw direction is returned unscaled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .lp import OPTIMAL, LinearProgram, LpSolution, solve_lp
from .measurement import MeasurementSet
from .sparse_core import SparseVector, truncate_top_k

METHOD_L1SVM = "l1svm"
METHOD_L1SVM_AFFINE = "l1svm-affine"
METHOD_PV = "pv"
METHOD_KSW = "ksw"
METHODS = (METHOD_L1SVM, METHOD_L1SVM_AFFINE, METHOD_PV, METHOD_KSW)


@dataclass(frozen=True)
class RecoveryConfig:
    """Knobs shared by the recovery programs.

    lambda_weight trades hinge slack against |z|_1 and must sit strictly
    inside (0, 1); tau prices the offset coefficient in the affine
    programs. truncation_k, when set, hard-thresholds the final estimate.
    tolerance is used both as the LP feasibility tolerance and as the
    |v| threshold below which an affine solve is direction-only.
    """

    lambda_weight: float = 0.05
    tau: float = 1.0
    truncation_k: int | None = None
    tolerance: float = 1e-8
    max_iterations: int | None = None

    def __post_init__(self) -> None:
        lw = self.lambda_weight
        if not np.isfinite(lw) or not 0.0 < float(lw) < 1.0:
            raise InvalidArgumentError("lambda_weight must lie strictly inside (0, 1)")
        if not np.isfinite(self.tau) or self.tau <= 0:
            raise InvalidArgumentError("tau must be positive")
        if not np.isfinite(self.tolerance) or self.tolerance <= 0:
            raise InvalidArgumentError("tolerance must be positive")
        k = self.truncation_k
        if k is not None and (not isinstance(k, (int, np.integer)) or k < 1):
            raise InvalidArgumentError("truncation_k must be a positive integer or None")
        mi = self.max_iterations
        if mi is not None and (not isinstance(mi, (int, np.integer)) or mi < 1):
            raise InvalidArgumentError("max_iterations must be a positive integer or None")


@dataclass(frozen=True)
class RecoverySolution:
    """What a recovery program produced.

    estimate is the final (possibly divided and truncated) point estimate;
    raw_estimate keeps the program's untruncated z. offset_coefficient is
    the fitted v for affine programs and None otherwise. direction_only
    marks affine solutions whose |v| was too small to divide by. On an
    infeasible program the estimate is the zero vector and the objective
    is +inf.
    """

    estimate: SparseVector
    raw_estimate: np.ndarray
    offset_coefficient: float | None
    objective_value: float
    iterations_used: int
    converged: bool
    status: str
    slack_total: float
    direction_only: bool = False

    def __post_init__(self) -> None:
        raw = np.asarray(self.raw_estimate, dtype=float).copy()
        raw.setflags(write=False)
        object.__setattr__(self, "raw_estimate", raw)
        if self.slack_total < 0:
            raise InvalidArgumentError("slack_total must be nonnegative")


def _require_offsets(ms: MeasurementSet, expected: bool) -> None:
    if expected and ms.offsets is None:
        raise InvalidArgumentError("this program needs measurement offsets")
    if not expected and ms.offsets is not None:
        raise InvalidArgumentError("this program takes offset-free measurements")


def build_l1svm_program(ms: MeasurementSet, cfg: RecoveryConfig,
                        *, affine: bool = False) -> LinearProgram:
    """Hinge program over [z+, z-, (v+, v-,) s]; one slack per row."""
    m, n = ms.count, ms.dim
    y = ms.labels.astype(float)
    ya = ms.rows * y[:, None]
    nv = 2 * n + (2 if affine else 0)
    cost = np.empty(nv + m)
    cost[: 2 * n] = cfg.lambda_weight
    if affine:
        cost[2 * n : nv] = cfg.tau
    cost[nv:] = 1.0 - cfg.lambda_weight
    g = np.zeros((m, nv + m))
    g[:, :n] = -ya
    g[:, n : 2 * n] = ya
    if affine:
        yb = y * ms.offsets
        g[:, 2 * n] = -yb
        g[:, 2 * n + 1] = yb
    g[:, nv:] = -np.eye(m)
    return LinearProgram(objective=cost, ub_matrix=g, ub_rhs=-np.ones(m))


def build_pv_program(ms: MeasurementSet, tau: float = 1.0,
                     *, affine: bool = False) -> tuple[LinearProgram, int]:
    """Hard-constraint program with the normalization equality eliminated.

    Written directly, every sign row of min |z|_1 s.t. y_i <a_i, z> >= 0,
    sum_i y_i <a_i, z> = m passes through the origin, so a simplex start
    there is totally degenerate and crawls. Solving the equality for the
    coordinate with the largest column sum and substituting it into the
    sign rows moves generic nonzero values onto the right-hand side,
    which removes that degeneracy. Variables are [u+, u-, p, q] where u
    stacks the kept coordinates of [z] (or [z, v] when affine) and p - q
    reconstructs the eliminated one; its |.| cost rides on the pair.

    Returns the program and the index of the eliminated coordinate. When
    every equality coefficient is zero no coordinate can be eliminated
    and the index is -1: the returned program keeps the raw split layout
    with the unsatisfiable row 0 = m, which phase one reports infeasible.
    """
    m, n = ms.count, ms.dim
    y = ms.labels.astype(float)
    cone = ms.rows * y[:, None]
    weights = np.ones(n)
    if affine:
        cone = np.hstack([cone, (y * ms.offsets)[:, None]])
        weights = np.append(weights, float(tau))
    nu = cone.shape[1]
    s = cone.sum(axis=0)
    jstar = int(np.argmax(np.abs(s)))
    if s[jstar] == 0.0:
        cost = np.concatenate([weights, weights])
        g = np.hstack([-cone, cone])
        eq = np.zeros((1, 2 * nu))
        lp = LinearProgram(objective=cost, eq_matrix=eq,
                           eq_rhs=np.array([float(m)]),
                           ub_matrix=g, ub_rhs=np.zeros(m))
        return lp, -1
    sj = s[jstar]
    keep = np.arange(nu) != jstar
    srest = s[keep]
    scale = float(m) / sj
    body = cone[:, keep] - np.outer(cone[:, jstar] / sj, srest)
    shift = cone[:, jstar] * scale
    r = nu - 1
    cost = np.concatenate([weights[keep], weights[keep],
                           [weights[jstar], weights[jstar]]])
    g = np.zeros((m, 2 * r + 2))
    g[:, :r] = -body
    g[:, r : 2 * r] = body
    eq = np.zeros((1, 2 * r + 2))
    eq[0, :r] = srest / sj
    eq[0, r : 2 * r] = -srest / sj
    eq[0, 2 * r] = 1.0
    eq[0, 2 * r + 1] = -1.0
    lp = LinearProgram(objective=cost, eq_matrix=eq, eq_rhs=np.array([scale]),
                       ub_matrix=g, ub_rhs=shift)
    return lp, jstar


def _split(x: np.ndarray, n: int, affine: bool) -> tuple[np.ndarray, float | None]:
    z = x[:n] - x[n : 2 * n]
    v = float(x[2 * n] - x[2 * n + 1]) if affine else None
    return z, v


def _unsubstitute(x: np.ndarray, nu: int, pivot: int) -> np.ndarray:
    """Rebuild the stacked coordinate vector from a hard-program solution."""
    if pivot < 0:
        return x[:nu] - x[nu : 2 * nu]
    r = nu - 1
    kept = x[:r] - x[r : 2 * r]
    eliminated = float(x[2 * r] - x[2 * r + 1])
    return np.insert(kept, pivot, eliminated)


def _point_estimate(z: np.ndarray, v: float | None, k: int | None,
                    tolerance: float) -> tuple[SparseVector, bool]:
    direction_only = False
    point = z
    if v is not None:
        if abs(v) <= tolerance:
            direction_only = True
        else:
            point = z / v
    if k is not None:
        return truncate_top_k(point, k), direction_only
    return SparseVector(values=point), direction_only


def _failed(ms: MeasurementSet, sol: LpSolution, k: int | None,
            with_offset: bool) -> RecoverySolution:
    return RecoverySolution(
        estimate=SparseVector(values=np.zeros(ms.dim), sparsity_budget=k),
        raw_estimate=np.zeros(ms.dim),
        offset_coefficient=0.0 if with_offset else None,
        objective_value=float("inf"),
        iterations_used=sol.iterations,
        converged=False,
        status=sol.status,
        slack_total=0.0,
    )


def _solve_hinge(ms: MeasurementSet, cfg: RecoveryConfig, affine: bool) -> RecoverySolution:
    lp = build_l1svm_program(ms, cfg, affine=affine)
    sol = solve_lp(lp, tolerance=cfg.tolerance, max_iterations=cfg.max_iterations)
    if sol.x is None:
        return _failed(ms, sol, cfg.truncation_k, affine)
    z, v = _split(sol.x, ms.dim, affine)
    slack = float(np.sum(sol.x[2 * ms.dim + (2 if affine else 0) :]))
    estimate, direction_only = _point_estimate(z, v, cfg.truncation_k, cfg.tolerance)
    return RecoverySolution(
        estimate=estimate,
        raw_estimate=z,
        offset_coefficient=v,
        objective_value=float(sol.objective),
        iterations_used=sol.iterations,
        converged=sol.status == OPTIMAL,
        status=sol.status,
        slack_total=max(slack, 0.0),
        direction_only=direction_only,
    )


def recover_l1svm(ms: MeasurementSet, cfg: RecoveryConfig = RecoveryConfig()) -> RecoverySolution:
    """Slack-based sparse recovery from offset-free sign measurements.

    Always feasible: z = 0 with unit slacks satisfies every hinge row, so
    label noise degrades the objective instead of killing the program.
    """
    _require_offsets(ms, expected=False)
    return _solve_hinge(ms, cfg, affine=False)


def recover_l1svm_affine(ms: MeasurementSet, cfg: RecoveryConfig = RecoveryConfig()) -> RecoverySolution:
    """Slack-based recovery from offset sign measurements; fits (z, v) and
    returns z/v once |v| exceeds cfg.tolerance."""
    _require_offsets(ms, expected=True)
    return _solve_hinge(ms, cfg, affine=True)


def _solve_hard(ms: MeasurementSet, tau: float, affine: bool, k: int | None,
                tolerance: float, max_iterations: int | None) -> RecoverySolution:
    lp, pivot = build_pv_program(ms, tau, affine=affine)
    sol = solve_lp(lp, tolerance=tolerance, max_iterations=max_iterations)
    if sol.x is None:
        return _failed(ms, sol, k, affine)
    stacked = _unsubstitute(sol.x, ms.dim + (1 if affine else 0), pivot)
    z = stacked[: ms.dim]
    v = float(stacked[ms.dim]) if affine else None
    estimate, direction_only = _point_estimate(z, v, k, tolerance)
    return RecoverySolution(
        estimate=estimate,
        raw_estimate=z,
        offset_coefficient=v,
        objective_value=float(sol.objective),
        iterations_used=sol.iterations,
        converged=sol.status == OPTIMAL,
        status=sol.status,
        slack_total=0.0,
        direction_only=direction_only,
    )


def recover_pv(ms: MeasurementSet, *, tolerance: float = 1e-8,
               max_iterations: int | None = None) -> RecoverySolution:
    """Minimum-|z|_1 point consistent with every sign, pinned away from
    zero by the equality row. Reports infeasible on sign-inconsistent
    (noisy) data; that fragility is the documented contrast with the
    slack programs."""
    _require_offsets(ms, expected=False)
    return _solve_hard(ms, 1.0, False, None, tolerance, max_iterations)


def recover_ksw(ms: MeasurementSet, tau: float = 1.0, *, tolerance: float = 1e-8,
                max_iterations: int | None = None) -> RecoverySolution:
    """Hard-constraint recovery with offsets: minimize |z|_1 + tau |v|
    under the sign and normalization constraints, then divide by v."""
    _require_offsets(ms, expected=True)
    if not np.isfinite(tau) or tau <= 0:
        raise InvalidArgumentError("tau must be positive")
    return _solve_hard(ms, float(tau), True, None, tolerance, max_iterations)


def recover(ms: MeasurementSet, method: str,
            cfg: RecoveryConfig = RecoveryConfig()) -> RecoverySolution:
    """Dispatch by method name; the hard-constraint baselines take tau and
    tolerances from cfg and apply cfg.truncation_k like the rest."""
    if method == METHOD_L1SVM:
        return recover_l1svm(ms, cfg)
    if method == METHOD_L1SVM_AFFINE:
        return recover_l1svm_affine(ms, cfg)
    if method in (METHOD_PV, METHOD_KSW):
        affine = method == METHOD_KSW
        _require_offsets(ms, expected=affine)
        return _solve_hard(ms, cfg.tau, affine, cfg.truncation_k,
                           cfg.tolerance, cfg.max_iterations)
    raise InvalidArgumentError(f"unknown method {method!r}; expected one of {METHODS}")
