"""Dense two-phase simplex solver.

Problems are stated as

    minimize    objective . x
    subject to  eq_matrix x  = eq_rhs
                ub_matrix x <= ub_rhs
                x_j >= lower_bounds_j

where a lower bound of -inf marks a free variable. Free variables are split
into differences of nonnegative parts, finite bounds are shifted out, and
inequality rows receive slack columns, giving the usual all-nonnegative
standard form.

The entering column is the most negative reduced cost (lowest index on
ties). The leaving row is chosen by the lexicographic ratio test, keyed on
the rhs column and then the current basis columns in row order: this is the
classical symbolic perturbation, it cannot cycle, and it walks out of the
heavily degenerate vertices that the hard-constraint recovery programs
start at (hundreds of tight rows at the origin), where an index-based
anti-cycling rule stalls for astronomically many pivots. Every choice is
deterministic, so repeated solves of the same program pivot identically.

Rows whose columns contain a singleton positive entry (slack columns, or
decision columns that appear in only one constraint) are used as a starting
basis, so phase one runs only for rows that genuinely need an artificial
variable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import blas as _blas

from .errors import InvalidArgumentError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"

_ENTER_TOL = 1e-9
_PIVOT_TOL = 1e-9
_RATIO_TIE_TOL = 1e-10


def _as_matrix(arg, name: str) -> np.ndarray:
    arr = np.asarray(arg, dtype=float)
    if arr.ndim != 2:
        raise InvalidArgumentError(f"{name} must be 2-d, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} entries must be finite")
    return arr


def _as_vector(arg, name: str) -> np.ndarray:
    arr = np.asarray(arg, dtype=float)
    if arr.ndim != 1:
        raise InvalidArgumentError(f"{name} must be 1-d, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} entries must be finite")
    return arr


@dataclass(frozen=True)
class LinearProgram:
    """Immutable LP data. Matrices may be None when a block is absent."""

    objective: np.ndarray
    eq_matrix: np.ndarray | None = None
    eq_rhs: np.ndarray | None = None
    ub_matrix: np.ndarray | None = None
    ub_rhs: np.ndarray | None = None
    lower_bounds: np.ndarray | None = None

    def __post_init__(self) -> None:
        c = _as_vector(self.objective, "objective")
        d = c.size
        if d == 0:
            raise InvalidArgumentError("objective must have at least one entry")

        def lock(name, arr):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

        lock("objective", c)
        if (self.eq_matrix is None) != (self.eq_rhs is None):
            raise InvalidArgumentError("eq_matrix and eq_rhs must be given together")
        if (self.ub_matrix is None) != (self.ub_rhs is None):
            raise InvalidArgumentError("ub_matrix and ub_rhs must be given together")
        if self.eq_matrix is not None:
            a = _as_matrix(self.eq_matrix, "eq_matrix")
            b = _as_vector(self.eq_rhs, "eq_rhs")
            if a.shape != (b.size, d):
                raise InvalidArgumentError(
                    f"eq block shape mismatch: {a.shape} vs rhs {b.size}, vars {d}")
            lock("eq_matrix", a)
            lock("eq_rhs", b)
        if self.ub_matrix is not None:
            a = _as_matrix(self.ub_matrix, "ub_matrix")
            b = _as_vector(self.ub_rhs, "ub_rhs")
            if a.shape != (b.size, d):
                raise InvalidArgumentError(
                    f"ub block shape mismatch: {a.shape} vs rhs {b.size}, vars {d}")
            lock("ub_matrix", a)
            lock("ub_rhs", b)
        if self.lower_bounds is not None:
            lb = np.asarray(self.lower_bounds, dtype=float)
            if lb.shape != (d,):
                raise InvalidArgumentError(
                    f"lower_bounds must have shape ({d},), got {lb.shape}")
            # -inf marks a free variable; +inf and nan are never valid
            if np.any(np.isnan(lb)) or np.any(lb == np.inf):
                raise InvalidArgumentError("lower_bounds must be finite or -inf")
            lock("lower_bounds", lb)

    @property
    def num_variables(self) -> int:
        return int(self.objective.size)

    @property
    def num_constraints(self) -> int:
        rows = 0
        if self.eq_rhs is not None:
            rows += self.eq_rhs.size
        if self.ub_rhs is not None:
            rows += self.ub_rhs.size
        return rows


@dataclass(frozen=True)
class LpSolution:
    """Solver outcome. x and objective are None unless status is optimal.

    residual is the largest violation of the original constraints at x
    (nan when there is no x); iterations counts pivots across both phases.
    """

    status: str
    x: np.ndarray | None
    objective: float | None
    iterations: int
    residual: float = float("nan")


class _Tableau:
    """Dense simplex tableau with the cost row last and the rhs column last.

    The pivot update is a rank-1 BLAS call on the transposed view, which is
    Fortran-contiguous for a C-ordered array and therefore updates in place.
    The first pivot verifies the aliasing and falls back to a buffered numpy
    update if the BLAS refused to work in place.
    """

    def __init__(self, body: np.ndarray, basis: np.ndarray):
        self.T = np.ascontiguousarray(body)
        self.basis = basis
        self._inplace_checked = False
        self._use_blas = True

    @property
    def num_rows(self) -> int:
        return self.T.shape[0] - 1

    @property
    def num_cols(self) -> int:
        return self.T.shape[1] - 1

    def pivot(self, r: int, c: int) -> None:
        T = self.T
        T[r] /= T[r, c]
        col = T[:, c].copy()
        col[r] = 0.0
        if self._use_blas:
            res = _blas.dger(-1.0, T[r], col, a=T.T, overwrite_a=1,
                             overwrite_x=0, overwrite_y=0)
            if not self._inplace_checked:
                self._inplace_checked = True
                if not np.shares_memory(res, T):
                    self._use_blas = False
                    T -= np.outer(col, T[r])
        else:
            T -= np.outer(col, T[r])
        self.basis[r] = c

    def price_out(self, cost: np.ndarray) -> None:
        """Install a cost row and eliminate the basic columns from it."""
        T = self.T
        T[-1, :] = 0.0
        T[-1, : cost.size] = cost
        for i, b in enumerate(self.basis):
            cb = T[-1, b]
            if cb != 0.0:
                T[-1] -= cb * T[i]

    def _lex_leaving(self, col: np.ndarray, eligible: np.ndarray,
                     lex_cols: tuple) -> int:
        """Lexicographic ratio test: the rhs ratio first, ties broken by the
        ratios of the phase-start basis columns in row order.

        Those columns form an identity when the phase begins (every row is
        lexicographically positive) and evolve into the basis inverse as
        pivots proceed, so the test is the classical symbolic perturbation
        and no basis can repeat within a phase.
        """
        T = self.T
        cand = np.flatnonzero(eligible)
        for j in lex_cols:
            keys = T[cand, j] / col[cand]
            kmin = keys.min()
            cand = cand[keys <= kmin + _RATIO_TIE_TOL * max(1.0, abs(kmin))]
            if cand.size == 1:
                return int(cand[0])
        # numerically identical over every key; any deterministic pick works
        return int(cand[np.argmin(self.basis[cand])])

    def iterate(self, limit: int) -> tuple[str, int]:
        """Run pivots until optimal/unbounded or the iteration limit."""
        T = self.T
        m = self.num_rows
        ncols = self.num_cols
        lex_cols = (ncols, *self.basis.tolist())
        it = 0
        while True:
            if it >= limit:
                return ITERATION_LIMIT, it
            costs = T[m, :ncols]
            c = int(np.argmin(costs))
            if costs[c] >= -_ENTER_TOL:
                return OPTIMAL, it
            col = T[:m, c]
            eligible = col > _PIVOT_TOL
            if not eligible.any():
                return UNBOUNDED, it
            r = self._lex_leaving(col, eligible, lex_cols)
            self.pivot(r, c)
            it += 1


def _standardize(lp: LinearProgram):
    """Return (G, h, c_std, const, mapping) with all variables >= 0.

    mapping carries what is needed to rebuild an original solution:
    (d, shift, free_idx) where x = y[:d] + shift and x[free] -= y_neg.
    """
    c = lp.objective
    d = c.size
    lb = lp.lower_bounds if lp.lower_bounds is not None else np.zeros(d)
    free = np.isneginf(lb)
    shift = np.where(free, 0.0, lb)

    blocks = []
    rhs = []
    n_eq = 0
    if lp.eq_matrix is not None:
        blocks.append(lp.eq_matrix)
        rhs.append(lp.eq_rhs - lp.eq_matrix @ shift)
        n_eq = lp.eq_rhs.size
    if lp.ub_matrix is not None:
        blocks.append(lp.ub_matrix)
        rhs.append(lp.ub_rhs - lp.ub_matrix @ shift)
    if blocks:
        G0 = np.vstack(blocks)
        h = np.concatenate(rhs)
    else:
        G0 = np.zeros((0, d))
        h = np.zeros(0)
    m = G0.shape[0]
    n_ub = m - n_eq

    free_idx = np.flatnonzero(free)
    parts = [G0]
    if free_idx.size:
        parts.append(-G0[:, free_idx])
    slack = np.zeros((m, n_ub))
    if n_ub:
        slack[n_eq:, :] = np.eye(n_ub)
        parts.append(slack)
    G = np.hstack(parts) if m else np.zeros((0, d + free_idx.size + n_ub))

    c_std = np.concatenate([c, -c[free_idx], np.zeros(n_ub)])
    const = float(c @ shift)
    return G, h, c_std, const, (d, shift, free_idx)


def _recover_x(y: np.ndarray, mapping) -> np.ndarray:
    d, shift, free_idx = mapping
    x = y[:d] + shift
    if free_idx.size:
        x[free_idx] -= y[d : d + free_idx.size]
    return x


def _feasibility_residual(lp: LinearProgram, x: np.ndarray) -> float:
    res = 0.0
    if lp.eq_matrix is not None:
        res = max(res, float(np.max(np.abs(lp.eq_matrix @ x - lp.eq_rhs))))
    if lp.ub_matrix is not None:
        viol = lp.ub_matrix @ x - lp.ub_rhs
        if viol.size:
            res = max(res, float(max(0.0, viol.max())))
    lb = lp.lower_bounds if lp.lower_bounds is not None else np.zeros(x.size)
    gap = np.where(np.isneginf(lb), 0.0, lb - x)
    if gap.size:
        res = max(res, float(max(0.0, gap.max())))
    return res


def solve_lp(lp: LinearProgram, *, tolerance: float = 1e-8,
             max_iterations: int | None = None) -> LpSolution:
    """Solve the program; see the module docstring for the pivoting rules.

    max_iterations defaults to 10 * (variables + constraints) of the
    standardized program, so split halves and slack columns count; the
    budget spans both phases. Hitting the cap returns status
    iteration_limit rather than a possibly non-optimal point.
    """
    if tolerance <= 0:
        raise InvalidArgumentError("tolerance must be positive")
    G, h, c_std, const, mapping = _standardize(lp)
    m, n_total = G.shape
    if max_iterations is None:
        max_iterations = 10 * (n_total + m)
    if max_iterations < 1:
        raise InvalidArgumentError("max_iterations must be positive")

    flip = h < 0
    if flip.any():
        G = G.copy()
        h = h.copy()
        G[flip] *= -1.0
        h[flip] *= -1.0

    # crash basis: singleton positive columns (slacks, per-row hinge columns)
    basis = np.full(m, -1, dtype=np.int64)
    nnz = np.count_nonzero(G, axis=0)
    for j in np.flatnonzero(nnz == 1):
        i = int(np.flatnonzero(G[:, j])[0])
        if basis[i] == -1 and G[i, j] > _PIVOT_TOL:
            basis[i] = int(j)
    art_rows = np.flatnonzero(basis == -1)
    n_art = art_rows.size

    body = np.zeros((m + 1, n_total + n_art + 1))
    body[:m, :n_total] = G
    body[:m, -1] = h
    for t, i in enumerate(art_rows):
        basis[i] = n_total + t
        body[i, n_total + t] = 1.0
    tab = _Tableau(body, basis)
    # scale rows so every basic column is an exact unit column
    for i in range(m):
        piv = tab.T[i, basis[i]]
        if piv != 1.0:
            tab.T[i] /= piv

    used = 0
    if n_art:
        phase1_cost = np.zeros(n_total + n_art)
        phase1_cost[n_total:] = 1.0
        tab.price_out(phase1_cost)
        status, its = tab.iterate(max_iterations)
        used += its
        if status == ITERATION_LIMIT:
            return LpSolution(ITERATION_LIMIT, None, None, used)
        if -tab.T[-1, -1] > tolerance:
            return LpSolution(INFEASIBLE, None, None, used)
        # drive leftover artificials out of the basis; drop redundant rows
        dead = []
        for i in range(m):
            if tab.basis[i] >= n_total:
                row = tab.T[i, :n_total]
                cands = np.flatnonzero(np.abs(row) > _PIVOT_TOL)
                if cands.size:
                    tab.pivot(i, int(cands[0]))
                else:
                    dead.append(i)
        if dead:
            tab.T = np.delete(tab.T, dead, axis=0)
            tab.basis = np.delete(tab.basis, dead)
            m -= len(dead)
        tab.T = np.ascontiguousarray(np.delete(tab.T, np.s_[n_total:-1], axis=1))
        tab._inplace_checked = False

    tab.price_out(c_std)
    status, its = tab.iterate(max_iterations - used)
    used += its
    if status != OPTIMAL:
        return LpSolution(status, None, None, used)

    y = np.zeros(n_total)
    y[tab.basis] = tab.T[:m, -1]
    x = _recover_x(y, mapping)
    objective = float(lp.objective @ x)
    residual = _feasibility_residual(lp, x)
    return LpSolution(OPTIMAL, x, objective, used, residual)
