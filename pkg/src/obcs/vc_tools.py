"""VC-dimension bounds and shattering certificates for sparse halfspaces.

The concept class is the set of closed halfspaces {a : <a, x> >= 0} indexed
by k-sparse x in R^n. Lower bounds come from an explicit block witness
matrix whose columns are shattered with integer arithmetic; upper bounds
come from the closed-form count; an LP oracle decides shattering of
arbitrary point sets with an explicit margin.

lg means the binary logarithm throughout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, ResourceLimitError
from .lp import OPTIMAL, LinearProgram, solve_lp
from .sparse_core import SparseVector

DEFAULT_MARGIN = 1e-7
DEFAULT_SHATTER_BUDGET = 1_000_000
MAX_SHATTER_POINTS = 25


def _check_nk(n: int, k: int) -> None:
    if not isinstance(n, (int, np.integer)) or not isinstance(k, (int, np.integer)):
        raise InvalidArgumentError("n and k must be integers")
    if k < 1 or n < k:
        raise InvalidArgumentError(f"need 1 <= k <= n, got n={n}, k={k}")


def _floor_lg(q: int) -> int:
    # exact floor(lg q) for integers q >= 1
    return int(q).bit_length() - 1


def vc_lower_bound(n: int, k: int) -> int:
    """k * (floor(lg(n/k)) + 1), witnessed by build_witness."""
    _check_nk(n, k)
    return int(k) * (_floor_lg(n // k) + 1)


def vc_upper_bound(n: int, k: int) -> int:
    """floor(2k * lg(n e)); requires n >= 2."""
    _check_nk(n, k)
    if n < 2:
        raise InvalidArgumentError("the upper bound formula needs n >= 2")
    return math.floor(2 * int(k) * math.log2(n * math.e))


def vc_bounds_affine(n: int, k: int) -> tuple[int, int]:
    """Bounds for the offset variant: halfspaces {a : <a, x> + v >= 0}.

    The lower bound is inherited from the linear class; the upper bound is
    floor(2 (k+1) lg(e (n+1))).
    """
    _check_nk(n, k)
    upper = math.floor(2 * (int(k) + 1) * math.log2(math.e * (n + 1)))
    return vc_lower_bound(n, k), upper


def sauer_bound(d: int, l: int) -> int:
    """sum_{i=0}^{d} C(l, i): the maximum number of dichotomies of l points
    by a class of VC dimension d. Only the interesting regime l > d is
    accepted (otherwise the sum is just 2^l)."""
    if not isinstance(d, (int, np.integer)) or not isinstance(l, (int, np.integer)):
        raise InvalidArgumentError("d and l must be integers")
    if d < 1 or l <= d:
        raise InvalidArgumentError("need l > d >= 1")
    return sum(math.comb(int(l), i) for i in range(int(d) + 1))


def lemma_rearrange_holds(alpha: float, beta: float, l: int) -> bool:
    """Check the log-inequality rearrangement: whenever l <= alpha*lg(beta*l)
    the conclusion l < 2*alpha*lg(alpha*beta) must hold. Requires
    alpha*beta > 4. Vacuously true when the hypothesis fails."""
    alpha = float(alpha)
    beta = float(beta)
    if not isinstance(l, (int, np.integer)) or l < 1:
        raise InvalidArgumentError("l must be a positive integer")
    if alpha <= 0 or beta <= 0 or alpha * beta <= 4:
        raise InvalidArgumentError("need alpha, beta > 0 with alpha*beta > 4")
    if l > alpha * math.log2(beta * l):
        return True
    return l < 2 * alpha * math.log2(alpha * beta)


@dataclass(frozen=True)
class WitnessMatrix:
    """Block-diagonal matrix whose kl columns are shattered by the class.

    Each of the k blocks stacks 2^s rows: a ones column followed by every
    vector of {-1, +1}^s in lexicographic order (-1 before +1). Entries are
    integers in {-1, 0, 1}; rows beyond k * 2^s are zero padding.
    """

    matrix: np.ndarray
    n: int
    k: int
    s: int

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=np.int64).copy()
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def cols_per_block(self) -> int:
        return self.s + 1

    @property
    def rows_per_block(self) -> int:
        return 2 ** self.s

    @property
    def num_columns(self) -> int:
        return self.k * (self.s + 1)

    @property
    def points(self) -> np.ndarray:
        """The columns as an (l, n) float array of points to shatter."""
        return self.matrix.T.astype(float)


def _bipolar_rows(s: int) -> list[tuple[int, ...]]:
    # lexicographic with -1 < +1; row r encodes the binary digits of r
    return list(itertools.product((-1, 1), repeat=s))


def build_witness(n: int, k: int) -> WitnessMatrix:
    """Construct the shattered column set of size k * (floor(lg(n/k)) + 1)."""
    _check_nk(n, k)
    s = _floor_lg(n // k)
    rows = _bipolar_rows(s)
    block = np.ones((2 ** s, s + 1), dtype=np.int64)
    for r, v in enumerate(rows):
        block[r, 1:] = v
    mat = np.zeros((n, k * (s + 1)), dtype=np.int64)
    for i in range(k):
        mat[i * 2 ** s : (i + 1) * 2 ** s, i * (s + 1) : (i + 1) * (s + 1)] = block
    return WitnessMatrix(matrix=mat, n=int(n), k=int(k), s=s)


def witness_dichotomy_vector(w: WitnessMatrix, member_cols) -> SparseVector:
    """The k-sparse vector whose halfspace picks out exactly the given
    witness columns.

    Within each block, the sign pattern of the requested membership selects
    one bipolar row r; the vector puts +1 there when the block's ones
    column is a member and -1 at the complementary row otherwise. Entries
    are in {-1, 0, 1} so all inner products against witness columns are
    exactly representable.
    """
    members = set(int(c) for c in member_cols)
    if members and (min(members) < 0 or max(members) >= w.num_columns):
        raise InvalidArgumentError("member column index out of range")
    l = w.cols_per_block
    x = np.zeros(w.n)
    for i in range(w.k):
        base = i * l
        ones_in = base in members
        r = 0
        for j in range(w.s):
            want_plus = (base + 1 + j) in members
            if not ones_in:
                want_plus = not want_plus
            if want_plus:
                r |= 1 << (w.s - 1 - j)
        x[i * w.rows_per_block + r] = 1.0 if ones_in else -1.0
    return SparseVector(values=x, sparsity_budget=w.k)


def witness_shatters(w: WitnessMatrix) -> bool:
    """Exhaustively replay every dichotomy of the witness columns; inner
    products are all +/-1 (exact in floats), so membership is the strict
    sign."""
    cols = w.num_columns
    for mask in range(2 ** cols):
        members = [j for j in range(cols) if mask >> j & 1]
        x = witness_dichotomy_vector(w, members)
        prods = w.matrix.T @ x.values
        realized = prods >= 0
        expected = np.zeros(cols, dtype=bool)
        expected[members] = True
        if not np.array_equal(realized, expected):
            return False
    return True


@dataclass(frozen=True)
class ShatterInstance:
    """l points in R^n (as rows) to test against k-sparse halfspaces."""

    points: np.ndarray
    sparsity_budget: int

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise InvalidArgumentError("points must be a nonempty (l, n) array")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgumentError("points must be finite")
        k = self.sparsity_budget
        if not isinstance(k, (int, np.integer)) or k < 1 or k > pts.shape[1]:
            raise InvalidArgumentError("sparsity_budget must be in [1, n]")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "sparsity_budget", int(k))

    @property
    def num_points(self) -> int:
        return int(self.points.shape[0])

    @property
    def ambient_dim(self) -> int:
        return int(self.points.shape[1])


class _LpBudget:
    def __init__(self, budget: int):
        self.remaining = int(budget)

    def spend(self) -> None:
        self.remaining -= 1
        if self.remaining < 0:
            raise ResourceLimitError("shattering LP budget exhausted")


def _dichotomy_feasible(projected: np.ndarray, signs: np.ndarray, margin: float,
                        budget: _LpBudget) -> bool:
    """Is there x with |x|_inf <= 1 and signs_j <u_j, x> >= margin for all j?
    x is split into nonnegative parts for the LP."""
    budget.spend()
    l, k = projected.shape
    signed = projected * signs[:, None]
    a_ub = np.zeros((l + 2 * k, 2 * k))
    a_ub[:l, :k] = -signed
    a_ub[:l, k:] = signed
    a_ub[l : l + 2 * k, :] = np.eye(2 * k)
    b_ub = np.concatenate([np.full(l, -margin), np.ones(2 * k)])
    lp = LinearProgram(objective=np.zeros(2 * k), ub_matrix=a_ub, ub_rhs=b_ub)
    return solve_lp(lp).status == OPTIMAL


def _is_shattered(inst: ShatterInstance, margin: float, spend: _LpBudget) -> bool:
    if inst.num_points > MAX_SHATTER_POINTS:
        raise InvalidArgumentError(
            f"refusing to enumerate 2^{inst.num_points} dichotomies (limit {MAX_SHATTER_POINTS})")
    if margin <= 0:
        raise InvalidArgumentError("margin must be positive")
    pts = inst.points
    l = inst.num_points
    supports = itertools.combinations(range(inst.ambient_dim), inst.sparsity_budget)
    projections = [pts[:, list(s)] for s in supports]
    for mask in range(2 ** l):
        signs = np.array([1.0 if mask >> j & 1 else -1.0 for j in range(l)])
        if not any(_dichotomy_feasible(proj, signs, margin, spend)
                   for proj in projections):
            return False
    return True


def is_shattered(inst: ShatterInstance, *, margin: float = DEFAULT_MARGIN,
                 budget: int = DEFAULT_SHATTER_BUDGET) -> bool:
    """LP decision of shattering with an explicit margin.

    For every dichotomy of the points there must be a support S of size k
    and a vector x on S with <u_j, x> >= margin on the member side and
    <= -margin on the other, normalized by |x|_inf <= 1. Supports are tried
    in lexicographic order with a short-circuit on the first feasible one.
    Raises ResourceLimitError when the LP budget runs out.
    """
    return _is_shattered(inst, margin, _LpBudget(budget))


@dataclass(frozen=True)
class ShatterSearchResult:
    """Outcome of max_shattered_size.

    size is the largest certified shattered cardinality found; certificate
    holds the points. budget_exhausted marks size as a lower estimate only.
    """

    size: int
    certificate: np.ndarray
    budget_exhausted: bool


def default_candidates(n: int, k: int, l: int, count: int, seed) -> list[np.ndarray]:
    """Candidate point sets of size l: witness columns padded with random
    points first, then fresh Gaussian and sign-pattern sets."""
    rng = np.random.default_rng(seed)
    witness_pts = build_witness(n, k).points
    out = []
    for i in range(count):
        if i < count // 2 and witness_pts.shape[0] <= l:
            extra = rng.standard_normal((l - witness_pts.shape[0], n))
            cand = np.vstack([witness_pts, extra]) if extra.size else witness_pts.copy()
        elif i % 2 == 0:
            cand = rng.standard_normal((l, n))
        else:
            cand = (rng.integers(0, 2, size=(l, n)) * 2 - 1).astype(float)
        out.append(cand)
    return out


def max_shattered_size(n: int, k: int, *, candidate_generator=default_candidates,
                       budget: int = 400_000, candidates_per_level: int = 24,
                       margin: float = DEFAULT_MARGIN, seed: int = 0) -> ShatterSearchResult:
    """Search for the largest shattered point set between the closed-form
    bounds.

    The witness certifies the lower bound by exact replay. Above it, each
    level tries generated candidates with the LP oracle and the search stops
    at the first level where every candidate fails (shattering is monotone,
    so larger levels are then hopeless for these candidates) or at the upper
    bound, which no set can exceed. Only desk-scale inputs are accepted.
    """
    _check_nk(n, k)
    if n > 8 or k > 2:
        raise InvalidArgumentError("search is desk-scale only: n <= 8, k <= 2")
    w = build_witness(n, k)
    if not witness_shatters(w):
        raise AssertionError("witness replay failed; construction is broken")
    best = w.num_columns
    certificate = w.points
    upper = vc_upper_bound(n, k)
    spend = _LpBudget(budget)
    for level in range(best + 1, upper + 1):
        found = False
        for cand in candidate_generator(n, k, level, candidates_per_level,
                                        np.random.SeedSequence((seed, level))):
            inst = ShatterInstance(points=cand, sparsity_budget=k)
            try:
                ok = _is_shattered(inst, margin, spend)
            except ResourceLimitError:
                return ShatterSearchResult(size=best, certificate=certificate,
                                           budget_exhausted=True)
            if ok:
                best = level
                certificate = cand
                found = True
                break
        if not found:
            break
    return ShatterSearchResult(size=best, certificate=certificate, budget_exhausted=False)
