"""Dense two-phase simplex solver for small linear programs.

Problems are stated in maximize form over variables with per-variable bounds:

    maximize  c . x
    s.t.      a_eq @ x  = b_eq
              a_ge @ x >= b_ge
              lower <= x <= upper      (entries may be -inf / +inf)

The solver converts to standard form (shift variables with a finite lower
bound, split free variables into a nonnegative pair, turn finite upper bounds
into slack rows, give >= rows a surplus variable), then runs the textbook
two-phase tableau method:

  * Entering column: most negative reduced cost, ties to the lowest column
    index (Dantzig).  After more than 2 * (rows + columns) degenerate pivots
    within a phase, the rule switches to Bland's (lowest eligible index),
    which guarantees termination.
  * Leaving row: minimum ratio, ties to the lowest basic-variable index.
  * Pivot eligibility threshold: PIVOT_TOL = 1e-9.
  * Iteration cap: 10 * (rows + columns)^2 per solve; hitting it yields
    status "indeterminate", never a wrong verdict.

The pivot sequence is a pure function of the input, so identical problems
produce bit-identical solutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LinearProgram", "LpSolution", "solve", "coargmax_lp", "PIVOT_TOL"]

PIVOT_TOL = 1e-9
PHASE1_TOL = 1e-7


def _as_matrix(a, b, n, name):
    if a is None or (hasattr(a, "__len__") and len(a) == 0):
        if b is not None and len(b):
            raise ValueError(f"{name} rhs given without a matrix")
        return np.zeros((0, n)), np.zeros(0)
    if b is None:
        raise ValueError(f"{name} matrix given without a rhs")
    am = np.asarray(a, dtype=np.float64)
    bm = np.asarray(b, dtype=np.float64)
    if am.ndim != 2 or am.shape[1] != n:
        raise ValueError(f"{name} must be a matrix with {n} columns")
    if bm.shape != (am.shape[0],):
        raise ValueError(f"{name} rhs length {bm.shape} != {am.shape[0]} rows")
    if not (np.all(np.isfinite(am)) and np.all(np.isfinite(bm))):
        raise ValueError(f"{name} contains non-finite entries")
    return am, bm


@dataclass(frozen=True)
class LinearProgram:
    """A maximize-form LP; constraint blocks may be omitted."""

    objective: np.ndarray
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    a_ge: np.ndarray | None = None
    b_ge: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=np.float64)
        if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
            raise ValueError("objective must be a finite 1-D vector")
        n = c.shape[0]
        a_eq, b_eq = _as_matrix(self.a_eq, self.b_eq, n, "a_eq")
        a_ge, b_ge = _as_matrix(self.a_ge, self.b_ge, n, "a_ge")
        lower = (
            np.full(n, -np.inf)
            if self.lower is None
            else np.asarray(self.lower, dtype=np.float64).copy()
        )
        upper = (
            np.full(n, np.inf)
            if self.upper is None
            else np.asarray(self.upper, dtype=np.float64).copy()
        )
        if lower.shape != (n,) or upper.shape != (n,):
            raise ValueError("bounds must have one entry per variable")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
            raise ValueError("bounds may be infinite but not NaN")
        if np.any(lower > upper):
            raise ValueError("lower bound exceeds upper bound")
        for attr, val in (
            ("objective", c), ("a_eq", a_eq), ("b_eq", b_eq),
            ("a_ge", a_ge), ("b_ge", b_ge), ("lower", lower), ("upper", upper),
        ):
            val.setflags(write=False)
            object.__setattr__(self, attr, val)

    @property
    def n(self) -> int:
        return self.objective.shape[0]


@dataclass(frozen=True)
class LpSolution:
    """status is one of optimal | infeasible | unbounded | indeterminate;
    x and objective are filled only when optimal."""

    status: str
    x: np.ndarray | None
    objective: float | None
    iterations: int


def _pivot(t: np.ndarray, row: int, col: int) -> None:
    t[row] = t[row] / t[row, col]
    factors = t[:, col].copy()
    factors[row] = 0.0
    t -= np.outer(factors, t[row])
    t[:, col] = 0.0
    t[row, col] = 1.0


def _run_phase(t, basis, cost, allowed, max_iter, iteration_start):
    """Minimize cost over the current tableau.  Returns (outcome, iterations)
    where outcome is 'optimal', 'unbounded', or 'cap'."""
    m = basis.shape[0]
    ncols = t.shape[1] - 1
    # reduced-cost row
    t[m, :ncols] = cost - cost[basis] @ t[:m, :ncols]
    t[m, ncols] = -(cost[basis] @ t[:m, ncols])
    bland_after = 2 * (m + ncols)
    degenerate_pivots = 0
    iterations = iteration_start
    while True:
        if iterations >= max_iter:
            return "cap", iterations
        reduced = t[m, :ncols]
        eligible = np.flatnonzero(allowed & (reduced < -PIVOT_TOL))
        if eligible.size == 0:
            return "optimal", iterations
        if degenerate_pivots > bland_after:
            col = int(eligible[0])  # Bland: lowest eligible index
        else:
            # Dantzig: most negative reduced cost, ties to lowest index
            col = int(eligible[np.argmin(reduced[eligible])])
        pivot_col = t[:m, col]
        rows = np.flatnonzero(pivot_col > PIVOT_TOL)
        if rows.size == 0:
            return "unbounded", iterations
        ratios = t[rows, ncols] / pivot_col[rows]
        best = ratios.min()
        tied = rows[ratios <= best + PIVOT_TOL * (1.0 + abs(best))]
        row = int(tied[np.argmin(basis[tied])])
        if t[row, ncols] / t[row, col] <= PIVOT_TOL:
            degenerate_pivots += 1
        _pivot(t, row, col)
        basis[row] = col
        iterations += 1


def solve(lp: LinearProgram, max_iterations: int | None = None) -> LpSolution:
    """Solve a LinearProgram; see the module docstring for the algorithm."""
    n = lp.n
    me = lp.a_eq.shape[0]
    mi = lp.a_ge.shape[0]

    # --- standard form: x[j] = offset[j] + sum(sign * xhat[col])
    offset = np.zeros(n)
    var_cols: list[list[tuple[int, float]]] = []
    bound_rows: list[tuple[int, float]] = []  # (original var, rhs)
    ncols = 0
    for j in range(n):
        lo, hi = lp.lower[j], lp.upper[j]
        if np.isfinite(lo):
            offset[j] = lo
            var_cols.append([(ncols, 1.0)])
            ncols += 1
            if np.isfinite(hi):
                bound_rows.append((j, hi - lo))
        else:
            var_cols.append([(ncols, 1.0), (ncols + 1, -1.0)])
            ncols += 2
            if np.isfinite(hi):
                bound_rows.append((j, hi))
    nb = len(bound_rows)
    m = me + mi + nb

    ncols_all = ncols + mi + nb  # structural + surplus + slack
    mat = np.zeros((m, ncols_all))
    rhs = np.zeros(m)
    for j in range(n):
        col_eq = lp.a_eq[:, j] if me else None
        col_ge = lp.a_ge[:, j] if mi else None
        for col, sign in var_cols[j]:
            if me:
                mat[:me, col] += sign * col_eq
            if mi:
                mat[me : me + mi, col] += sign * col_ge
    if me:
        rhs[:me] = lp.b_eq - lp.a_eq @ offset
    if mi:
        rhs[me : me + mi] = lp.b_ge - lp.a_ge @ offset
        for i in range(mi):
            mat[me + i, ncols + i] = -1.0  # surplus
    for t_idx, (j, ub_rhs) in enumerate(bound_rows):
        row = me + mi + t_idx
        for col, sign in var_cols[j]:
            mat[row, col] = sign
        mat[row, ncols + mi + t_idx] = 1.0  # slack
        rhs[row] = ub_rhs

    # normalize rhs >= 0
    neg = rhs < 0.0
    mat[neg] *= -1.0
    rhs[neg] = -rhs[neg]

    # seed the basis with unit slack/surplus columns where possible
    basis = np.full(m, -1, dtype=np.int64)
    for i in range(mi):
        row = me + i
        if mat[row, ncols + i] == 1.0:  # row was negated: surplus flipped to +1
            basis[row] = ncols + i
    for t_idx in range(nb):
        row = me + mi + t_idx
        if mat[row, ncols + mi + t_idx] == 1.0:
            basis[row] = ncols + mi + t_idx

    art_rows = np.flatnonzero(basis < 0)
    n_art = art_rows.size
    total_cols = ncols_all + n_art
    tab = np.zeros((m + 1, total_cols + 1))
    tab[:m, :ncols_all] = mat
    tab[:m, total_cols] = rhs
    for a_idx, row in enumerate(art_rows):
        tab[row, ncols_all + a_idx] = 1.0
        basis[row] = ncols_all + a_idx

    if max_iterations is None:
        max_iterations = 10 * (m + total_cols) ** 2
    iterations = 0

    structural = np.zeros(total_cols, dtype=bool)
    structural[:ncols_all] = True

    if n_art:
        cost1 = np.zeros(total_cols)
        cost1[ncols_all:] = 1.0
        outcome, iterations = _run_phase(
            tab, basis, cost1, structural.copy(), max_iterations, iterations
        )
        if outcome == "cap":
            return LpSolution("indeterminate", None, None, iterations)
        if outcome == "unbounded":  # cannot happen for a sum of nonnegatives
            return LpSolution("indeterminate", None, None, iterations)
        if -tab[m, total_cols] > PHASE1_TOL:
            return LpSolution("infeasible", None, None, iterations)
        # drive leftover artificials out of the basis; drop redundant rows
        drop: list[int] = []
        for row in range(m):
            if basis[row] < ncols_all:
                continue
            candidates = np.flatnonzero(
                structural & (np.abs(tab[row, :total_cols]) > PIVOT_TOL)
            )
            if candidates.size:
                _pivot(tab, row, int(candidates[0]))
                basis[row] = int(candidates[0])
            else:
                drop.append(row)
        if drop:
            keep = np.setdiff1d(np.arange(m), np.asarray(drop))
            tab = np.vstack([tab[keep], tab[m:]])
            basis = basis[keep]
            m = basis.shape[0]

    # phase 2: minimize the negated objective over structural columns
    cost2 = np.zeros(total_cols)
    for j in range(n):
        for col, sign in var_cols[j]:
            cost2[col] += -sign * lp.objective[j]
    outcome, iterations = _run_phase(
        tab, basis, cost2, structural, max_iterations, iterations
    )
    if outcome == "cap":
        return LpSolution("indeterminate", None, None, iterations)
    if outcome == "unbounded":
        return LpSolution("unbounded", None, None, iterations)

    xhat = np.zeros(total_cols)
    xhat[basis] = tab[:m, total_cols]
    x = offset.copy()
    for j in range(n):
        for col, sign in var_cols[j]:
            x[j] += sign * xhat[col]

    # defensive residual check: downgrade rather than return a bad vertex
    scale = 1.0 + max(
        float(np.abs(lp.b_eq).max()) if me else 0.0,
        float(np.abs(lp.b_ge).max()) if mi else 0.0,
        float(np.abs(x).max()),
    )
    ok = True
    if me and np.abs(lp.a_eq @ x - lp.b_eq).max() > 1e-9 * scale:
        ok = False
    if mi and (lp.b_ge - lp.a_ge @ x).max() > 1e-9 * scale:
        ok = False
    finite_lo = np.isfinite(lp.lower)
    finite_hi = np.isfinite(lp.upper)
    if np.any(x[finite_lo] < lp.lower[finite_lo] - 1e-9 * scale):
        ok = False
    if np.any(x[finite_hi] > lp.upper[finite_hi] + 1e-9 * scale):
        ok = False
    if not ok:
        return LpSolution("indeterminate", None, None, iterations)

    x.setflags(write=False)
    return LpSolution("optimal", x, float(lp.objective @ x), iterations)


def coargmax_lp(unembeddings, i: int, j: int, t_cap: float = 1e6) -> LinearProgram:
    """LP deciding whether labels i and j can tie for the highest score.

    Variables are an embedding point f (one per dimension) and a margin t:

        maximize  t
        s.t.      (g_i - g_j) . f  = 0
                  (g_i - g_k) . f >= t   for every other label k
                  -1 <= f_m <= 1,  t <= t_cap

    The target set {f : f.g_i = f.g_j > f.g_k} is a cone: if f works then so
    does any positive multiple.  Restricting f to the unit box therefore
    loses no verdicts, and it makes the LP bounded.  t caps at t_cap so the
    two-label case (no competing constraints) stays bounded too.
    """
    g = unembeddings.vectors
    k, d = g.shape
    if i == j:
        raise ValueError("need two distinct label indices")
    if not (0 <= i < k and 0 <= j < k):
        raise IndexError(f"label indices ({i}, {j}) out of range for k={k}")
    others = [m for m in range(k) if m not in (i, j)]
    c = np.zeros(d + 1)
    c[d] = 1.0
    a_eq = np.zeros((1, d + 1))
    a_eq[0, :d] = g[i] - g[j]
    b_eq = np.zeros(1)
    a_ge = np.zeros((len(others), d + 1))
    for row, m in enumerate(others):
        a_ge[row, :d] = g[i] - g[m]
        a_ge[row, d] = -1.0
    b_ge = np.zeros(len(others))
    lower = np.concatenate([np.full(d, -1.0), [-np.inf]])
    upper = np.concatenate([np.full(d, 1.0), [float(t_cap)]])
    return LinearProgram(c, a_eq, b_eq, a_ge, b_ge, lower, upper)
