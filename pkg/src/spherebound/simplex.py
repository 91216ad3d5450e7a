"""Dense two-phase simplex solver with Bland's pivoting rule.

Solves   minimize c.x  subject to  a.x {<=, >=, =} b  and  x >= 0.

Bland's rule (lowest-index entering column; ties in the ratio test broken
by the lowest basic-variable index) makes the solve deterministic for
identical inputs and immune to cycling, at some cost in pivot count. All
tableau updates are dense NumPy row operations.

:func:`lp_solve_with_duals` additionally reports one multiplier per
constraint, with the marginal-value sign convention for a minimization:
nonpositive for binding ``<=`` rows, nonnegative for binding ``>=`` rows.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "LPError",
    "InfeasibleError",
    "UnboundedError",
    "lp_solve",
    "lp_solve_with_duals",
    "Relation",
]

Relation = str  # one of "<=", ">=", "="

_PIVOT_TOL = 1e-11
_COST_TOL = 1e-11
_FEAS_TOL = 1e-8
_REPRICE_EVERY = 64
_STALL_LIMIT = 50
_MAX_PIVOTS = 200_000


class LPError(Exception):
    """Base class for linear-program failures."""


class InfeasibleError(LPError):
    """The constraint system has no nonnegative solution."""


class UnboundedError(LPError):
    """The objective is unbounded below on the feasible region."""


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    basis[row] = col


def _price_out(T: np.ndarray, cost: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Reduced-cost row (with the negated objective value in the last slot)."""
    z = cost.copy()
    for i, j in enumerate(basis):
        if j >= 0 and cost[j] != 0.0:
            z -= cost[j] * T[i]
    return z


def _choose_leaving(T: np.ndarray, basis: np.ndarray, col: np.ndarray, ncols: int) -> int:
    """Ratio test with lexicographic tie-breaking.

    Rows must clear a pivot threshold scaled to the column's magnitude, so
    the update never divides by an entry that is tiny relative to its
    column. Among (near-)minimal ratios the leaving row is the
    lexicographically smallest scaled row, which prevents cycling on
    degenerate vertices; any remaining exact tie falls back to the lowest
    basic-variable index.
    """
    colmax = float(col.max()) if col.size else 0.0
    thr = max(_PIVOT_TOL, 1e-7 * colmax)
    eligible = np.flatnonzero(col > thr)
    if eligible.size == 0:
        return -1
    rhs = np.maximum(T[eligible, -1], 0.0)
    ratios = rhs / col[eligible]
    rmin = float(ratios.min())
    tie = eligible[ratios <= rmin + 1e-9 * (1.0 + abs(rmin))]
    if tie.size > 1:
        for j in range(ncols):
            vals = T[tie, j] / col[tie]
            vmin = float(vals.min())
            tie = tie[vals <= vmin + 1e-12 * (1.0 + abs(vmin))]
            if tie.size == 1:
                break
    if tie.size > 1:
        tie = tie[np.argsort(basis[tie], kind="stable")[:1]]
    return int(tie[0])


def _iterate(T: np.ndarray, cost: np.ndarray, basis: np.ndarray, ncols: int) -> np.ndarray:
    """Pivot until no reduced cost is negative; returns the final cost row.

    Entering column: most negative reduced cost, first index on ties. If a
    run of ``_STALL_LIMIT`` pivots makes no objective progress (a long
    degenerate plateau), the entering rule degrades to first-negative-index
    for the rest of the call; combined with the lexicographic leaving rule
    this keeps the walk finite. The incremental reduced-cost update is
    re-derived from scratch every ``_REPRICE_EVERY`` pivots, and once more
    before declaring optimality or unboundedness, so accumulated roundoff
    cannot steer the column choice.
    """
    z = _price_out(T, cost, basis)
    since_reprice = 0
    stalled = 0
    first_index_mode = False
    pivots = 0
    while True:
        enter = -1
        if first_index_mode:
            for j in range(ncols):
                if z[j] < -_COST_TOL:
                    enter = j
                    break
        else:
            j = int(np.argmin(z[:ncols]))
            if z[j] < -_COST_TOL:
                enter = j
        if enter < 0:
            if since_reprice == 0:
                return z
            z = _price_out(T, cost, basis)
            since_reprice = 0
            continue
        leave = _choose_leaving(T, basis, T[:, enter], ncols)
        if leave < 0:
            if since_reprice > 0:
                z = _price_out(T, cost, basis)
                since_reprice = 0
                continue
            raise UnboundedError(f"column {enter} is unbounded")
        obj_before = -z[-1]
        _pivot(T, basis, leave, enter)
        z -= z[enter] * T[leave]
        since_reprice += 1
        pivots += 1
        if -z[-1] < obj_before - 1e-12 * (1.0 + abs(obj_before)):
            stalled = 0
        else:
            stalled += 1
            if stalled >= _STALL_LIMIT:
                first_index_mode = True
        if since_reprice >= _REPRICE_EVERY:
            z = _price_out(T, cost, basis)
            since_reprice = 0
        if pivots > _MAX_PIVOTS:
            raise LPError(f"no convergence within {_MAX_PIVOTS} pivots")


def _solve(objective, constraints):
    """Shared two-phase core; returns the final state for solution and
    multiplier extraction."""
    c = np.asarray(objective, dtype=np.float64)
    if c.ndim != 1:
        raise ValueError("objective must be a 1-D vector")
    n = c.size
    if not np.all(np.isfinite(c)):
        raise ValueError("objective coefficients must be finite")

    rows = []
    rels = []
    rhs = []
    for coeffs, rel, b in constraints:
        a = np.asarray(coeffs, dtype=np.float64)
        if a.shape != (n,):
            raise ValueError("constraint length does not match objective")
        if rel not in ("<=", ">=", "="):
            raise ValueError(f"unknown relation {rel!r}")
        if not (np.all(np.isfinite(a)) and np.isfinite(b)):
            raise ValueError("constraint coefficients must be finite")
        rows.append(a)
        rels.append(rel)
        rhs.append(float(b))
    m = len(rows)
    if m == 0:
        if np.any(c < -_COST_TOL):
            raise UnboundedError("no constraints bound a negative-cost variable")
        return np.zeros(n), np.zeros(0), n, [], [], np.zeros(0, dtype=bool), []

    A = np.vstack(rows)
    b = np.asarray(rhs)

    # Normalize to equalities with nonnegative rhs: slack +1 for <=,
    # surplus -1 for >=, none for =; then flip rows with negative rhs.
    slack_rows = []
    slack_sign = []
    for i, rel in enumerate(rels):
        if rel == "<=":
            slack_rows.append(i)
            slack_sign.append(1.0)
        elif rel == ">=":
            slack_rows.append(i)
            slack_sign.append(-1.0)
    ns = len(slack_rows)
    S = np.zeros((m, ns))
    for j, (i, sgn) in enumerate(zip(slack_rows, slack_sign)):
        S[i, j] = sgn
    M = np.hstack([A, S])
    flip = b < 0
    M[flip] *= -1.0
    b = np.abs(b)

    # Rows whose slack entered with +1 and was not flipped start basic;
    # everything else gets an artificial variable.
    basic_slack = {}
    for j, (i, sgn) in enumerate(zip(slack_rows, slack_sign)):
        if sgn > 0 and not flip[i]:
            basic_slack[i] = n + j
    art_rows = [i for i in range(m) if i not in basic_slack]
    na = len(art_rows)
    Art = np.zeros((m, na))
    for j, i in enumerate(art_rows):
        Art[i, j] = 1.0

    T = np.hstack([M, Art, b[:, None]])
    ncols = n + ns + na
    basis = np.empty(m, dtype=np.int64)
    for i in range(m):
        basis[i] = basic_slack.get(i, 0)
    for j, i in enumerate(art_rows):
        basis[i] = n + ns + j

    if na > 0:
        phase1_cost = np.zeros(ncols + 1)
        phase1_cost[n + ns : n + ns + na] = 1.0
        z = _iterate(T, phase1_cost, basis, ncols)
        if -z[-1] > _FEAS_TOL:
            raise InfeasibleError(f"phase-1 optimum {-z[-1]:.3e} > 0")
        # Drive surviving artificials out of the basis; a row with no
        # eligible pivot column is redundant and can be zeroed.
        for i in range(T.shape[0]):
            if basis[i] >= n + ns:
                pivot_col = -1
                for j in range(n + ns):
                    if abs(T[i, j]) > _PIVOT_TOL:
                        pivot_col = j
                        break
                if pivot_col >= 0:
                    _pivot(T, basis, i, pivot_col)
                else:
                    T[i, :] = 0.0
                    basis[i] = -1

    # Phase 2 on the original objective; artificial columns never enter
    # (they are excluded from the scan range).
    phase2_cost = np.zeros(ncols + 1)
    phase2_cost[:n] = c
    z = _iterate(T, phase2_cost, basis, n + ns)

    x = np.zeros(ncols)
    for i, j in enumerate(basis):
        if j >= 0:
            x[j] = T[i, -1]
    return x, z, n, slack_rows, slack_sign, flip, art_rows


def lp_solve(objective, constraints) -> np.ndarray:
    """Minimize ``objective . x`` over x >= 0 subject to ``constraints``.

    ``constraints`` is a list of ``(coefficients, relation, rhs)`` triples
    with relation one of ``"<="``, ``">="``, ``"="``. Returns the optimal x.
    Raises :class:`InfeasibleError` or :class:`UnboundedError`.
    """
    x, _, n, *_ = _solve(objective, constraints)
    return x[:n].copy()


def lp_solve_with_duals(objective, constraints):
    """Like :func:`lp_solve`, also returning one multiplier per constraint.

    The multiplier y_i is the marginal change of the optimum per unit of
    rhs_i. It is read off the final reduced-cost row: the slack column of
    row i carries z = -sign*y_i (row flips cancel), the artificial column
    of an equality row carries z = -y_i in the flipped frame.
    """
    x, z, n, slack_rows, slack_sign, flip, art_rows = _solve(objective, constraints)
    m = len(flip)
    y = np.zeros(m)
    if m:
        ns = len(slack_rows)
        slack_set = set(slack_rows)
        for j, (i, sgn) in enumerate(zip(slack_rows, slack_sign)):
            y[i] = -sgn * z[n + j]
        for j, i in enumerate(art_rows):
            if i in slack_set:
                continue
            y[i] = z[n + ns + j] if flip[i] else -z[n + ns + j]
    return x[:n].copy(), y
