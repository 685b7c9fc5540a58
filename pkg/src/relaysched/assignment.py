"""Maximum-total-benefit one-to-one assignment on benefit matrices.

Rows are candidate relays, columns are aided vehicles; entries are two-hop
service amounts.  A rectangular matrix (more relays than aided vehicles) is
squared up by appending all-zero dummy columns; rows that end up matched to a
dummy column receive no aided vehicle.  The solver converts benefit
maximization to cost minimization by subtracting every entry from the global
maximum, then runs a potentials-based shortest-augmenting-path method
(O(n^3) Kuhn-Munkres family).  Dummy columns are never materialized inside
the solver: matching all real columns against the full row set is equivalent
and much cheaper when dummies dominate.

Tie-breaking is deterministic: among equal-total matchings the solver returns
the one that, scanning real columns in ascending order, pairs each column
with the largest-index row still compatible with optimality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

_BRUTE_FORCE_CAP = 8  # factorial enumeration beyond this is pointless


@dataclass(frozen=True)
class BenefitMatrix:
    """Non-negative benefit matrix with per-column dummy flags."""

    values: np.ndarray
    col_is_dummy: np.ndarray = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError(f"benefit matrix must be 2-D, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("benefit matrix entries must be finite")
        if values.size and values.min() < 0:
            raise ValueError("benefit matrix entries must be non-negative")
        dummy = self.col_is_dummy
        if dummy is None:
            dummy = np.zeros(values.shape[1], dtype=bool)
        else:
            dummy = np.asarray(dummy, dtype=bool)
            if dummy.shape != (values.shape[1],):
                raise ValueError("col_is_dummy must have one flag per column")
            if values[:, dummy].size and values[:, dummy].max() > 0:
                raise ValueError("dummy columns must be all-zero")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "col_is_dummy", dummy)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class Assignment:
    """Chosen row per real column, plus the total benefit of the selection."""

    match: dict[int, int] = field(default_factory=dict)
    total: float = 0.0


def pad_to_square(w: BenefitMatrix) -> BenefitMatrix:
    """Append all-zero dummy columns until the matrix is square."""
    if w.rows < w.cols:
        raise ValueError(f"cannot pad {w.rows}x{w.cols}: more columns than rows")
    if w.rows == w.cols:
        return w
    extra = w.rows - w.cols
    values = np.hstack([w.values, np.zeros((w.rows, extra))])
    dummy = np.concatenate([w.col_is_dummy, np.ones(extra, dtype=bool)])
    return BenefitMatrix(values, dummy)


def _rect_min_assign(cost: np.ndarray):
    """Min-cost matching of every column to a distinct row; cost is (R, C), R >= C.

    Returns (row_for_col, u, v): the matching and the dual potentials, with
    cost[j, c] - u[c] - v[j] >= 0 everywhere and == 0 on matched pairs.
    """
    n_rows, n_cols = cost.shape
    u = np.zeros(n_cols)
    v = np.zeros(n_rows + 1)  # index n_rows is the virtual root row
    owner = np.full(n_rows + 1, -1, dtype=int)  # column currently matched to each row
    for c in range(n_cols):
        owner[n_rows] = c
        j0 = n_rows
        minv = np.full(n_rows, np.inf)
        way = np.full(n_rows, n_rows, dtype=int)
        used = np.zeros(n_rows + 1, dtype=bool)
        while True:
            used[j0] = True
            c0 = owner[j0]
            cur = cost[:, c0] - u[c0] - v[:n_rows]
            better = (~used[:n_rows]) & (cur < minv)
            minv[better] = cur[better]
            way[better] = j0
            masked = np.where(used[:n_rows], np.inf, minv)
            j1 = int(np.argmin(masked))
            delta = masked[j1]
            used_rows = used[:n_rows]
            u[owner[:n_rows][used_rows]] += delta
            if used[n_rows]:
                u[owner[n_rows]] += delta
            v[:n_rows][used_rows] -= delta
            minv[~used_rows] -= delta
            j0 = j1
            if owner[j0] == -1:
                break
        while j0 != n_rows:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1
    row_for_col = np.empty(n_cols, dtype=int)
    for j in range(n_rows):
        if owner[j] >= 0:
            row_for_col[owner[j]] = j
    return row_for_col, u, v[:n_rows]


def _max_assign(w: np.ndarray):
    """Max-benefit counterpart of `_rect_min_assign` via the max-minus conversion."""
    if w.shape[1] == 0:
        return 0.0, np.zeros(0, dtype=int)
    cost = float(w.max()) - w
    row_for_col, _, _ = _rect_min_assign(cost)
    total = 0.0
    for c in range(w.shape[1]):
        total += w[row_for_col[c], c]
    return total, row_for_col


def _canonical_match(w: np.ndarray) -> np.ndarray:
    """Optimal matching of all columns of rectangular `w` (R >= C), canonical ties.

    Scans columns in ascending order and keeps, for each, the largest-index
    row that still permits an optimal completion.  Candidate rows are pruned
    to the zero-reduced-cost edges of the dual solution (every optimal
    matching lives there), so tie-free instances cost nothing extra.
    """
    n_rows, n_cols = w.shape
    if n_cols == 0:
        return np.zeros(0, dtype=int)
    if np.all(w == w.flat[0]):
        # every matching is optimal; largest rows first, per ascending column
        return np.arange(n_rows - 1, n_rows - 1 - n_cols, -1)
    peak = float(w.max())
    cost = peak - w
    match, u, v = _rect_min_assign(cost)
    eps = 1e-9 * (1.0 + abs(peak))
    fixed = np.zeros(n_rows, dtype=bool)
    for c in range(n_cols):
        cur_row = int(match[c])
        tight = np.abs(cost[:, c] - u[c] - v) <= eps
        higher = [r for r in np.where(tight & ~fixed)[0][::-1] if r > cur_row]
        if higher:
            rem_opt = sum(w[match[k], k] for k in range(c, n_cols))
            rest_cols = list(range(c + 1, n_cols))
            for r in higher:
                rows_left = [j for j in range(n_rows) if not fixed[j] and j != r]
                sub = w[np.ix_(rows_left, rest_cols)]
                sub_total, sub_match = _max_assign(sub)
                if w[r, c] + sub_total >= rem_opt - eps:
                    match[c] = r
                    for i, k in enumerate(rest_cols):
                        match[k] = rows_left[sub_match[i]]
                    break
        fixed[match[c]] = True
    return match


def solve_max_assignment(w: BenefitMatrix) -> Assignment:
    """Perfect matching of maximal total benefit on a square benefit matrix.

    Only non-dummy columns appear in the returned match; rows left to dummy
    columns are simply absent.  The total counts real entries only (dummy
    columns contribute nothing by construction).
    """
    if w.rows != w.cols:
        raise ValueError(f"solver needs a square matrix, got {w.rows}x{w.cols}")
    real_cols = np.where(~w.col_is_dummy)[0]
    if real_cols.size == 0:
        return Assignment({}, 0.0)
    match = _canonical_match(w.values[:, real_cols])
    total = 0.0
    out = {}
    for i, c in enumerate(real_cols):
        out[int(c)] = int(match[i])
        total += w.values[match[i], c]
    return Assignment(out, float(total))


def brute_force_assignment(w: BenefitMatrix, cap: int = _BRUTE_FORCE_CAP) -> Assignment:
    """Exact maximum by enumerating row permutations; test oracle for the solver."""
    if w.rows != w.cols:
        raise ValueError(f"oracle needs a square matrix, got {w.rows}x{w.cols}")
    if w.rows > cap:
        raise ValueError(
            f"refusing brute-force enumeration at size {w.rows} (cap {cap}): "
            f"{w.rows}! permutations"
        )
    real_cols = [int(c) for c in np.where(~w.col_is_dummy)[0]]
    if not real_cols:
        return Assignment({}, 0.0)
    values = w.values.tolist()
    best = -1.0
    best_perm = None
    for perm in itertools.permutations(range(w.rows), len(real_cols)):
        s = 0.0
        for r, c in zip(perm, real_cols):
            s += values[r][c]
        if s > best:
            best = s
            best_perm = perm
    return Assignment(dict(zip(real_cols, best_perm)), best)
