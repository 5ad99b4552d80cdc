"""Dense two-phase simplex with Bland's anti-cycling rule.

Sized for the small programs used here (tens of variables). Pivoting is done
on a float tableau; the final basic solution is recomputed from the original
data with a direct solve so the returned point is as accurate as the basis
allows. Callers that need certainty re-check results in exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-12
DEFAULT_MAX_PIVOTS = 10**6


class LpError(ValueError):
    pass


class IterationLimitError(LpError):
    pass


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[float, ...]
    relation: str  # "<=", ">=", "="
    rhs: float

    def __post_init__(self) -> None:
        if self.relation not in ("<=", ">=", "="):
            raise LpError(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "coeffs", tuple(float(a) for a in self.coeffs))
        object.__setattr__(self, "rhs", float(self.rhs))

    def residual(self, x: Sequence[float]) -> float:
        """Amount of violation at ``x`` (0 when satisfied)."""
        lhs = math.fsum(a * v for a, v in zip(self.coeffs, x))
        if self.relation == "<=":
            return max(0.0, lhs - self.rhs)
        if self.relation == ">=":
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass(frozen=True)
class LpProblem:
    """``max c.x`` (or min) subject to linear constraints and variable bounds.

    ``bounds`` defaults to ``[0, inf)`` for every variable.
    """

    objective: tuple[float, ...]
    constraints: tuple[Constraint, ...] = ()
    bounds: tuple[tuple[float, float], ...] | None = None
    maximize: bool = True

    def __post_init__(self) -> None:
        k = len(self.objective)
        object.__setattr__(self, "objective", tuple(float(c) for c in self.objective))
        cons = tuple(c if isinstance(c, Constraint) else Constraint(*c) for c in self.constraints)
        object.__setattr__(self, "constraints", cons)
        for c in cons:
            if len(c.coeffs) != k:
                raise LpError(f"constraint has {len(c.coeffs)} coefficients, expected {k}")
            if not all(math.isfinite(a) for a in c.coeffs) or not math.isfinite(c.rhs):
                raise LpError("constraint coefficients must be finite")
        if not all(math.isfinite(c) for c in self.objective):
            raise LpError("objective coefficients must be finite")
        if self.bounds is None:
            object.__setattr__(self, "bounds", tuple((0.0, math.inf) for _ in range(k)))
        else:
            bnds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
            if len(bnds) != k:
                raise LpError(f"{len(bnds)} bounds for {k} variables")
            object.__setattr__(self, "bounds", bnds)

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def max_violation(self, x: Sequence[float]) -> float:
        worst = max((c.residual(x) for c in self.constraints), default=0.0)
        for v, (lo, hi) in zip(x, self.bounds):
            worst = max(worst, lo - v if v < lo else 0.0, v - hi if v > hi else 0.0)
        return worst

    def value(self, x: Sequence[float]) -> float:
        return math.fsum(c * v for c, v in zip(self.objective, x))


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal", "infeasible", "unbounded"
    point: tuple[float, ...] = ()
    value: float = math.nan
    pivots: int = field(default=0, compare=False)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


# ---------------------------------------------------------------------------


def _standard_form(problem: LpProblem):
    """Rewrite as ``max cy s.t. A y (rel) b, y >= 0`` with ``x = T y + x0``."""
    k = problem.num_vars
    cols: list[tuple[int, float]] = []  # (original var, sign)
    x0 = np.zeros(k)
    extra: list[tuple[int, float]] = []
    for j, (lo, hi) in enumerate(problem.bounds):
        if lo > hi:
            return None
        if math.isfinite(lo):
            x0[j] = lo
            cols.append((j, 1.0))
            if math.isfinite(hi):
                extra.append((len(cols) - 1, hi - lo))
        elif math.isfinite(hi):
            x0[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    K = len(cols)
    T = np.zeros((k, K))
    for a, (j, s) in enumerate(cols):
        T[j, a] = s
    rows, rels, rhs = [], [], []
    for c in problem.constraints:
        a = np.array(c.coeffs)
        rows.append(a @ T)
        rels.append(c.relation)
        rhs.append(c.rhs - float(a @ x0))
    for a_col, ub in extra:
        r = np.zeros(K)
        r[a_col] = 1.0
        rows.append(r)
        rels.append("<=")
        rhs.append(ub)
    c = np.array(problem.objective) @ T
    if not problem.maximize:
        c = -c
    A = np.array(rows).reshape(len(rows), K)
    return A, rels, np.array(rhs, dtype=float), c, T, x0


class _Tableau:
    def __init__(self, tab: np.ndarray, basis: list[int], max_pivots: int):
        self.tab = tab
        self.basis = basis
        self.pivots = 0
        self.max_pivots = max_pivots

    def pivot(self, r: int, j: int) -> None:
        tab = self.tab
        tab[r] /= tab[r, j]
        col = tab[:, j].copy()
        col[r] = 0.0
        tab -= np.outer(col, tab[r])
        tab[:, j] = 0.0
        tab[r, j] = 1.0
        self.basis[r] = j
        self.pivots += 1
        if self.pivots > self.max_pivots:
            raise IterationLimitError(f"simplex exceeded {self.max_pivots} pivots")

    def run(self, ncols: int) -> str:
        """Bland's rule on the objective row (last row); columns ``>= ncols`` are frozen."""
        tab = self.tab
        M = tab.shape[0] - 1
        while True:
            d = tab[-1, :ncols]
            cand = np.flatnonzero(d < -OPT_TOL)
            if cand.size == 0:
                return "optimal"
            j = int(cand[0])
            col = tab[:M, j]
            best_r, best_ratio = -1, math.inf
            for r in np.flatnonzero(col > PIVOT_TOL):
                ratio = tab[r, -1] / col[r]
                if ratio < best_ratio - 1e-12 or (
                    abs(ratio - best_ratio) <= 1e-12 and self.basis[r] < self.basis[best_r]
                ):
                    best_r, best_ratio = int(r), ratio
            if best_r < 0:
                return "unbounded"
            self.pivot(best_r, j)


def solve(problem: LpProblem, max_pivots: int = DEFAULT_MAX_PIVOTS) -> LpSolution:
    """Solve ``problem`` to a certified optimal basic solution, or report
    infeasibility / unboundedness."""
    sf = _standard_form(problem)
    if sf is None:
        return LpSolution("infeasible")
    A, rels, b, c, T, x0 = sf
    M, K = A.shape
    A = A.copy()
    b = b.copy()
    rels = list(rels)
    for r in range(M):
        if b[r] < 0:
            A[r] = -A[r]
            b[r] = -b[r]
            rels[r] = {"<=": ">=", ">=": "<=", "=": "="}[rels[r]]
    n_slack = sum(1 for rel in rels if rel != "=")
    n_art = sum(1 for rel in rels if rel != "<=")
    ncols = K + n_slack + n_art
    tab = np.zeros((M + 1, ncols + 1))
    tab[:M, :K] = A
    tab[:M, -1] = b
    basis = [0] * M
    s = K
    a = K + n_slack
    art_rows = []
    for r, rel in enumerate(rels):
        if rel == "<=":
            tab[r, s] = 1.0
            basis[r] = s
            s += 1
        elif rel == ">=":
            tab[r, s] = -1.0
            s += 1
            tab[r, a] = 1.0
            basis[r] = a
            art_rows.append(r)
            a += 1
        else:
            tab[r, a] = 1.0
            basis[r] = a
            art_rows.append(r)
            a += 1
    first_art = K + n_slack
    tableau = _Tableau(tab, basis, max_pivots)

    if art_rows:
        # Phase 1: maximize -sum(artificials).
        tab[-1, :] = 0.0
        for r in art_rows:
            tab[-1, :] -= tab[r, :]
        tab[-1, first_art:ncols] = 0.0
        tableau.run(ncols)
        scale = max(1.0, float(np.max(np.abs(b))) if M else 1.0)
        if tab[-1, -1] < -FEAS_TOL * scale:
            return LpSolution("infeasible", pivots=tableau.pivots)
        # Drive zero-level artificials out of the basis; drop redundant rows.
        keep = []
        for r in range(M):
            if tableau.basis[r] >= first_art:
                nz = np.flatnonzero(np.abs(tab[r, :first_art]) > 1e-9)
                if nz.size:
                    tableau.pivot(r, int(nz[0]))
                    keep.append(r)
            else:
                keep.append(r)
        if len(keep) < M:
            tab = np.vstack([tab[keep], tab[-1:]])
            tableau.tab = tab
            tableau.basis = [tableau.basis[r] for r in keep]
            M = len(keep)
        tab[:, first_art:ncols] = 0.0

    # Phase 2.
    cost = np.zeros(ncols)
    cost[:K] = c
    cB = cost[tableau.basis]
    tab[-1, :ncols] = cB @ tab[:M, :ncols] - cost
    tab[-1, -1] = cB @ tab[:M, -1]
    status = tableau.run(first_art)
    if status == "unbounded":
        return LpSolution("unbounded", pivots=tableau.pivots)

    y = _polish(A, rels, b, tableau.basis, K, n_slack, tab)
    x = T @ y[:K] + x0
    x = tuple(float(v) for v in x)
    return LpSolution("optimal", x, problem.value(x), tableau.pivots)


def _polish(A, rels, b, basis, K, n_slack, tab) -> np.ndarray:
    """Recompute the basic solution from the original (sign-normalized) data."""
    M0 = A.shape[0]
    full = np.zeros((M0, K + n_slack))
    full[:, :K] = A
    s = K
    for r, rel in enumerate(rels):
        if rel == "<=":
            full[r, s] = 1.0
            s += 1
        elif rel == ">=":
            full[r, s] = -1.0
            s += 1
    y = np.zeros(K + n_slack)
    cols = [j for j in basis if j < K + n_slack]
    fallback = np.zeros(K + n_slack)
    for r, j in enumerate(basis):
        if j < K + n_slack:
            fallback[j] = tab[r, -1]
    if not cols:
        return fallback
    sol, *_ = np.linalg.lstsq(full[:, cols], b, rcond=None)
    y[cols] = sol
    # Keep the tableau values if the solve came out worse.
    err_new = np.max(np.abs(full @ y - b)) if M0 else 0.0
    err_old = np.max(np.abs(full @ fallback - b)) if M0 else 0.0
    base = y if err_new <= err_old else fallback
    return np.maximum(base, 0.0)
