"""Dense two-phase simplex method over exact rationals.

Solves ``max/min c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq`` and
``x >= 0``.  Bland's rule is used throughout, so the method terminates on
degenerate problems; the problems solved here have at most a few dozen
variables, which keeps Fraction arithmetic cheap enough.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from .measure import to_fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: list[Fraction] | None = None
    value: Fraction | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], basis: list[int], ncols: int):
        self.rows = rows          # each row: ncols coefficients followed by rhs
        self.basis = basis
        self.ncols = ncols
        self.obj: list[Fraction] = []

    def set_objective(self, cost: Sequence[Fraction]) -> None:
        # reduced costs d_j = c_j - sum_i c_B(i) T[i][j]; last entry is -z
        obj = list(cost) + [Fraction(0)]
        for i, row in enumerate(self.rows):
            cb = cost[self.basis[i]]
            if cb:
                for j, v in enumerate(row):
                    if v:
                        obj[j] -= cb * v
        self.obj = obj

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        piv = prow[c]
        if piv != 1:
            prow = [v / piv for v in prow]
            self.rows[r] = prow
        nz = [(j, v) for j, v in enumerate(prow) if v]
        for i, row in enumerate(self.rows):
            if i != r:
                f = row[c]
                if f:
                    for j, v in nz:
                        row[j] -= f * v
        f = self.obj[c]
        if f:
            for j, v in nz:
                self.obj[j] -= f * v
        self.basis[r] = c

    def run(self, allowed: int) -> str:
        """Maximize the current objective; columns >= ``allowed`` never enter."""
        while True:
            enter = next((j for j in range(allowed) if self.obj[j] > 0), None)
            if enter is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], enter)


def linprog_exact(
    c: Sequence,
    A_ub: Sequence[Sequence] | None = (),
    b_ub: Sequence | None = (),
    A_eq: Sequence[Sequence] | None = (),
    b_eq: Sequence | None = (),
    maximize: bool = False,
) -> LPResult:
    """Optimize ``c.x`` over ``x >= 0`` with the given rows (None = no rows)."""
    A_ub, b_ub, A_eq, b_eq = (v if v is not None else () for v in (A_ub, b_ub, A_eq, b_eq))
    if len(A_ub) != len(b_ub) or len(A_eq) != len(b_eq):
        raise ValueError("constraint matrix and right-hand side lengths differ")
    n = len(c)
    cost = [to_fraction(v) for v in c]
    if not maximize:
        cost = [-v for v in cost]

    raw = []  # (coeffs, sense, rhs) with rhs >= 0
    for coeffs, rhs, sense in [(a, b, "<=") for a, b in zip(A_ub, b_ub)] + [
        (a, b, "=") for a, b in zip(A_eq, b_eq)
    ]:
        coeffs = [to_fraction(v) for v in coeffs]
        if len(coeffs) != n:
            raise ValueError("constraint row has the wrong number of coefficients")
        rhs = to_fraction(rhs)
        if rhs < 0:
            coeffs = [-v for v in coeffs]
            rhs = -rhs
            sense = {"<=": ">=", "=": "="}[sense]
        raw.append((coeffs, sense, rhs))

    n_slack = sum(1 for _, s, _ in raw if s in ("<=", ">="))
    n_art = sum(1 for _, s, _ in raw if s in (">=", "="))
    ncols = n + n_slack + n_art
    rows, basis = [], []
    slack_col, art_col = n, n + n_slack
    for coeffs, sense, rhs in raw:
        row = coeffs + [Fraction(0)] * (n_slack + n_art) + [rhs]
        if sense == "<=":
            row[slack_col] = Fraction(1)
            basis.append(slack_col)
            slack_col += 1
        elif sense == ">=":
            row[slack_col] = Fraction(-1)
            slack_col += 1
            row[art_col] = Fraction(1)
            basis.append(art_col)
            art_col += 1
        else:
            row[art_col] = Fraction(1)
            basis.append(art_col)
            art_col += 1
        rows.append(row)

    tab = _Tableau(rows, basis, ncols)
    first_art = n + n_slack
    if n_art:
        tab.set_objective([Fraction(0)] * first_art + [Fraction(-1)] * n_art)
        tab.run(ncols)
        if tab.obj[-1] != 0:  # -z = sum of artificials > 0
            return LPResult(INFEASIBLE)
        # drive zero-level artificials out of the basis, dropping redundant rows
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] >= first_art:
                col = next((j for j in range(first_art) if tab.rows[i][j]), None)
                if col is None:
                    del tab.rows[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, col)
            i += 1
        tab.rows = [row[:first_art] + [row[-1]] for row in tab.rows]
        tab.ncols = first_art

    tab.set_objective(cost + [Fraction(0)] * n_slack)
    status = tab.run(tab.ncols)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * tab.ncols
    for i, b in enumerate(tab.basis):
        x[b] = tab.rows[i][-1]
    x = x[:n]
    value = sum((to_fraction(cv) * xv for cv, xv in zip(c, x)), Fraction(0))
    return LPResult(OPTIMAL, x, value)
