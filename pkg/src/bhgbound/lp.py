"""Dense two-phase simplex for small linear programs.

Solves ``min c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.
The tableau is generic over the number type: pass ``Fraction`` entries (the
default converts everything exactly, floats included) for an exact optimum,
or ``exact=False`` for a float solve with a pivot tolerance. Bland's rule is
used throughout, so the method terminates on degenerate problems.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = ["LPResult", "InfeasibleLP", "UnboundedLP", "linprog", "to_fraction"]


class InfeasibleLP(ValueError):
    pass


class UnboundedLP(ValueError):
    pass


@dataclass
class LPResult:
    x: list
    value: object
    pivots: int


def to_fraction(v) -> Fraction:
    """Exact rational value of an int, float, decimal string or Fraction."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v.strip())
    return Fraction(v)


class _Tableau:
    def __init__(self, rows, rhs, basis, zero, eps):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.zero = zero
        self.eps = eps
        self.pivots = 0

    def pivot(self, r, col):
        prow = self.rows[r]
        p = prow[col]
        inv = 1 / p
        prow[:] = [v * inv for v in prow]
        self.rhs[r] = self.rhs[r] * inv
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[col]
            if f != self.zero:
                row[:] = [a - f * b for a, b in zip(row, prow)]
                self.rhs[i] = self.rhs[i] - f * self.rhs[r]
        self.basis[r] = col
        self.pivots += 1

    def reduced_costs(self, cost):
        red = list(cost)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb != self.zero:
                row = self.rows[i]
                red = [rv - cb * a for rv, a in zip(red, row)]
        return red

    def optimize(self, cost, allowed):
        """Minimize ``cost`` over the current basis; Bland's rule."""
        while True:
            red = self.reduced_costs(cost)
            entering = next((j for j in allowed if red[j] < -self.eps), None)
            if entering is None:
                return
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > self.eps:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                raise UnboundedLP("objective is unbounded below")
            self.pivot(best[1], entering)


def linprog(c: Sequence, A_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
            A_eq: Sequence[Sequence] = (), b_eq: Sequence = (),
            exact: bool = True, eps: float = 1e-12) -> LPResult:
    """Solve a small LP; see the module docstring for the form."""
    conv = to_fraction if exact else float
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    tol = zero if exact else eps

    n = len(c)
    cost = [conv(v) for v in c]
    rows, rhs, slack_of = [], [], []
    for a, b in zip(A_ub, b_ub):
        rows.append([conv(v) for v in a])
        rhs.append(conv(b))
        slack_of.append(True)
    for a, b in zip(A_eq, b_eq):
        rows.append([conv(v) for v in a])
        rhs.append(conv(b))
        slack_of.append(False)
    if any(len(r) != n for r in rows):
        raise ValueError("constraint rows must match the objective length")
    m = len(rows)
    n_slack = sum(slack_of)

    # Columns: [x (n) | slacks (n_slack) | artificials (m)]
    width = n + n_slack + m
    table = []
    s = 0
    for i, row in enumerate(rows):
        full = row + [zero] * (n_slack + m)
        if slack_of[i]:
            full[n + s] = one
            s += 1
        if rhs[i] < zero:
            full = [-v for v in full]
            rhs[i] = -rhs[i]
        full[n + n_slack + i] = one
        table.append(full)
    tab = _Tableau(table, rhs, [n + n_slack + i for i in range(m)], zero, tol)

    # Phase 1: drive the artificials to zero.
    phase1 = [zero] * (n + n_slack) + [one] * m
    tab.optimize(phase1, range(width))
    infeas = sum((tab.rhs[i] for i, b in enumerate(tab.basis) if b >= n + n_slack), zero)
    if infeas > (zero if exact else 1e-9):
        raise InfeasibleLP("no feasible point")
    for i, b in enumerate(list(tab.basis)):
        if b >= n + n_slack:
            col = next((j for j in range(n + n_slack)
                        if abs(tab.rows[i][j]) > tol), None)
            if col is not None:
                tab.pivot(i, col)
            # otherwise the row is redundant; its artificial stays at zero

    # Phase 2 over the structural and slack columns only.
    full_cost = cost + [zero] * (n_slack + m)
    tab.optimize(full_cost, range(n + n_slack))

    x = [zero] * n
    for i, b in enumerate(tab.basis):
        if b < n:
            x[b] = tab.rhs[i]
    value = sum((cv * xv for cv, xv in zip(cost, x)), zero)
    return LPResult(x=x, value=value, pivots=tab.pivots)
