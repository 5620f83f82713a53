"""Lower bounds on the min-max weight ``psi(N, K, h)``.

For a finite family of normalized cosine weights, each member is bounded
below on every cell of a uniform partition of ``[-pi/h, pi/h]`` (the value
matrix). Any set A then spreads its projected mass ``alpha`` over the cells,
and ``min_alpha max_k row_k . alpha`` is a lower bound on ``psi`` that does
not depend on N. The min-max is solved as a pair of exact linear programs:
the primal gives the worst mass distribution, the dual gives a mixture of
family members whose pointwise minimum certifies the value.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .bounds import round_down_fraction
from .lp import linprog, to_fraction
from .trigcert import (
    DEFAULT_TOL,
    CertificationError,
    CosinePoly,
    certified_min,
    ell1_norm,
    partition,
)

__all__ = [
    "FunctionFamily",
    "ValueMatrix",
    "PsiEstimate",
    "theorem32_family",
    "value_matrix",
    "minmax_lower_bound",
    "restricted_minmax",
    "psi_lower_bound",
    "family_search",
    "read_family",
    "write_family",
    "parse_family",
    "format_family",
    "THREADS_ENV",
]

THREADS_ENV = "BHGBOUND_THREADS"
MEMBERSHIP_TOL = 1e-12


@dataclass(frozen=True)
class FunctionFamily:
    """Finite subfamily of the cosine weights with ``l1 = 1/cos(pi/h)``."""

    h: int
    K: int
    members: tuple[CosinePoly, ...]

    def __init__(self, h: int, K: int, members: Iterable[CosinePoly], check: bool = True):
        members = tuple(members)
        if h < 2:
            raise ValueError("h must be at least 2")
        if not members:
            raise ValueError("a family needs at least one member")
        target = 1.0 / math.cos(math.pi / h)
        for i, p in enumerate(members):
            if any(c != 0.0 for c in p.coeffs[K:]):
                raise ValueError(f"member {i + 1} uses a frequency above K={K}")
            if check and abs(ell1_norm(p) - target) > MEMBERSHIP_TOL * max(1.0, target):
                raise ValueError(
                    f"member {i + 1} has l1 norm {ell1_norm(p)!r}, expected {target!r}")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    def without(self, index: int) -> "FunctionFamily":
        return FunctionFamily(self.h, self.K, [p for i, p in enumerate(self.members) if i != index])

    def replace(self, index: int, poly: CosinePoly) -> "FunctionFamily":
        members = list(self.members)
        members[index] = poly
        return FunctionFamily(self.h, self.K, members)


@dataclass(frozen=True)
class ValueMatrix:
    m: int
    h: int
    rows: tuple[tuple[float, ...], ...]
    tol: float

    def __post_init__(self):
        if any(len(r) != self.m for r in self.rows):
            raise ValueError("every row needs m entries")

    def restrict(self, rows: Sequence[int]) -> "ValueMatrix":
        return ValueMatrix(self.m, self.h, tuple(self.rows[k] for k in rows), self.tol)


@dataclass
class PsiEstimate:
    """Certified lower bound on psi, with the worst-case mass and the certifying mixture."""

    value: float
    argmin_alpha: list[float]
    active_members: list[int]
    weights: list[float] = field(default_factory=list)
    upper: float | None = None
    exact: bool = True

    def to_dict(self) -> dict:
        return {"value": self.value, "alpha": self.argmin_alpha,
                "active_members": self.active_members}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def theorem32_family() -> FunctionFamily:
    """The five weights for ``h = 3``, ``K = 6`` behind the 1.2228 bound."""
    return FunctionFamily(3, 6, [
        CosinePoly([1.7, 0, -0.3]),
        CosinePoly([1.6, 0, -0.3, 0, 0, 0.1]),
        CosinePoly([1.5, 0, -0.4, 0, 0, 0.1]),
        CosinePoly([1.2, 0, -0.6, 0, 0, 0.2]),
        CosinePoly([0, 0, -2]),
    ])


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _row(poly: CosinePoly, cells, tol: float, k: int) -> tuple[float, ...]:
    out = []
    for j, iv in enumerate(cells):
        try:
            out.append(certified_min(poly, iv, tol).lower)
        except CertificationError as exc:
            raise CertificationError(f"cell (member {k + 1}, interval {j + 1}): {exc}") from exc
    return tuple(out)


def value_matrix(family: FunctionFamily, m: int, tol: float = DEFAULT_TOL) -> ValueMatrix:
    """Certified lower bounds on each member's minimum over each of the ``m`` cells."""
    cells = partition(m, family.h)
    jobs = list(enumerate(family.members))
    threads = _threads()
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(lambda kp: _row(kp[1], cells, tol, kp[0]), jobs))
    else:
        rows = [_row(p, cells, tol, k) for k, p in jobs]
    return ValueMatrix(m, family.h, tuple(rows), tol)


def _solve_game(rows, exact: bool):
    """Primal (mass) and dual (mixture) of ``min_alpha max_k rows[k] . alpha``."""
    n_rows, m = len(rows), len(rows[0])
    conv = to_fraction if exact else float
    R = [[conv(v) for v in r] for r in rows]
    # Shift by the smallest entry so the epigraph variable is nonnegative.
    shift = min(min(r) for r in R)

    # min t  s.t.  R alpha - t <= shift,  sum alpha = 1   (t := value - shift)
    A_ub = [r + [-1] for r in R]
    primal = linprog([0] * m + [1], A_ub=A_ub, b_ub=[shift] * n_rows,
                     A_eq=[[1] * m + [0]], b_eq=[1], exact=exact)
    alpha = primal.x[:m]

    # max s  s.t.  s - sum_k y_k R[k][j] <= -shift,  sum y = 1   (s := value - shift)
    A_ub = [[-R[k][j] for k in range(n_rows)] + [1] for j in range(m)]
    dual = linprog([0] * n_rows + [-1], A_ub=A_ub, b_ub=[-shift] * m,
                   A_eq=[[1] * n_rows + [0]], b_eq=[1], exact=exact)
    y = dual.x[:n_rows]

    row_vals = [sum((a * b for a, b in zip(r, alpha)), R[0][0] * 0) for r in R]
    col_vals = [sum((y[k] * R[k][j] for k in range(n_rows)), R[0][0] * 0) for j in range(m)]
    return alpha, y, row_vals, max(row_vals), min(col_vals)


def minmax_lower_bound(matrix: ValueMatrix, exact: bool = True,
                       gap_tol: float = 1e-9) -> PsiEstimate:
    """Optimum of ``min over the simplex of max_k row_k . alpha``.

    In exact mode the matrix floats are converted to rationals and both LPs
    are solved exactly, so the primal and dual values coincide. The float
    mode checks that the duality gap is below ``gap_tol``.
    """
    alpha, y, row_vals, upper, lower = _solve_game(matrix.rows, exact)
    if exact:
        if upper != lower:
            raise ArithmeticError("exact primal and dual values differ")
        value = round_down_fraction(lower)
        active = [k for k, v in enumerate(row_vals) if v == upper]
    else:
        if upper - lower > gap_tol:
            raise ArithmeticError(f"duality gap {upper - lower:g} exceeds {gap_tol:g}")
        value = lower
        active = [k for k, v in enumerate(row_vals) if v >= upper - gap_tol]
    return PsiEstimate(
        value=value,
        argmin_alpha=[float(a) for a in alpha],
        active_members=active,
        weights=[float(v) for v in y],
        upper=float(upper),
        exact=exact,
    )


def restricted_minmax(matrix: ValueMatrix, rows: Sequence[int], cells: Sequence[int],
                      lo: float, hi: float) -> float:
    """Min-max over the given rows with the mass on ``cells`` held in ``[lo, hi]``.

    This is the per-case analysis of a hand proof: fix how much of A sits in
    some cells, then bound the best member's weighted sum from below.
    """
    R = [[to_fraction(v) for v in matrix.rows[k]] for k in rows]
    m = matrix.m
    shift = min(min(r) for r in R)
    sel = [1 if j in set(cells) else 0 for j in range(m)]
    A_ub = [r + [-1] for r in R]
    b_ub = [shift] * len(R)
    A_ub.append(sel + [0])
    b_ub.append(to_fraction(hi))
    A_ub.append([-s for s in sel] + [0])
    b_ub.append(-to_fraction(lo))
    res = linprog([0] * m + [1], A_ub=A_ub, b_ub=b_ub, A_eq=[[1] * m + [0]], b_eq=[1])
    return round_down_fraction(res.value + shift)


def psi_lower_bound(family: FunctionFamily, m: int, tol: float = DEFAULT_TOL,
                    exact: bool = True) -> PsiEstimate:
    return minmax_lower_bound(value_matrix(family, m, tol), exact=exact)


def _normalize(coeffs: Sequence[float], h: int) -> CosinePoly | None:
    norm = math.fsum(abs(c) for c in coeffs)
    if norm == 0.0:
        return None
    target = 1.0 / math.cos(math.pi / h)
    return CosinePoly([c * target / norm for c in coeffs])


def family_search(seed: FunctionFamily, m: int, step_grid: Sequence[float] = (0.1, -0.1, 0.01, -0.01),
                  budget: int = 100, tol: float = DEFAULT_TOL,
                  log=None) -> tuple[FunctionFamily, PsiEstimate]:
    """Coordinate search over member coefficients, keeping only improving moves.

    Each candidate perturbs one coefficient of one member by a grid step and
    is rescaled back onto the normalized family. ``budget`` counts candidate
    evaluations; the result is never worse than the seed.
    """
    cells = partition(m, seed.h)
    rows = list(value_matrix(seed, m, tol).rows)
    family = seed
    best = minmax_lower_bound(ValueMatrix(m, seed.h, tuple(rows), tol))
    spent = 0
    improved = True
    while improved and spent < budget:
        improved = False
        for k in range(len(family)):
            for j in range(family.K):
                for step in step_grid:
                    if spent >= budget:
                        return family, best
                    coeffs = list(family.members[k].coeffs) + [0.0] * (family.K - family.members[k].K)
                    coeffs[j] += step
                    poly = _normalize(coeffs, family.h)
                    if poly is None:
                        continue
                    spent += 1
                    trial_rows = rows.copy()
                    trial_rows[k] = _row(poly, cells, tol, k)
                    trial = ValueMatrix(m, family.h, tuple(trial_rows), tol)
                    # Float screen first; only improving moves pay for the exact solve.
                    if minmax_lower_bound(trial, exact=False).value <= best.value:
                        continue
                    est = minmax_lower_bound(trial)
                    if est.value > best.value:
                        family = family.replace(k, poly)
                        rows, best = trial_rows, est
                        improved = True
                        if log:
                            log(f"member {k + 1} coeff {j + 1} step {step:+g}: psi >= {est.value:.7f}")
    return family, best


# -- family files ------------------------------------------------------------

def format_family(family: FunctionFamily) -> str:
    lines = [f"h={family.h} K={family.K}"]
    lines += [",".join(repr(c) for c in p.coeffs) for p in family.members]
    return "\n".join(lines) + "\n"


def parse_family(text: str) -> FunctionFamily:
    """Header ``h=<int> K=<int>`` then one comma-separated member per line."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty family file")
    header = dict(part.split("=", 1) for part in lines[0].split())
    try:
        h, K = int(header["h"]), int(header["K"])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad family header {lines[0]!r}; expected 'h=<int> K=<int>'") from exc
    members = [CosinePoly([float(v) for v in ln.split(",")]) for ln in lines[1:]]
    return FunctionFamily(h, K, members)


def read_family(path: str | os.PathLike) -> FunctionFamily:
    with open(path) as fh:
        return parse_family(fh.read())


def write_family(family: FunctionFamily, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(format_family(family))
