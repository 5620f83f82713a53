"""Closed-form and certified upper bounds on B_h[g]-sets in {1..N}.

Every bound has the shape ``|A| <= (C g N)^(1/h)``; the functions here
compute the constant ``C`` for each method and wrap it in a BoundReport.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal
from fractions import Fraction
from typing import Sequence

from .lp import linprog
from .trigcert import (
    DEFAULT_TOL,
    CosinePoly,
    CertifiedMin,
    certified_min,
    partition,
)

__all__ = [
    "BhgInstance",
    "BoundReport",
    "SincRoot",
    "ImprovementCheck",
    "B3Refinement",
    "METHODS",
    "trivial_bound",
    "crt_constant",
    "cju_constant",
    "thm11_constant",
    "sinc",
    "solve_sinc",
    "g_lhs",
    "g_min_closed_form",
    "build_G",
    "check_improvement_inequality",
    "b3_weight",
    "case2_caps",
    "capped_weighted_sum",
    "b3_refined_constant",
    "prop31_bound",
    "report",
    "all_bounds",
    "round_up",
    "round_down",
    "format_table",
]

METHODS = ("trivial", "crt", "cju", "thm11", "b3refined")
MAX_FACTORIAL_H = 20
SINC_TOL = 1e-12


@dataclass(frozen=True)
class BhgInstance:
    h: int
    g: int
    N: int

    def __post_init__(self):
        if self.h < 2:
            raise ValueError("h must be at least 2")
        if self.g < 1:
            raise ValueError("g must be at least 1")
        if self.N < 1:
            raise ValueError("N must be at least 1")


@dataclass(frozen=True)
class BoundReport:
    method: str
    h: int
    g: int
    N: int
    constant: float
    cardinality_bound: float
    asymptotic: bool

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class SincRoot:
    """Root of ``sin(x)/x = target`` on ``[0, pi]``, bracketed by ``[lo, hi]``."""

    target: float
    root: float
    tol: float
    lo: float
    hi: float
    degenerate: bool = False


def report(method: str, inst: BhgInstance, constant: float, asymptotic: bool) -> BoundReport:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if not constant > 0:
        raise ValueError("bound constants are positive")
    card = (constant * inst.g * inst.N) ** (1.0 / inst.h)
    return BoundReport(method, inst.h, inst.g, inst.N, constant, card, asymptotic)


def trivial_bound(inst: BhgInstance) -> BoundReport:
    """Counting bound ``C(|A|+h-1, h) <= g h N`` loosened to ``(h! h g N)^(1/h)``."""
    if inst.h > MAX_FACTORIAL_H:
        raise ValueError(f"h > {MAX_FACTORIAL_H} is not supported")
    return report("trivial", inst, float(math.factorial(inst.h) * inst.h), False)


def crt_constant(h: int) -> float:
    """``h! h / (1 + cos^h(pi/h))``."""
    if h < 3:
        raise ValueError("the cosine-weight bound needs h >= 3")
    return math.factorial(h) * h / (1.0 + math.cos(math.pi / h) ** h)


def cju_constant(h: int) -> float:
    """``sqrt(3h) h!``."""
    if h < 2:
        raise ValueError("h must be at least 2")
    return math.sqrt(3 * h) * math.factorial(h)


def sinc(x: float) -> float:
    return 1.0 if x == 0.0 else math.sin(x) / x


def solve_sinc(target: float, tol: float = SINC_TOL) -> SincRoot:
    """Invert ``sin(x)/x`` on ``[0, pi]`` by bisection.

    ``target = 1`` has only the limiting root 0, returned with
    ``degenerate=True``.
    """
    if not 0.0 <= target <= 1.0:
        raise ValueError(f"sinc target {target} outside [0, 1]")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if target == 0.0:
        return SincRoot(target, math.pi, tol, math.pi, math.pi)
    if target == 1.0:
        return SincRoot(target, 0.0, tol, 0.0, 0.0, degenerate=True)
    lo, hi = 0.0, math.pi
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if sinc(mid) > target:
            lo = mid
        else:
            hi = mid
    return SincRoot(target, 0.5 * (lo + hi), tol, lo, hi)


def g_lhs(h: int) -> float:
    """``(4/(3 - cos(pi/h)) - 1)^h``, the sinc value defining ``x_h``."""
    if h < 3:
        raise ValueError("h must be at least 3")
    return (4.0 / (3.0 - math.cos(math.pi / h)) - 1.0) ** h


def g_min_closed_form(h: int) -> float:
    """Minimum of the two-term weight over ``[-pi/h, pi/h]``."""
    ch = math.cos(math.pi / h)
    return (4.0 / (3.0 - ch) - 1.0) / ch


def build_G(h: int) -> CosinePoly:
    """Two-term weight ``a cos x - b cos(h x)`` with ``a + b = 1/cos(pi/h)``."""
    if h < 3:
        raise ValueError("h must be at least 3")
    ch = math.cos(math.pi / h)
    share = 2.0 / (3.0 - ch)
    coeffs = [0.0] * h
    coeffs[0] = share / ch
    coeffs[h - 1] = -(1.0 - share) / ch
    return CosinePoly(coeffs)


def _constant_from_sinc(target: float, h: int, tol: float) -> tuple[float, SincRoot]:
    root = solve_sinc(target, tol)
    return root.hi * math.factorial(h) * h / math.pi, root


def thm11_constant(h: int, tol: float = SINC_TOL) -> float:
    """``x_h h! h / pi`` with ``sin(x_h)/x_h = g_lhs(h)``; the root's upper bracket is used."""
    return _constant_from_sinc(g_lhs(h), h, tol)[0]


@dataclass(frozen=True)
class ImprovementCheck:
    h: int
    holds: bool
    lhs: float
    rhs: float
    x_h: float
    x_h_cap: float
    root_below_cap: bool


def check_improvement_inequality(h: int, tol: float = SINC_TOL) -> ImprovementCheck:
    """Compare ``sinc(pi sqrt(3/h))`` against ``g_lhs(h)`` and ``x_h`` against ``pi sqrt(3/h)``."""
    cap = math.pi * math.sqrt(3.0 / h)
    lhs = 0.0 if h == 3 else sinc(cap)
    rhs = g_lhs(h)
    root = solve_sinc(rhs, tol)
    return ImprovementCheck(h, lhs < rhs, lhs, rhs, root.hi, cap, root.hi < cap)


# -- B_3[g] refinement -------------------------------------------------------

def b3_weight() -> CosinePoly:
    """``1.6 cos x - 0.3 cos 3x + 0.1 cos 6x``."""
    return CosinePoly([1.6, 0, -0.3, 0, 0, 0.1])


def case2_caps(c: float, delta_grid_den: int, m: int, n_caps: int) -> list[tuple[int, float]]:
    """Cumulative mass caps ``(q, beta)``: the ``q`` outermost interval pairs hold at most ``beta``.

    With ``delta = j/delta_grid_den`` an edge block of width ``delta N`` maps
    onto the first ``floor(delta m)`` intervals, and the mass of the block is
    at most ``(72 delta / c)^(1/3)`` unless the bound ``(c g N)^(1/3)`` already
    holds.
    """
    caps = []
    for j in range(1, n_caps + 1):
        delta = Fraction(j, delta_grid_den)
        if delta >= Fraction(1, 4):
            raise ValueError(f"delta = {delta} must stay below 1/4")
        q = math.floor(delta * m)
        if q == 0:
            continue
        caps.append((q, (72.0 * float(delta) / c) ** (1.0 / 3.0)))
    return caps


def capped_weighted_sum(values: Sequence[float], caps: Sequence[tuple[int, float]],
                        exact: bool = True) -> tuple[float, list]:
    """``min sum p_i values_i`` over the simplex with prefix caps ``sum_{i<q} p_i <= beta``.

    Returns the optimum (rounded down to a float) and the minimizer.
    """
    n = len(values)
    A_ub, b_ub = [], []
    for q, beta in caps:
        if q >= n and beta < 1:
            raise ValueError("caps cover every interval pair but allow less than all the mass")
        A_ub.append([1] * min(q, n) + [0] * (n - min(q, n)))
        b_ub.append(beta)
    res = linprog(list(values), A_ub=A_ub, b_ub=b_ub, A_eq=[[1] * n], b_eq=[1], exact=exact)
    return round_down_fraction(res.value), res.x


def round_down_fraction(v) -> float:
    f = float(v)
    if isinstance(v, Fraction) and Fraction(f) > v:
        f = math.nextafter(f, -math.inf)
    return f


def _pair_values(mins: Sequence[CertifiedMin]) -> list[float]:
    m = len(mins)
    return [min(mins[j].lower, mins[m - 1 - j].lower) for j in range((m + 1) // 2)]


@dataclass
class B3Refinement:
    """Outcome of the two-case B_3[g] argument."""

    constant: float
    case1_constant: float
    case2_constant: float
    weighted_sum: float
    caps: list
    bisection_steps: int
    reference_c: float
    weighted_sum_at_reference_c: float
    case2_constant_at_reference_c: float
    rounded_constant: float
    interval_minima: list = field(repr=False, default_factory=list)
    ordering_holds: bool | None = None
    ordering_detail: str = ""

    def transcript(self) -> list[str]:
        lines = [
            f"case 1: if some edge block exceeds its cap, |A| <= ({self.case1_constant:.6f} g N)^(1/3)",
            f"case 2: capped weighted sum w = {self.weighted_sum:.7f} "
            f"=> |A| <= ({self.case2_constant:.6f} g N)^(1/3)",
        ]
        for q, beta in self.caps:
            lines.append(f"        cap: outermost {q} pair(s) hold at most {beta:.6f} of A")
        lines.append(f"at c = {self.reference_c}: w = {self.weighted_sum_at_reference_c:.7f}, "
                     f"case-2 constant {self.case2_constant_at_reference_c:.6f}")
        lines.append(f"self-consistent constant {self.constant:.6f}; rounded up: {self.rounded_constant}")
        return lines


def _ordering_check(mins: Sequence[CertifiedMin]) -> tuple[bool, str]:
    # v1 < v2 < v3 < v4 < v5 < v35 <= v_j for 6 <= j <= 64 (1-based), m = 128.
    v = mins
    chain = [0, 1, 2, 3, 4, 34]
    strict = all(v[chain[i]].upper < v[chain[i + 1]].lower for i in range(len(chain) - 1))
    rest = all(v[34].lower <= v[j].upper for j in range(5, 64))
    is_min = all(v[34].upper <= v[j].lower + 2 * v[j].tol for j in range(5, 64))
    detail = f"strict chain {'ok' if strict else 'FAILED'}, v35 minimal over 6..64 {'ok' if rest and is_min else 'FAILED'}"
    return strict and rest and is_min, detail


def b3_refined_constant(delta_grid_den: int = 128, m: int = 128, tol: float = DEFAULT_TOL,
                        n_caps: int = 5, weight: CosinePoly | None = None,
                        bracket: tuple[float, float] = (10.0, 16.0),
                        c_tol: float = 1e-9, reference_c: float = 14.295) -> B3Refinement:
    """Least ``c`` for which the case-2 bound implied by caps at ``c`` is at most ``c``."""
    weight = weight or b3_weight()
    mins = [certified_min(weight, iv, tol) for iv in partition(m, 3)]
    values = _pair_values(mins)
    cos3 = math.cos(math.pi / 3)

    def implied(c):
        caps = case2_caps(c, delta_grid_den, m, n_caps)
        w, _ = capped_weighted_sum(values, caps)
        target = min(1.0, max(0.0, (w * cos3) ** 3))
        const, _ = _constant_from_sinc(target, 3, SINC_TOL)
        return const, w, caps

    lo, hi = bracket
    for _ in range(20):
        if implied(lo)[0] > lo:
            break
        lo /= 2
    for _ in range(20):
        if implied(hi)[0] <= hi:
            break
        hi *= 2
    else:
        raise RuntimeError("could not bracket the self-consistent constant")

    steps = 0
    while hi - lo > c_tol * hi:
        mid = 0.5 * (lo + hi)
        if implied(mid)[0] <= mid:
            hi = mid
        else:
            lo = mid
        steps += 1

    c2, w, caps = implied(hi)
    c2_ref, w_ref, _ = implied(reference_c)
    ok = detail = None
    if m == 128:
        ok, detail = _ordering_check(mins)
    return B3Refinement(
        constant=hi,
        case1_constant=hi,
        case2_constant=c2,
        weighted_sum=w,
        caps=caps,
        bisection_steps=steps,
        reference_c=reference_c,
        weighted_sum_at_reference_c=w_ref,
        case2_constant_at_reference_c=c2_ref,
        rounded_constant=round_up(hi, 1),
        interval_minima=mins,
        ordering_holds=ok,
        ordering_detail=detail or "",
    )


def prop31_bound(psi_value: float, inst: BhgInstance, tol: float = SINC_TOL) -> tuple[BoundReport, SincRoot]:
    """Cardinality bound from a lower bound on the min-max weight ``psi``."""
    target = (math.cos(math.pi / inst.h) * psi_value) ** inst.h
    if 1.0 < target <= 1.0 + 1e-12:  # psi at its ceiling 1/cos(pi/h), up to roundoff
        target = 1.0
    if not 0.0 <= target <= 1.0 or psi_value < 0:
        raise ValueError(f"(cos(pi/h) psi)^h = {target} is outside [0, 1]")
    root = solve_sinc(target, tol)
    const = root.hi * math.factorial(inst.h) * inst.h / math.pi
    if root.degenerate:
        return BoundReport("thm11", inst.h, inst.g, inst.N, 0.0, 0.0, True), root
    return report("thm11", inst, const, True), root


def all_bounds(inst: BhgInstance, methods: Sequence[str] = METHODS,
               tol: float = DEFAULT_TOL, b3: B3Refinement | None = None) -> list[BoundReport]:
    """Every applicable bound for ``inst`` among ``methods``."""
    out = []
    for method in methods:
        if method == "trivial":
            out.append(trivial_bound(inst))
        elif method == "crt" and inst.h >= 3:
            out.append(report("crt", inst, crt_constant(inst.h), False))
        elif method == "cju":
            out.append(report("cju", inst, cju_constant(inst.h), False))
        elif method == "thm11" and inst.h >= 3:
            out.append(report("thm11", inst, thm11_constant(inst.h), True))
        elif method == "b3refined" and inst.h == 3:
            b3 = b3 or b3_refined_constant(tol=tol)
            out.append(report("b3refined", inst, b3.constant, True))
    return out


def round_up(x: float, digits: int) -> float:
    """Round toward +inf at ``digits`` decimals, exactly in decimal."""
    q = Decimal(1).scaleb(-digits)
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_CEILING))


def round_down(x: float, digits: int) -> float:
    q = Decimal(1).scaleb(-digits)
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_FLOOR))


def format_table(reports: Sequence[BoundReport]) -> str:
    header = f"{'method':<10} {'h':>3} {'g':>4} {'N':>12} {'constant':>14} {'|A| <=':>14}  asymptotic"
    lines = [header, "-" * len(header)]
    for r in reports:
        lines.append(f"{r.method:<10} {r.h:>3} {r.g:>4} {r.N:>12} {r.constant:>14.6g} "
                     f"{r.cardinality_bound:>14.6g}  {'yes' if r.asymptotic else 'no'}")
    return "\n".join(lines)
