"""Certified evaluation and minimization of cosine polynomials.

A cosine polynomial here is ``F(x) = sum_{j=1..K} c_j cos(j x)``. The
minimizer returns a one-sided rigorous lower bound built from midpoint
samples and the global Lipschitz constant ``sum j |c_j|``; cells whose
local bound cannot beat the incumbent are bisected until the gap closes.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "CertificationError",
    "CosinePoly",
    "Interval",
    "CertifiedMin",
    "evaluate",
    "derivative_sup",
    "ell1_norm",
    "certified_min",
    "partition",
    "parse_poly",
    "parse_interval",
    "DEFAULT_TOL",
    "MAX_ROUNDS",
]

DEFAULT_TOL = 1e-8
MAX_ROUNDS = 40
_INITIAL_CELLS = 64
_MAX_CELLS = 4_000_000
_EPS = np.finfo(float).eps


class CertificationError(RuntimeError):
    """The certification gap could not be closed within the round budget."""


@dataclass(frozen=True)
class CosinePoly:
    """Coefficients ``c_1..c_K`` of ``sum c_j cos(j x)``."""

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Sequence[float]):
        coeffs = tuple(float(c) for c in coeffs)
        if not coeffs:
            raise ValueError("a cosine polynomial needs at least one coefficient")
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def K(self) -> int:
        return len(self.coeffs)

    def __call__(self, x):
        return evaluate(self, x)

    def scaled(self, factor: float) -> "CosinePoly":
        return CosinePoly([factor * c for c in self.coeffs])

    def __str__(self) -> str:
        return ",".join(repr(c) for c in self.coeffs)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def mirror(self) -> "Interval":
        return Interval(-self.hi, -self.lo)


@dataclass(frozen=True)
class CertifiedMin:
    """``lower <= min F <= upper = F(witness)`` over a closed interval."""

    lower: float
    upper: float
    witness: float
    tol: float
    rounds: int = 0
    evaluations: int = 0

    @property
    def gap(self) -> float:
        return self.upper - self.lower


def _active_terms(poly: CosinePoly):
    freqs = np.array([j + 1 for j, c in enumerate(poly.coeffs) if c != 0.0], dtype=float)
    coeffs = np.array([c for c in poly.coeffs if c != 0.0], dtype=float)
    return freqs, coeffs


def evaluate(poly: CosinePoly, x):
    """Evaluate ``poly`` at a scalar or array ``x``."""
    freqs, coeffs = _active_terms(poly)
    xa = np.asarray(x, dtype=float)
    if freqs.size == 0:
        out = np.zeros_like(xa)
    else:
        out = np.cos(np.multiply.outer(xa, freqs)) @ coeffs
    return float(out) if out.ndim == 0 else out


def derivative_sup(poly: CosinePoly) -> float:
    """``sum j |c_j|``, a bound on ``|F'|`` over the reals."""
    return math.fsum((j + 1) * abs(c) for j, c in enumerate(poly.coeffs))


def ell1_norm(poly: CosinePoly) -> float:
    return math.fsum(abs(c) for c in poly.coeffs)


def _roundoff(poly: CosinePoly, iv: Interval) -> float:
    # Floating error in cos(j x) evaluation and in cell-edge placement.
    scale = max(1.0, abs(iv.lo), abs(iv.hi))
    return 8.0 * _EPS * (poly.K + 2) * ell1_norm(poly) + 8.0 * _EPS * scale * derivative_sup(poly)


def certified_min(poly: CosinePoly, iv: Interval, tol: float = DEFAULT_TOL,
                  max_rounds: int = MAX_ROUNDS) -> CertifiedMin:
    """Rigorous lower bound on ``min_{x in iv} poly(x)`` within ``tol``.

    Raises CertificationError when ``max_rounds`` bisection rounds do not
    close the gap, which means ``tol`` is below what double precision can
    resolve for this polynomial.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    lip = derivative_sup(poly)
    slack = _roundoff(poly, iv)

    # Closed interval: endpoints are sampled explicitly.
    ends = np.array([iv.lo, iv.hi])
    ev = evaluate(poly, ends)
    k = int(np.argmin(ev))
    best, witness = float(ev[k]), float(ends[k])
    evaluations = 2

    if iv.width == 0.0 or lip == 0.0:
        return CertifiedMin(best - slack, best, witness, tol, 0, evaluations)

    n = _INITIAL_CELLS
    hw = iv.width / (2 * n)
    centers = iv.lo + (2 * np.arange(n) + 1) * hw
    settled = math.inf
    for rnd in range(max_rounds + 1):
        vals = evaluate(poly, centers)
        evaluations += centers.size
        k = int(np.argmin(vals))
        if vals[k] < best:
            best, witness = float(vals[k]), float(centers[k])
        local = vals - lip * hw - slack
        open_ = local < best - tol
        if not open_.all():
            settled = min(settled, float(local[~open_].min()))
        if not open_.any():
            lower = min(settled, best)
            return CertifiedMin(lower, best, witness, tol, rnd, evaluations)
        if rnd == max_rounds:
            break
        centers = centers[open_]
        if 2 * centers.size > _MAX_CELLS:
            raise CertificationError(
                f"cell budget exceeded at round {rnd}: {centers.size} open cells")
        hw /= 2
        centers = np.concatenate([centers - hw, centers + hw])
    raise CertificationError(
        f"gap did not close within {max_rounds} rounds (tol={tol:g}); "
        "tolerance is too small for double precision")


def partition(m: int, h: int) -> list[Interval]:
    """Split ``[-pi/h, pi/h]`` into ``m`` equal closed intervals."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    if h < 2:
        raise ValueError("h must be at least 2")
    start = -math.pi / h
    step = 2 * math.pi / (h * m)
    edges = [start + step * j for j in range(m + 1)]
    edges[-1] = math.pi / h
    return [Interval(edges[j], edges[j + 1]) for j in range(m)]


def parse_poly(text: str) -> CosinePoly:
    """Parse ``"c1,c2,...,cK"``."""
    parts = [p.strip() for p in text.strip().split(",")]
    if not parts or any(p == "" for p in parts):
        raise ValueError(f"malformed coefficient list: {text!r}")
    return CosinePoly([float(p) for p in parts])


_PI_TERM = re.compile(
    r"^(?P<sign>[+-]?)\s*(?:(?P<num>[0-9.eE+-]+)\s*\*?\s*)?pi\s*(?:/\s*(?P<den>[0-9.]+))?$")


def _parse_angle(token: str) -> float:
    t = token.strip().lower()
    match = _PI_TERM.match(t)
    if match:
        sign = -1.0 if match["sign"] == "-" else 1.0
        num = float(match["num"]) if match["num"] else 1.0
        den = float(match["den"]) if match["den"] else 1.0
        return sign * num * math.pi / den
    if "/" in t:
        return float(Fraction(t))
    return float(t)


def parse_interval(text: str) -> Interval:
    """Parse ``"lo,hi"``; endpoints accept forms such as ``-pi/3``, ``2pi/3``, ``0.5``."""
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"interval must be 'lo,hi': {text!r}")
    return Interval(_parse_angle(parts[0]), _parse_angle(parts[1]))
