"""Finite ground truth for B_h[g]-sets.

Representation counts come in two flavours. ``multiset`` counts are the
ones in the definition (a B_h[g]-set has at most g multisets of size h
summing to any n); ``ordered`` counts are h-tuples and are what the
exponential-sum and windowed-sum checks use.
"""
from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from numba import njit

__all__ = [
    "IntSet",
    "RepProfile",
    "BhgVerdict",
    "SearchResult",
    "MassProfile",
    "Lemma22Report",
    "ExpSumReport",
    "WindowCheck",
    "SUM_RANGE_CAP",
    "EXHAUSTIVE_CAP",
    "rep_profile",
    "is_bhg",
    "max_bhg_exact",
    "greedy_bhg",
    "project_to_torus",
    "mass_profile",
    "lemma22_check",
    "expsum_check",
    "expsum_sweep",
    "window_constant",
    "window_check",
    "parse_set",
    "read_set",
]

SUM_RANGE_CAP = 10_000_000
EXHAUSTIVE_CAP = {2: 80, 3: 50}
DEFAULT_BUDGET = 50_000_000


@dataclass(frozen=True)
class IntSet:
    elements: tuple[int, ...]
    N: int

    def __init__(self, elements: Iterable[int], N: int | None = None):
        els = tuple(sorted(int(a) for a in elements))
        if len(set(els)) != len(els):
            raise ValueError("elements must be distinct")
        if N is None:
            N = els[-1] if els else 1
        if els and (els[0] < 1 or els[-1] > N):
            raise ValueError(f"elements must lie in [1, {N}]")
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "N", int(N))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, a) -> bool:
        return a in self.elements


def _delta(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def parse_set(text: str) -> IntSet:
    """Whitespace-separated positive integers with an optional ``N=<int>`` line."""
    N = None
    values = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("N="):
            N = int(line[2:])
            continue
        values.extend(int(tok) for tok in line.replace(",", " ").split())
    if any(v < 1 for v in values):
        raise ValueError("set elements must be positive integers")
    return IntSet(values, N)


def read_set(path: str | os.PathLike) -> IntSet:
    with open(path) as fh:
        return parse_set(fh.read())


# -- representation counts ---------------------------------------------------

def _check_sum_range(h: int, N: int) -> None:
    if h * N > SUM_RANGE_CAP:
        raise MemoryError(f"h*N = {h * N} exceeds the sum-range cap {SUM_RANGE_CAP}")


def _multiset_table(elements: Sequence[int], h: int, size: int) -> np.ndarray:
    # Row t counts multisets of size t by sum; each element contributes 1/(1 - y z^a).
    M = np.zeros((h + 1, size), dtype=np.int64)
    M[0, 0] = 1
    for a in elements:
        for t in range(1, h + 1):
            M[t, a:] += M[t - 1, :size - a]
    return M


def _ordered_counts(elements: Sequence[int], h: int, size: int) -> np.ndarray:
    dtype = np.int64 if len(elements) ** h < 2 ** 62 else object
    ind = np.zeros(size, dtype=dtype)
    ind[list(elements)] = 1
    out = np.zeros(size, dtype=dtype)
    out[0] = 1
    top = max(elements)
    for t in range(h):
        out = np.convolve(out[:t * top + 1], ind[:top + 1])[:size]
        out = np.pad(out, (0, size - out.size))
    return out


@dataclass
class RepProfile:
    """Counts indexed by the sum ``n`` (array position), ``0 <= n <= h N``."""

    h: int
    multiset_counts: np.ndarray
    ordered_counts: np.ndarray

    def multiset(self, n: int) -> int:
        return int(self.multiset_counts[n]) if 0 <= n < self.multiset_counts.size else 0

    def ordered(self, n: int) -> int:
        return int(self.ordered_counts[n]) if 0 <= n < self.ordered_counts.size else 0

    def multiset_dict(self) -> dict[int, int]:
        return {int(n): int(v) for n, v in enumerate(self.multiset_counts) if v}

    def ordered_dict(self) -> dict[int, int]:
        return {int(n): int(v) for n, v in enumerate(self.ordered_counts) if v}


def rep_profile(A: IntSet, h: int) -> RepProfile:
    if h < 2:
        raise ValueError("h must be at least 2")
    if len(A) == 0:
        raise ValueError("the set is empty")
    _check_sum_range(h, A.N)
    size = h * A.N + 1
    M = _multiset_table(A.elements, h, size)
    return RepProfile(h, M[h], _ordered_counts(A.elements, h, size))


@dataclass(frozen=True)
class BhgVerdict:
    ok: bool
    witness: int
    max_count: int
    h: int
    g: int


def is_bhg(A: IntSet, h: int, g: int) -> BhgVerdict:
    """Whether every ``n`` has at most ``g`` multiset representations; ``witness`` attains the max."""
    prof = rep_profile(A, h)
    n = int(np.argmax(prof.multiset_counts))
    worst = int(prof.multiset_counts[n])
    return BhgVerdict(worst <= g, n, worst, h, g)


# -- extremal search ---------------------------------------------------------

class _Counts:
    """Multiset tables with O(h) numpy updates for adding or removing one element."""

    def __init__(self, h: int, size: int):
        self.h = h
        self.size = size
        self.M = np.zeros((h + 1, size), dtype=np.int64)
        self.M[0, 0] = 1

    def add(self, a: int) -> None:
        M, L = self.M, self.size
        for t in range(1, self.h + 1):
            M[t, a:] += M[t - 1, :L - a]

    def remove(self, a: int) -> None:
        M, L = self.M, self.size
        for t in range(self.h, 0, -1):
            M[t, a:] -= M[t - 1, :L - a]

    def worst(self) -> int:
        return int(self.M[self.h].max())


def greedy_bhg(N: int, h: int, g: int) -> IntSet:
    """Scan ``1..N`` and keep each element that leaves the set B_h[g]."""
    _check_sum_range(h, N)
    counts = _Counts(h, h * N + 1)
    chosen = []
    for a in range(1, N + 1):
        counts.add(a)
        if counts.worst() <= g:
            chosen.append(a)
        else:
            counts.remove(a)
    return IntSet(chosen, N)


@dataclass
class SearchResult:
    best: IntSet
    optimal: bool
    nodes: int
    sizes: list[int] = field(default_factory=list)


def _counting_cap(n: int, h: int, g: int) -> int:
    # Largest s with C(s + h - 1, h) <= g (h n - h + 1): the h-fold sums span h..h n.
    s = 0
    while math.comb(s + h, h) <= g * (h * n - h + 1):
        s += 1
    return s


@njit(cache=True)
def _record_search(n, target, h, g, best, M, budget):
    """Look for a B_h[g]-set of size ``target`` in [1, n] containing 1 and n.

    ``M`` already holds the multiset tables of {1, n}. Candidates are tried
    in descending order with an explicit stack. Returns (status, nodes,
    chosen) with status 1 found, 0 none, -1 budget exhausted.
    """
    size = M.shape[1]
    need0 = target - 2
    chosen = np.zeros(max(need0, 1), dtype=np.int64)
    cur = np.zeros(max(need0, 1), dtype=np.int64)
    if need0 == 0:
        return 1, 0, chosen[:0]
    nodes = 0
    d = 0
    cur[0] = n - 1
    while True:
        need = need0 - d
        e = cur[d]
        advanced = False
        while e >= 2:
            if need > best[e] - 1 or need > e - 1:
                break
            nodes += 1
            if nodes > budget:
                return -1, nodes, chosen[:d]
            for t in range(1, h + 1):
                for idx in range(e, size):
                    M[t, idx] += M[t - 1, idx - e]
            ok = True
            for idx in range(e, size):
                if M[h, idx] > g:
                    ok = False
                    break
            if ok:
                chosen[d] = e
                cur[d] = e - 1
                if need == 1:
                    return 1, nodes, chosen[:d + 1]
                d += 1
                cur[d] = e - 1
                advanced = True
                break
            for t in range(h, 0, -1):
                for idx in range(e, size):
                    M[t, idx] -= M[t - 1, idx - e]
            e -= 1
        if not advanced:
            d -= 1
            if d < 0:
                return 0, nodes, chosen[:0]
            e = chosen[d]
            for t in range(h, 0, -1):
                for idx in range(e, size):
                    M[t, idx] -= M[t - 1, idx - e]


def max_bhg_exact(N: int, h: int, g: int, budget: int = DEFAULT_BUDGET,
                  cap: int | None = None) -> SearchResult:
    """Largest B_h[g]-set in ``[1, N]`` by branch and bound.

    Record sizes are built up for ``n = 1..N``. A set that beats the best
    size for ``n - 1`` must contain both 1 and ``n`` (otherwise a translate
    fits in ``[1, n - 1]``), and below the smallest chosen element ``e`` at
    most ``best[e] - 1`` further elements besides 1 can fit. Candidates are
    tried in descending order and the counting bound caps each target size.
    ``budget`` limits the total number of search nodes.
    """
    if cap is None:
        cap = EXHAUSTIVE_CAP.get(h, 50)
    if N > cap:
        raise ValueError(f"N = {N} exceeds the exhaustive cap {cap} for h = {h}")
    if N < 1:
        raise ValueError("N must be positive")
    _check_sum_range(h, N)
    size = h * N + 1
    best = np.zeros(N + 1, dtype=np.int64)
    best[1] = 1
    witness = [1]
    nodes = 0
    complete = True
    for n in range(2, N + 1):
        target = int(best[n - 1]) + 1
        found = False
        if complete and target <= _counting_cap(n, h, g):
            counts = _Counts(h, size)
            counts.add(1)
            counts.add(n)
            if counts.worst() <= g:
                status, used, chosen = _record_search(n, target, h, g, best, counts.M,
                                                      budget - nodes)
                nodes += int(used)
                if status == 1:
                    found = True
                    witness = sorted([1, n] + [int(c) for c in chosen])
                elif status == -1:
                    complete = False
        best[n] = target if found else best[n - 1]
    return SearchResult(IntSet(witness, N), complete, nodes, [int(b) for b in best[1:]])


# -- torus projection and mass profiles ----------------------------------------

def project_to_torus(A: IntSet, h: int) -> np.ndarray:
    """``(a - (N+1)/2) * 2 pi / (h N)`` for each element."""
    a = np.asarray(A.elements, dtype=float)
    return (a - (A.N + 1) / 2.0) * 2.0 * math.pi / (h * A.N)


@dataclass
class MassProfile:
    delta: Fraction
    l: int
    alphas: list[float]
    middle_mass: float
    blocks: list[tuple[int, ...]] = field(repr=False, default_factory=list)


def _block(A: IntSet, k: int, delta: Fraction) -> tuple[int, ...]:
    N = A.N
    left_lo, left_hi = (k - 1) * delta * N, k * delta * N
    right_lo, right_hi = (1 - k * delta) * N, (1 - (k - 1) * delta) * N
    out = []
    for a in A.elements:
        if left_lo < a <= left_hi:
            out.append(a)
        elif right_lo <= a < right_hi or (k == 1 and a == N):
            # the right end is closed for k = 1 so the blocks partition A
            out.append(a)
    return tuple(out)


def mass_profile(A: IntSet, delta) -> MassProfile:
    """Share of A in each symmetric pair of edge blocks of width ``delta N``."""
    if len(A) == 0:
        raise ValueError("the set is empty")
    d = _delta(delta)
    if not 0 < d <= Fraction(1, 4):
        raise ValueError("delta must lie in (0, 1/4]")
    l = math.floor(1 / (2 * d))
    blocks = [_block(A, k, d) for k in range(1, l + 1)]
    size = len(A)
    alphas = [len(b) / size for b in blocks]
    inner = size - sum(len(b) for b in blocks)
    return MassProfile(d, l, alphas, inner / size, blocks)


@dataclass
class Lemma22Report:
    k: int
    delta: Fraction
    size: int
    alpha: float
    rhs: float
    holds: bool
    vacuous: bool
    sumset_size: int
    sumset_contained: bool
    count_lhs: int
    count_rhs: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["delta"] = str(self.delta)
        return d


def _sumset3(block: Sequence[int]) -> set[int]:
    s2 = {a + b for a in block for b in block}
    return {x + c for x in s2 for c in block}


def lemma22_check(A: IntSet, g: int, delta, k: int) -> Lemma22Report:
    """Edge-block bound ``|A| <= (72 g delta N / alpha_k^3)^(1/3)`` for a B_3[g]-set.

    Also confirms that the threefold sumset of the block lies in the four
    intervals of length ``3 delta N`` that the counting argument relies on.
    """
    verdict = is_bhg(A, 3, g)
    if not verdict.ok:
        raise ValueError(f"not a B_3[{g}] set: {verdict.max_count} representations of {verdict.witness}")
    d = _delta(delta)
    if not 0 < d < Fraction(1, 4):
        raise ValueError("delta must lie in (0, 1/4)")
    N = A.N
    if not N > 2 / d:
        raise ValueError(f"need N > 2/delta = {float(2 / d)}")
    prof = mass_profile(A, d)
    if not 1 <= k <= prof.l:
        raise ValueError(f"k must lie in [1, {prof.l}]")
    block = prof.blocks[k - 1]
    alpha = prof.alphas[k - 1]
    sums = _sumset3(block)
    windows = [
        (3 * (k - 1) * d * N, 3 * k * d * N),
        ((1 + (k - 2) * d) * N, (1 + (k + 1) * d) * N),
        ((2 - (k + 1) * d) * N, (2 - (k - 2) * d) * N),
        ((3 - 3 * k * d) * N, (3 - 3 * (k - 1) * d) * N),
    ]
    contained = all(any(lo <= s <= hi for lo, hi in windows) for s in sums)
    count_lhs = math.comb(len(block) + 2, 3)
    if alpha == 0:
        return Lemma22Report(k, d, len(A), 0.0, math.inf, True, True, len(sums), contained,
                             count_lhs, g * len(sums))
    rhs = (72 * g * float(d) * N / alpha ** 3) ** (1 / 3)
    return Lemma22Report(k, d, len(A), alpha, rhs, len(A) <= rhs, False, len(sums), contained,
                         count_lhs, g * len(sums))


# -- exponential sums ----------------------------------------------------------

@dataclass
class ExpSumReport:
    j: int
    abs_f: float
    finite_bound: float
    margin: float
    clean_bound: float
    clean_margin: float
    Q: float


def _expsum_parts(A: IntSet, h: int, g: int):
    N = A.N
    size = len(A)
    Q = size ** h / (math.factorial(h) * h * g * N)
    step = math.pi / (h * N)
    finite = (math.factorial(h) * g * abs(math.sin(math.pi * Q - step)) / math.sin(step)) ** (1 / h)
    x = math.pi * Q
    clean = size * ((math.sin(x) / x) ** (1 / h) if x > 0 else 1.0)
    return Q, finite, clean


def expsum_sweep(A: IntSet, h: int, g: int, js: Sequence[int] | None = None) -> list[ExpSumReport]:
    """``|f(2 pi j/(hN))|`` against the finite-N Fourier bound for each ``j``.

    The finite bound is ``(h! g |sin(pi Q - pi/(hN))| / sin(pi/(hN)))^(1/h)``
    with ``Q = |A|^h / (h! h g N)``; ``clean_bound`` is the limiting form
    ``|A| (sin(pi Q)/(pi Q))^(1/h)``, reported but not asserted.
    """
    if len(A) == 0:
        raise ValueError("the set is empty")
    N = A.N
    if js is None:
        js = range(1, h * N)
    js = np.asarray(list(js), dtype=int)
    if js.size and (js.min() < 1 or js.max() > h * N - 1):
        raise ValueError(f"j must lie in [1, {h * N - 1}]")
    Q, finite, clean = _expsum_parts(A, h, g)
    a = np.asarray(A.elements, dtype=float)
    phase = 2.0 * np.pi * np.outer(js, a) / (h * N)
    absf = np.abs(np.exp(1j * phase).sum(axis=1))
    return [ExpSumReport(int(j), float(v), finite, finite - float(v), clean, clean - float(v), Q)
            for j, v in zip(js, absf)]


def expsum_check(A: IntSet, h: int, g: int, j: int) -> ExpSumReport:
    verdict = is_bhg(A, h, g)
    if not verdict.ok:
        raise ValueError(f"not a B_{h}[{g}] set")
    return expsum_sweep(A, h, g, [j])[0]


# -- windowed representation sums -----------------------------------------------

def window_constant(h: int) -> float:
    if h == 2:
        return 4.0 / (math.pi + 2.0) ** 2
    return math.cos(math.pi / h) ** h


@dataclass
class WindowCheck:
    h: int
    H_window: int
    mu: float
    lhs: float
    rhs_classic: float
    rhs_psi: float
    ratio: float
    classic_ratio: float
    psi_ratio: float
    best_mu: float
    lhs_at_best_mu: float

    def to_dict(self) -> dict:
        return asdict(self)


def window_check(A: IntSet, h: int, H_window: int, mu: float = 0.0,
                 psi_value: float = 1.0) -> WindowCheck:
    """``sum_{n=h}^{hN+H} |R(n) - R(n-H) - mu|`` with ``R`` the cumulative ordered count.

    Both right-hand sides are reported with their ratios to ``H |A|^h``; the
    limiting inequalities are not asserted at finite N. ``best_mu`` is the
    median of the window sums, which minimizes the left side exactly.
    """
    if H_window < 1:
        raise ValueError("the window length must be positive")
    prof = rep_profile(A, h)
    N = A.N
    top = h * N + H_window
    r = np.zeros(top + 1, dtype=object)
    r[:prof.ordered_counts.size] = prof.ordered_counts
    R = np.cumsum(r)
    n = np.arange(h, top + 1)
    prev = np.where(n - H_window >= 0, R[np.maximum(n - H_window, 0)], 0)
    windows = (R[n] - prev).astype(float)
    lhs = float(np.abs(windows - mu).sum())
    best_mu = float(np.median(windows))
    lhs_best = float(np.abs(windows - best_mu).sum())
    scale = H_window * float(len(A)) ** h
    L = window_constant(h)
    return WindowCheck(h, H_window, float(mu), lhs, L * scale, psi_value ** h * L * scale,
                       lhs / scale, L, psi_value ** h * L, best_mu, lhs_best)
