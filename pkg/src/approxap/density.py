"""Best-window counts, log-density profiles and the dyadic reciprocal ledger."""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np

from .errors import EmptySetError, InvalidArgument
from .progressions import fmt_q
from .sets import IntegerSet


def max_window_count(X: IntegerSet, n: int) -> tuple[int, int]:
    """Max over m in [0, max(X)-1] of #X ∩ [m+1, m+n], with the smallest maximizing m.

    A best window can be slid right until its left end meets an element x_i
    and then left until it would drop the last element it holds or pick up
    x_{i-1}; that gives the smallest offset for each starting element.
    """
    els = X.elements
    if not els:
        raise EmptySetError("empty set")
    if n < 1:
        raise InvalidArgument(f"window length must be positive, got {n}")
    best_count, best_m = 0, 0
    j = 0
    for i, x in enumerate(els):
        if j < i:
            j = i
        while j + 1 < len(els) and els[j + 1] <= x + n - 1:
            j += 1
        count = j - i + 1
        m = max(els[i - 1] if i else 0, els[j] - n)
        if count > best_count or (count == best_count and m < best_m):
            best_count, best_m = count, m
    return best_count, best_m


@dataclass(frozen=True)
class DensityEntry:
    n: int
    best_count: int
    best_m: int
    ratio: float

    def to_dict(self):
        return {"n": self.n, "best_count": self.best_count, "best_m": self.best_m, "ratio": self.ratio}


@dataclass(frozen=True)
class DensityProfile:
    entries: tuple[DensityEntry, ...]
    truncation_m_max: int

    def to_dict(self):
        return {
            "entries": [e.to_dict() for e in self.entries],
            "truncation_m_max": self.truncation_m_max,
        }

    def csv_rows(self):
        header = ["n", "best_count", "best_m", "ratio"]
        return header, [[e.n, e.best_count, e.best_m, repr(e.ratio)] for e in self.entries]


def dyadic_schedule(top: int) -> list[int]:
    out, n = [], 2
    while n <= top:
        out.append(n)
        n *= 2
    return out


def density_profile(X: IntegerSet, schedule=None) -> DensityProfile:
    if not len(X):
        raise EmptySetError("empty set")
    if schedule is None:
        schedule = dyadic_schedule(X.max)
    schedule = list(schedule)
    if any(n < 2 for n in schedule):
        raise InvalidArgument("schedule values must be >= 2")
    if schedule != sorted(schedule):
        raise InvalidArgument("schedule must be ascending")
    entries = []
    for n in schedule:
        c, m = max_window_count(X, n)
        entries.append(DensityEntry(n, c, m, math.log(c) / math.log(n)))
    return DensityProfile(tuple(entries), X.max - 1)


@dataclass(frozen=True)
class ReciprocalLedger:
    threshold: int
    partial_sum: Fraction
    dyadic_counts: tuple[tuple[int, int], ...]
    dyadic_bound: Fraction
    fit_C: float | None
    fit_s: float | None

    @property
    def holds(self) -> bool:
        return self.partial_sum <= self.dyadic_bound

    def to_dict(self):
        return {
            "threshold": self.threshold,
            "partial_sum": fmt_q(self.partial_sum),
            "partial_sum_decimal": float(self.partial_sum),
            "dyadic_counts": [list(b) for b in self.dyadic_counts],
            "dyadic_bound": fmt_q(self.dyadic_bound),
            "dyadic_bound_decimal": float(self.dyadic_bound),
            "inequality_holds": self.holds,
            "fit": {"C": self.fit_C, "s": self.fit_s},
        }

    def csv_rows(self):
        header = ["N", "block_lo", "block_hi", "count", "weight"]
        rows = [[N, 2**N, 2 ** (N + 1) - 1, c, fmt_q(Fraction(c, 2**N))] for N, c in self.dyadic_counts]
        return header, rows


def reciprocal_sum(values) -> Fraction:
    """Exact sum of 1/v by binary splitting; one gcd at the end."""
    vals = [gmpy2.mpz(v) for v in values]
    if not vals:
        return Fraction(0)

    def split(a, b):
        if b - a == 1:
            return gmpy2.mpz(1), vals[a]
        mid = (a + b) // 2
        n1, d1 = split(a, mid)
        n2, d2 = split(mid, b)
        return n1 * d2 + n2 * d1, d1 * d2

    num, den = split(0, len(vals))
    g = gmpy2.gcd(num, den)
    return Fraction(int(num // g), int(den // g))


def reciprocal_ledger(X: IntegerSet, T: int) -> ReciprocalLedger:
    """Partial reciprocal sum up to ``T`` against the dyadic block bound.

    Blocks are X_N = X ∩ [2^N, 2^{N+1}) for N >= 1, truncated at T; each
    element of X_N contributes at most 2^-N, so the bound dominates the sum.
    """
    if T < 1:
        raise InvalidArgument(f"threshold must be positive, got {T}")
    els = X.elements[: bisect_right(X.elements, T)]
    counts = []
    # block N=0 is {1}; listed only when 1 is present
    N = 0 if els and els[0] == 1 else 1
    while 2**N <= T:
        lo, hi = 2**N, min(2 ** (N + 1) - 1, T)
        c = bisect_right(els, hi) - bisect_right(els, lo - 1)
        counts.append((N, c))
        N += 1
    top = counts[-1][0] if counts else 0
    # sum c * 2^-N over a common denominator 2^top
    bound = Fraction(sum(c << (top - N) for N, c in counts), 1 << top)
    fit_C = fit_s = None
    nonempty = [(N, c) for N, c in counts if c > 0]
    if len(nonempty) >= 2:
        Ns = np.array([N for N, _ in nonempty], dtype=float)
        logs = np.log([c for _, c in nonempty])
        slope, intercept = np.polyfit(Ns * math.log(2), logs, 1)
        fit_s, fit_C = float(slope), float(math.exp(intercept))
    return ReciprocalLedger(T, reciprocal_sum(els), tuple(counts), bound, fit_C, fit_s)
