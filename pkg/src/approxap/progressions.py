"""Progressions, the relative approximation error, and best-progression search.

The error of a progression ``P`` against a set ``X`` is
``max_p min_x |p - x| / gap``.  Everything on the comparison path is exact:
points and distances are :class:`fractions.Fraction`, and the inner search
loops work on integer numerators and denominators.
"""

from __future__ import annotations

import itertools
from bisect import bisect_left
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

import gmpy2

from .errors import EmptySetError, InvalidArgument, OracleTooLarge
from .sets import IntegerSet

ORACLE_CAP = 40
DEFAULT_SLACK = 4
REFINE_CAP = 128


def _digits(n: int) -> str:
    # gmpy2 sidesteps the interpreter's int->str digit limit and is subquadratic
    return str(n) if n.bit_length() < 4000 else gmpy2.mpz(n).digits()


def fmt_q(q) -> str:
    """Render a rational as ``"p/q"`` (always with a denominator)."""
    q = Fraction(q)
    return f"{_digits(q.numerator)}/{_digits(q.denominator)}"


def parse_q(text: str) -> Fraction:
    """Parse ``"p/q"`` or a bare integer.  Decimal notation is rejected."""
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        if not sep:
            return Fraction(int(num))
        d = int(den)
        if d == 0:
            raise InvalidArgument(f"zero denominator in {text!r}")
        return Fraction(int(num), d)
    except ValueError:
        raise InvalidArgument(f"expected a rational 'p/q', got {text!r}") from None


@dataclass(frozen=True)
class Progression:
    start: Fraction
    gap: Fraction
    length: int

    def __post_init__(self):
        object.__setattr__(self, "start", Fraction(self.start))
        object.__setattr__(self, "gap", Fraction(self.gap))
        if self.gap <= 0:
            raise InvalidArgument(f"gap must be positive, got {self.gap}")
        if self.length < 1:
            raise InvalidArgument(f"length must be >= 1, got {self.length}")

    def point(self, j: int) -> Fraction:
        return self.start + j * self.gap

    def points(self) -> list[Fraction]:
        return [self.start + j * self.gap for j in range(self.length)]

    def scaled(self, a, b) -> "Progression":
        """Image under x -> a*x + b (a > 0)."""
        return Progression(a * self.start + b, a * self.gap, self.length)

    def to_dict(self) -> dict:
        return {"start": fmt_q(self.start), "gap": fmt_q(self.gap), "length": self.length}


@dataclass(frozen=True)
class ApproxReport:
    progression: Progression
    nearest: tuple  # ((element, distance), ...) one pair per point
    max_distance: Fraction
    relative_error: Fraction
    heuristic: bool = False

    def to_dict(self) -> dict:
        return {
            "progression": self.progression.to_dict(),
            "nearest": [[x, fmt_q(d)] for x, d in self.nearest],
            "max_distance": fmt_q(self.max_distance),
            "relative_error": fmt_q(self.relative_error),
            "heuristic": self.heuristic,
        }

    def sort_key(self):
        p = self.progression
        return (self.relative_error, p.gap, p.start)


def ap_points(P: Progression) -> list[Fraction]:
    return P.points()


def nearest_element(elements: Sequence[int], p) -> int:
    """Element closest to ``p``; the smaller one wins a tie."""
    i = bisect_left(elements, p)
    if i == 0:
        return elements[0]
    if i == len(elements):
        return elements[-1]
    lo, hi = elements[i - 1], elements[i]
    return lo if p - lo <= hi - p else hi


def eval_error(P: Progression, X: IntegerSet, heuristic: bool = False) -> ApproxReport:
    els = X.elements
    if not els:
        raise InvalidArgument("cannot evaluate against an empty set")
    nearest = []
    for p in P.points():
        x = nearest_element(els, p)
        nearest.append((x, abs(p - x)))
    worst = max(d for _, d in nearest)
    return ApproxReport(P, tuple(nearest), worst, worst / P.gap, heuristic)


def chebyshev_fit(targets: Sequence) -> tuple[Fraction, Fraction, Fraction]:
    """Minimax line through ``(j, targets[j])``: returns ``(start, gap, residual)``.

    The best uniform linear fit on distinct abscissae is unique and its error
    equals the largest error among all three-point subproblems.  On a triple
    ``i < j < l`` the best line is the chord through ``i`` and ``l`` shifted by
    half the deviation of ``j``; we pick the triple with the largest deviation
    and verify the resulting line against every index.
    """
    ys = [Fraction(t) for t in targets]
    k = len(ys)
    if k < 2:
        raise InvalidArgument(f"need at least two targets, got {k}")
    if k == 2:
        return ys[0], ys[1] - ys[0], Fraction(0)

    best = None
    for i, j, l in itertools.combinations(range(k), 3):
        slope = (ys[l] - ys[i]) / (l - i)
        dev = ys[j] - ys[i] - (j - i) * slope
        if best is None or abs(dev) > abs(best[0]):
            best = (dev, i, slope)
    dev, i, gap = best
    start = ys[i] - i * gap + dev / 2
    residual = abs(dev) / 2
    worst = max(abs(y - start - j * gap) for j, y in enumerate(ys))
    if worst != residual:
        raise AssertionError(f"minimax verification failed: {worst} != {residual}")
    return start, gap, residual


# --- fractional objective for a fixed assignment -----------------------------
#
# For slot values y_0 <= ... <= y_{k-1} we want
#     min over (s, g > 0) of max_j |y_j - s - j g| / g.
# For fixed g the best s is the midrange of y_j - j g, giving R(g) / (2 g) with R
# the (convex, piecewise linear) range.  R(g)/g is monotone on each linear piece,
# so the minimum sits at a breakpoint g = (y_j - y_i)/(j - i).  All arithmetic
# below is on integers: with g = D/d, eps = (max - min of d*y_t - t*D) / (2 D).


def _assignment_opt(ys: Sequence[int]):
    """Best ``(eps_num, eps_den, D, d, start_num, start_den)`` or None if constant.

    The tuple is the minimum under the order (eps, gap, start).
    """
    k = len(ys)
    best = None
    seen = set()
    for i in range(k - 1):
        yi = ys[i]
        for j in range(i + 1, k):
            D = ys[j] - yi
            if D <= 0:
                continue
            d = j - i
            c = gcd(D, d)
            D, d = D // c, d // c
            if (D, d) in seen:
                continue
            seen.add((D, d))
            vals = [d * y - t * D for t, y in enumerate(ys)]
            hi = max(vals)
            lo = min(vals)
            cand = (hi - lo, 2 * D, D, d, hi + lo, 2 * d)
            if best is None or _less(cand, best):
                best = cand
    return best


def _less(a, b) -> bool:
    """Order candidate tuples by (eps, gap, start) without building Fractions."""
    lhs, rhs = a[0] * b[1], b[0] * a[1]
    if lhs != rhs:
        return lhs < rhs
    lhs, rhs = a[2] * b[3], b[2] * a[3]
    if lhs != rhs:
        return lhs < rhs
    return a[4] * b[5] < b[4] * a[5]


def assignment_error(ys: Sequence[int]) -> Fraction:
    """Optimal relative error for a fixed non-decreasing slot assignment."""
    if len(ys) < 2:
        return Fraction(0)
    best = _assignment_opt(ys)
    if best is None:
        return Fraction(len(ys) - 1, 2)
    return Fraction(best[0], best[1])


def feasible(ys: Sequence[int], eps) -> bool:
    """Exact test: is there (s, g > 0) with |y_j - s - j g| <= eps*g for all j?

    For fixed eps the constraints are half-planes in (s, g); eliminating s
    leaves pairwise bounds on g, which is what we check here.
    """
    eps = Fraction(eps)
    lo, hi = Fraction(0), None
    for i in range(len(ys)):
        for j in range(i + 1, len(ys)):
            D, d = ys[j] - ys[i], j - i
            lo = max(lo, D / (d + 2 * eps))
            if d > 2 * eps:
                ub = D / (d - 2 * eps)
                hi = ub if hi is None else min(hi, ub)
    if hi is None:
        return True
    return lo <= hi and hi > 0


class _Search:
    """Depth-first enumeration of monotone assignments with prefix pruning.

    The optimum for a prefix of slots never exceeds the optimum for the full
    assignment, so a prefix already strictly worse than the incumbent is cut.
    Ties are kept so the (eps, gap, start) tie-break stays exact.
    """

    def __init__(self, k: int, best=None):
        self.k = k
        self.best = best
        self.nodes = 0

    def run(self, pool: Sequence[int], last=None):
        """Enumerate assignments from ``pool``; if ``last`` is set the final slot is fixed to it."""
        self._pool = pool
        self._last = last
        self._assign = []
        self._rec(0)
        return self.best

    def _bound(self, cand):
        if cand is None:  # constant prefix
            r = len(self._assign)
            return (r - 1, 2)
        return cand[:2]

    def _rec(self, lo: int):
        a = self._assign
        r = len(a)
        self.nodes += 1
        if r >= 3 or (r == 2 and r == self.k):
            cand = _assignment_opt(a)
            if self.best is not None:
                en, ed = self._bound(cand)
                if en * self.best[1] > self.best[0] * ed:
                    return
            if r == self.k:
                if cand is not None and (self.best is None or _less(cand, self.best)):
                    self.best = cand + (tuple(a),)
                return
        pool = self._pool
        if r == self.k - 1 and self._last is not None:
            if not a or a[-1] <= self._last:
                a.append(self._last)
                self._rec(lo)
                a.pop()
            return
        for idx in range(lo, len(pool)):
            a.append(pool[idx])
            self._rec(idx)
            a.pop()


def _to_report(best, k: int, Y: IntegerSet, heuristic: bool) -> ApproxReport:
    en, ed, D, d, sn, sd = best[:6]
    P = Progression(Fraction(sn, sd), Fraction(D, d), k)
    rep = eval_error(P, Y, heuristic=heuristic)
    if rep.relative_error > Fraction(en, ed):
        raise AssertionError("nearest-element evaluation exceeded the assignment optimum")
    return rep


def best_ap_exact(X: IntegerSet, k: int, range_=None, cap: int = ORACLE_CAP) -> ApproxReport:
    """Globally optimal length-``k`` progression against ``X`` restricted to ``range_``.

    ``range_`` is a closed integer interval ``(lo, hi)``; the error is measured
    against the elements of ``X`` inside it.  Exhaustive over monotone
    assignments, so the restricted set is capped at ``cap`` elements.
    """
    if k < 2:
        raise InvalidArgument(f"search needs k >= 2, got {k}")
    if not len(X):
        raise EmptySetError("empty set")
    lo, hi = range_ if range_ is not None else (X.elements[0], X.elements[-1])
    Y = X.restrict(lo, hi)
    if len(Y) < 2:
        raise InvalidArgument(f"range [{lo}, {hi}] holds fewer than two elements")
    if len(Y) > cap:
        raise OracleTooLarge(
            f"{len(Y)} elements in range exceed the oracle cap {cap}; use best_ap_search"
        )
    best = _Search(k).run(Y.elements)
    return _to_report(best, k, Y, heuristic=False)


def _scan_chunk(args):
    els, k, width, starts = args
    search = _Search(k)
    for i in starts:
        pool = els[i : i + width]
        search.run(pool, last=None if i == 0 else pool[-1])
    return search.best


def _refine(P: Progression, X: IntegerSet) -> ApproxReport:
    """Alternate nearest-element snapping with an exact re-solve until no gain."""
    rep = eval_error(P, X, heuristic=True)
    while True:
        opt = _assignment_opt([x for x, _ in rep.nearest])
        if opt is None:
            return rep
        Q = Progression(Fraction(opt[4], opt[5]), Fraction(opt[2], opt[3]), P.length)
        new = eval_error(Q, X, heuristic=True)
        if new.sort_key() >= rep.sort_key():
            return rep
        rep = new


def best_ap_search(
    X: IntegerSet,
    k: int,
    slack: int = DEFAULT_SLACK,
    threads: int = 1,
    refine_cap: int = REFINE_CAP,
) -> ApproxReport:
    """Scan windows of ``k + slack`` consecutive elements; an upper bound on the optimum.

    A window of width ``w`` contains every narrower window inside it, so only
    the widest width is scanned.  After the first window, only assignments that
    use the newly added element are enumerated.

    Sets of at most ``refine_cap`` elements also get a seeded pass: every pair
    of elements is used as the two end points of a progression, which is then
    refined by :func:`_refine`.  This catches wide progressions whose slots are
    far apart in X and so never share a window.
    """
    if k < 2:
        raise InvalidArgument(f"search needs k >= 2, got {k}")
    els = X.elements
    if len(els) < k:
        raise InvalidArgument(f"set has {len(els)} elements, fewer than k={k}")
    if len(els) < 2:
        raise InvalidArgument("search needs at least two elements")
    width = min(k + slack, len(els))
    n_windows = len(els) - width + 1
    if threads <= 1 or n_windows < 64:
        best = _scan_chunk((els, k, width, range(n_windows)))
    else:
        bounds = [n_windows * t // threads for t in range(threads + 1)]
        chunks = [(els, k, width, range(bounds[t], bounds[t + 1])) for t in range(threads)]
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = [b for b in ex.map(_scan_chunk, chunks) if b is not None]
        best = results[0]
        for b in results[1:]:
            if _less(b, best):
                best = b
    rep = _to_report(best, k, X, heuristic=True)
    if len(els) <= refine_cap:
        for a, b in itertools.combinations(els, 2):
            gap = Fraction(b - a, k - 1)
            cand = _refine(Progression(a, gap, k), X)
            if cand.sort_key() < rep.sort_key():
                rep = cand
    return rep
