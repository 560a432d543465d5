"""Constructive covering: witness extraction or a certified count bound.

An interval J is cut into ``k * half_inv`` equal pieces.  Pieces whose labels
agree modulo ``half_inv`` have centres forming a length-``k`` progression with
gap ``|J| / k``.  If every piece of some class meets X, those centres are a
witness with relative error at most ``eps = 1 / (2 * half_inv)``.  Otherwise one
empty piece per class is dropped and the survivors are refined again, down to
pieces shorter than 1, each of which holds at most one integer.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import InvalidArgument, ResourceError
from .progressions import ApproxReport, Progression, eval_error, fmt_q, parse_q
from .sets import IntegerSet, window_count

MAX_INTERVALS = 1_000_000
SERIALIZE_LEVEL_CAP = 100_000


@dataclass(frozen=True)
class CoveringParams:
    k: int
    half_inv: int
    epsilon: Fraction
    requested: Fraction

    @property
    def pieces(self) -> int:
        return self.k * self.half_inv

    @property
    def kept(self) -> int:
        """Pieces surviving one step: (k-1)/(2 eps)."""
        return (self.k - 1) * self.half_inv

    def to_dict(self):
        return {
            "k": self.k,
            "half_inv": self.half_inv,
            "epsilon": fmt_q(self.epsilon),
            "epsilon_requested": fmt_q(self.requested),
        }


def admissible_eps(eps_requested, k: int) -> CoveringParams:
    """Largest eps <= the request with 1/(2 eps) an integer."""
    if isinstance(eps_requested, str):
        eps_requested = parse_q(eps_requested)
    eps = Fraction(eps_requested)
    if not 0 < eps <= Fraction(1, 2):
        raise InvalidArgument(f"eps must lie in (0, 1/2], got {eps}")
    if k < 2:
        raise InvalidArgument(f"k must be >= 2, got {k}")
    half_inv = math.ceil(1 / (2 * eps))
    return CoveringParams(k, half_inv, Fraction(1, 2 * half_inv), eps)


def lemma3_exponent(params: CoveringParams) -> float:
    """log((k-1)/(2 eps)) / log(k/(2 eps)); always < 1."""
    return math.log(params.kept) / math.log(params.pieces)


def closed_form_bound_holds(count: int, params: CoveringParams, n: int, dps: int = 50) -> bool:
    """Rigorous check of count <= ((k-1) h) * n ** s* using interval arithmetic.

    Passes only if ``count`` is at most the lower end of the enclosure.
    """
    iv = mpmath.iv
    old = iv.dps
    iv.dps = dps
    try:
        a, b = iv.mpf(params.kept), iv.mpf(params.pieces)
        s = iv.log(a) / iv.log(b)
        rhs = a * iv.exp(s * iv.log(iv.mpf(n)))
        return count <= rhs.a
    finally:
        iv.dps = old


def stopping_depth(n: int, params: CoveringParams) -> int:
    """Smallest N with (n - 1) * (2 eps / k) ** N < 1."""
    N, scale = 0, 1
    while n - 1 >= scale:
        N += 1
        scale *= params.pieces
    return N


@dataclass(frozen=True, eq=False)
class Interval:
    """[lo, hi) with exact endpoints lo_num/den and hi_num/den; [lo, hi] when ``closed``.

    Endpoints are kept as integer numerators over a shared denominator so that
    refinement never touches Fraction arithmetic.
    """

    lo_num: int
    hi_num: int
    den: int = 1
    closed: bool = False

    @classmethod
    def of(cls, lo, hi, closed: bool = False) -> "Interval":
        lo, hi = Fraction(lo), Fraction(hi)
        den = lo.denominator * hi.denominator // math.gcd(lo.denominator, hi.denominator)
        return cls(lo.numerator * (den // lo.denominator), hi.numerator * (den // hi.denominator), den, closed)

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return (
            self.closed == other.closed
            and self.lo_num * other.den == other.lo_num * self.den
            and self.hi_num * other.den == other.hi_num * self.den
        )

    def __hash__(self):
        return hash((self.lo, self.hi, self.closed))

    @property
    def lo(self) -> Fraction:
        return Fraction(self.lo_num, self.den)

    @property
    def hi(self) -> Fraction:
        return Fraction(self.hi_num, self.den)

    @property
    def length(self) -> Fraction:
        return Fraction(self.hi_num - self.lo_num, self.den)

    def int_range(self) -> tuple[int, int]:
        """First and last integer inside (empty when first > last)."""
        first = -(-self.lo_num // self.den)
        if self.closed:
            last = self.hi_num // self.den
        else:
            last = -(-self.hi_num // self.den) - 1
        return first, last

    def count(self, els) -> int:
        first, last = self.int_range()
        if first > last:
            return 0
        return bisect_right(els, last) - bisect_left(els, first)

    def contains(self, x) -> bool:
        x = Fraction(x)
        if x < self.lo:
            return False
        return x <= self.hi if self.closed else x < self.hi

    def split(self, parts: int) -> list["Interval"]:
        width = self.hi_num - self.lo_num
        base = self.lo_num * parts
        den = self.den * parts
        out = [Interval(base + i * width, base + (i + 1) * width, den) for i in range(parts)]
        if self.closed:
            last = out[-1]
            out[-1] = Interval(last.lo_num, last.hi_num, den, True)
        return out

    def to_list(self):
        return [fmt_q(self.lo), fmt_q(self.hi), self.closed]


@dataclass(frozen=True)
class Witness:
    progression: Progression
    class_index: int
    level: int
    interval: Interval
    report: ApproxReport

    kind = "witness"

    def to_dict(self):
        return {
            "kind": "witness",
            "progression": self.progression.to_dict(),
            "class_index": self.class_index,
            "level": self.level,
            "interval": self.interval.to_list(),
            "report": self.report.to_dict(),
        }


@dataclass(frozen=True)
class Bound:
    count_bound: int
    exponent: float
    constant: int
    actual_count: int
    closed_form: bool

    kind = "bound"

    def to_dict(self):
        return {
            "kind": "bound",
            "count_bound": self.count_bound,
            "exponent": self.exponent,
            "constant": self.constant,
            "actual_count": self.actual_count,
            "closed_form_holds": self.closed_form,
        }


@dataclass(frozen=True)
class CoveringCertificate:
    params: CoveringParams
    m: int
    n: int
    root_interval: Interval
    depth: int
    levels: tuple  # tuple of tuples of Interval (intervals meeting X)
    discarded_empty: tuple  # per level: survivors dropped for missing X
    outcome: object  # Witness | Bound
    aggressive: bool = False

    @property
    def is_witness(self) -> bool:
        return isinstance(self.outcome, Witness)

    def to_dict(self, with_levels: bool = True):
        levels = []
        for ell, ivs in enumerate(self.levels):
            entry = {"level": ell, "count": len(ivs), "budget": self.params.kept**ell}
            if with_levels:
                if len(ivs) > SERIALIZE_LEVEL_CAP:
                    entry["truncated"] = True
                else:
                    entry["intervals"] = [iv.to_list() for iv in ivs]
            levels.append(entry)
        return {
            "params": self.params.to_dict(),
            "m": self.m,
            "n": self.n,
            "root_interval": self.root_interval.to_list(),
            "depth": self.depth,
            "aggressive": self.aggressive,
            "levels": levels,
            "outcome": self.outcome.to_dict(),
        }

    def render(self) -> str:
        p = self.params
        lines = [
            f"window [{self.m + 1}, {self.m + self.n}]  k={p.k}  eps={fmt_q(p.epsilon)}  depth={self.depth}",
            f"{'level':>5}  {'intervals':>10}  {'budget':>12}",
        ]
        for ell, ivs in enumerate(self.levels):
            lines.append(f"{ell:>5}  {len(ivs):>10}  {p.kept ** ell:>12}")
        o = self.outcome
        if isinstance(o, Witness):
            pts = ", ".join(fmt_q(x) for x in o.progression.points())
            lines.append(
                f"witness at level {o.level}, class {o.class_index}: ({pts}) "
                f"relative error {fmt_q(o.report.relative_error)}"
            )
        else:
            lines.append(
                f"bound: {o.actual_count} <= {o.count_bound}  (s* = {o.exponent:.6f}, "
                f"closed form {'holds' if o.closed_form else 'FAILS'})"
            )
        return "\n".join(lines)


def _witness(J: Interval, pieces, cls: int, params: CoveringParams, X: IntegerSet, level: int) -> Witness:
    step = J.length / params.pieces
    P = Progression(J.lo + (cls + Fraction(1, 2)) * step, step * params.half_inv, params.k)
    rep = eval_error(P, X)
    if rep.max_distance > params.epsilon * P.gap:
        raise AssertionError(f"covering witness failed validation: {rep.relative_error}")
    return Witness(P, cls + 1, level, J, rep)


def cover_step(J: Interval, params: CoveringParams, X: IntegerSet, level: int = 0, aggressive: bool = False):
    """One refinement of J.  Returns a :class:`Witness` or the surviving pieces."""
    if J.length <= 0:
        raise InvalidArgument("interval has zero length")
    h = params.half_inv
    pieces = J.split(params.pieces)
    occupied = [iv.count(X.elements) > 0 for iv in pieces]
    drop = set()
    for cls in range(h):
        labels = range(cls, params.pieces, h)
        empty = [i for i in labels if not occupied[i]]
        if not empty:
            return _witness(J, pieces, cls, params, X, level)
        drop.update(empty if aggressive else empty[:1])
    return [iv for i, iv in enumerate(pieces) if i not in drop]


def cover_recurse(
    m: int,
    n: int,
    params: CoveringParams,
    X: IntegerSet,
    aggressive: bool = False,
    max_intervals: int = MAX_INTERVALS,
) -> CoveringCertificate:
    """Refine J0 = [m+1, m+n] level by level to the stopping depth.

    Traversal is breadth first and left to right, so the first witness found
    is the shallowest, then leftmost, then lowest class.
    """
    if n < 1 or m < 0:
        raise InvalidArgument(f"need m >= 0 and n >= 1, got m={m}, n={n}")
    root = Interval(m + 1, m + n, 1, True)
    depth = stopping_depth(n, params)
    levels = [(root,) if root.count(X.elements) else ()]
    dropped = [0]

    def cert(outcome):
        return CoveringCertificate(
            params, m, n, root, depth, tuple(levels), tuple(dropped), outcome, aggressive
        )

    for ell in range(depth):
        nxt, gone = [], 0
        for J in levels[-1]:
            res = cover_step(J, params, X, ell, aggressive)
            if isinstance(res, Witness):
                return cert(res)
            for iv in res:
                if iv.count(X.elements):
                    nxt.append(iv)
                else:
                    gone += 1
        if len(nxt) > max_intervals:
            raise ResourceError(f"level {ell + 1} holds {len(nxt)} intervals (cap {max_intervals})")
        levels.append(tuple(nxt))
        dropped.append(gone)
    actual = window_count(X, m, n)
    bound = Bound(
        count_bound=params.kept**depth,
        exponent=lemma3_exponent(params),
        constant=params.kept,
        actual_count=actual,
        closed_form=closed_form_bound_holds(actual, params, n),
    )
    return cert(bound)


@dataclass
class WitnessSearch:
    """Outcome of :func:`find_witness`."""

    params: CoveringParams
    certificate: CoveringCertificate | None = None
    report: ApproxReport | None = None
    strongest_bounds: list = field(default_factory=list)
    windows_tried: int = 0

    @property
    def found(self) -> bool:
        return self.certificate is not None

    def to_dict(self):
        d = {
            "found": self.found,
            "params": self.params.to_dict(),
            "windows_tried": self.windows_tried,
        }
        if self.found:
            d["certificate"] = self.certificate.to_dict(with_levels=False)
            d["report"] = self.report.to_dict()
        else:
            d["strongest_bounds"] = [c.to_dict(with_levels=False) for c in self.strongest_bounds]
        return d


def witness_schedule(top: int, params: CoveringParams, n_min=None, n_max=None) -> list[int]:
    n = n_min if n_min is not None else 2 * params.pieces
    n_max = top if n_max is None else n_max
    out = []
    while n < n_max:
        out.append(n)
        n *= 2
    if n_max >= 2 and (not out or out[-1] != n_max):
        out.append(n_max)
    return out


def find_witness(
    X: IntegerSet,
    k: int,
    eps,
    n_min: int | None = None,
    n_max: int | None = None,
    aggressive: bool = False,
) -> WitnessSearch:
    """Scan windows [m+1, m+n] (n doubling, m stepping by n/2) for a covering witness.

    Windows holding fewer than k elements cannot produce a witness and are
    skipped by jumping ahead to the next element.
    """
    params = admissible_eps(eps, k)
    els = X.elements
    if not els:
        raise InvalidArgument("empty set")
    top = els[-1]
    result = WitnessSearch(params)
    for n in witness_schedule(top, params, n_min, n_max):
        step = max(n // 2, 1)
        strongest = None
        m = 0
        while m <= top - 1:
            c = window_count(X, m, n)
            if c < k:
                # next grid offset whose window reaches a new element
                i = bisect_right(els, m + n)
                if i >= len(els):
                    break
                target = els[i] - n
                m = max(m + step, -(-target // step) * step)
                continue
            result.windows_tried += 1
            cert = cover_recurse(m, n, params, X, aggressive)
            if cert.is_witness:
                rep = eval_error(cert.outcome.progression, X)
                if rep.relative_error > params.epsilon:
                    raise AssertionError("witness failed re-validation")
                result.certificate, result.report = cert, rep
                return result
            if strongest is None or cert.outcome.actual_count > strongest.outcome.actual_count:
                strongest = cert
            m += step
        if strongest is not None:
            result.strongest_bounds.append(strongest)
    return result
