"""Integer sets: construction, file I/O and windowed counting."""

from __future__ import annotations

import math
import re
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import DomainError, EmptySetError, InvalidArgument, OrderError, OverflowError_, ParseError

U64_MAX = 2**64 - 1
PROVENANCES = ("sieve", "powers", "squares", "file", "literal")


_INT = re.compile(r"[+-]?[0-9]+")


@dataclass(frozen=True)
class IntegerSet:
    """Strictly increasing positive integers plus a label and provenance tag."""

    elements: tuple[int, ...]
    label: str
    provenance: str = "literal"

    def __post_init__(self):
        els = tuple(int(x) for x in self.elements)
        object.__setattr__(self, "elements", els)
        if not self.label:
            raise InvalidArgument("label must be nonempty")
        if self.provenance not in PROVENANCES:
            raise InvalidArgument(f"unknown provenance {self.provenance!r}")
        for i, x in enumerate(els):
            if x < 1:
                raise DomainError(f"element {x} is not positive")
            if x > U64_MAX:
                raise OverflowError_(f"element {x} exceeds 64-bit capacity")
            if i and els[i - 1] >= x:
                raise OrderError(f"elements not strictly increasing at index {i}")

    @classmethod
    def of(cls, values: Iterable[int], label: str = "literal") -> "IntegerSet":
        """Build from any iterable, sorting and removing duplicates."""
        return cls(tuple(sorted(set(values))), label, "literal")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        i = bisect_left(self.elements, x)
        return i < len(self.elements) and self.elements[i] == x

    @property
    def max(self) -> int:
        if not self.elements:
            raise EmptySetError(f"set {self.label!r} is empty")
        return self.elements[-1]

    def restrict(self, lo, hi) -> "IntegerSet":
        """Elements in the closed range [lo, hi]."""
        i = bisect_left(self.elements, lo)
        j = bisect_right(self.elements, hi)
        return IntegerSet(self.elements[i:j], f"{self.label}[{lo}..{hi}]", self.provenance)


def _sieve_mask(limit: int) -> np.ndarray:
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    mask[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if mask[p]:
            mask[p * p :: 2 * p] = False
    return mask


def sieve_primes(limit: int) -> IntegerSet:
    if limit < 2:
        raise InvalidArgument(f"sieve limit must be >= 2, got {limit}")
    if limit > U64_MAX:
        raise OverflowError_("sieve limit exceeds 64-bit capacity")
    primes = np.flatnonzero(_sieve_mask(limit)).tolist()
    return IntegerSet(tuple(primes), f"primes<={limit}", "sieve")


def gen_powers(base: int, limit: int) -> IntegerSet:
    """Powers base**1, base**2, ... not exceeding ``limit``."""
    if base < 2:
        raise InvalidArgument(f"base must be >= 2, got {base}")
    if limit < base:
        raise EmptySetError(f"limit {limit} is below base {base}: no positive powers")
    if limit > U64_MAX:
        raise OverflowError_("limit exceeds 64-bit capacity")
    out = []
    v = base
    while v <= limit:
        out.append(v)
        v *= base
    return IntegerSet(tuple(out), f"powers{base}<={limit}", "powers")


def gen_squares(limit: int) -> IntegerSet:
    if limit < 1:
        raise EmptySetError(f"limit {limit} admits no positive squares")
    if limit > U64_MAX:
        raise OverflowError_("limit exceeds 64-bit capacity")
    r = math.isqrt(limit)
    return IntegerSet(tuple(i * i for i in range(1, r + 1)), f"squares<={limit}", "squares")


def window_count(X: IntegerSet, m: int, n: int) -> int:
    """Number of elements of X in [m+1, m+n]."""
    return bisect_right(X.elements, m + n) - bisect_left(X.elements, m + 1)


def load_set(path) -> IntegerSet:
    path = Path(path)
    label = path.stem or "file"
    provenance = "file"
    out: list[int] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                # header written by write_set
                key, _, value = line[1:].partition(":")
                key, value = key.strip(), value.strip()
                if key == "label" and value:
                    label = value
                elif key == "provenance" and value in PROVENANCES:
                    provenance = value
                continue
            if not _INT.fullmatch(line):
                raise ParseError(f"not a base-10 integer: {line!r}", lineno)
            v = int(line)
            if v <= 0:
                raise DomainError(f"value {v} is not positive", lineno)
            if v > U64_MAX:
                raise OverflowError_(f"line {lineno}: value exceeds 64-bit capacity")
            if out and v <= out[-1]:
                kind = "duplicate" if v == out[-1] else "descending"
                raise OrderError(f"{kind} value {v} after {out[-1]}", lineno)
            out.append(v)
    return IntegerSet(tuple(out), label, provenance)


def write_set(X: IntegerSet, path) -> None:
    lines = [f"# label: {X.label}", f"# provenance: {X.provenance}"]
    lines.extend(str(x) for x in X.elements)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
