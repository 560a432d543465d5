"""Smooth-number counting and the two inequalities bounding it.

For the L-th prime p_L, let A(N, L) be the number of n in [1, N] with no prime
factor above p_L.  Writing n = r^2 q with q squarefree gives at most sqrt(N)
choices of r and 2^L of q, so A <= sqrt(N) 2^L.  Integers with a larger prime
factor p_k number at most sum floor(N / p_k), so N - A <= that tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidArgument, ResourceError
from .sets import _sieve_mask

TABLE_CAP = 10**7


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return ``(root, squarefree)`` with ``n == root**2 * squarefree``."""
    if n < 1:
        raise InvalidArgument(f"n must be positive, got {n}")
    root = sq = 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            root *= p ** (e // 2)
            if e % 2:
                sq *= p
        p += 1 if p == 2 else 2
    return root, sq * n


@lru_cache(maxsize=4)
def _primes_upto(limit: int) -> np.ndarray:
    return np.flatnonzero(_sieve_mask(max(limit, 2)))


def nth_prime(L: int) -> int:
    if L < 1:
        raise InvalidArgument(f"prime index must be >= 1, got {L}")
    # p_L < L (ln L + ln ln L) for L >= 6
    limit = 15 if L < 6 else int(L * (math.log(L) + math.log(math.log(L)))) + 1
    return int(_primes_upto(limit)[L - 1])


@lru_cache(maxsize=2)
def largest_prime_factor_table(limit: int) -> np.ndarray:
    """lpf[n] for 0 <= n <= limit, with lpf[1] = 1 and lpf[0] = 0.

    Each prime overwrites its multiples in increasing order, so the last
    write is the largest prime factor.
    """
    if limit > TABLE_CAP:
        raise ResourceError(f"table size {limit} exceeds cap {TABLE_CAP}")
    lpf = np.zeros(limit + 1, dtype=np.int64)
    if limit >= 1:
        lpf[1] = 1
    for p in _primes_upto(limit).tolist():
        lpf[p::p] = p
    return lpf


@dataclass(frozen=True)
class SmoothCountRecord:
    N: int
    L: int
    p_L: int
    A: int
    sqrt_bound: float
    tail_sum: int

    @property
    def sqrt_bound_holds(self) -> bool:
        # A <= sqrt(N) 2^L, squared to stay in integers
        return self.A * self.A <= self.N * 4**self.L

    @property
    def tail_holds(self) -> bool:
        return self.N - self.A <= self.tail_sum

    @property
    def below_half(self) -> bool:
        return 2 * self.A < self.N

    def to_dict(self):
        return {
            "N": self.N,
            "L": self.L,
            "p_L": self.p_L,
            "A": self.A,
            "sqrt_bound": self.sqrt_bound,
            "tail_sum": self.tail_sum,
            "sqrt_bound_holds": self.sqrt_bound_holds,
            "tail_holds": self.tail_holds,
            "half_N": self.N / 2,
            "below_half": self.below_half,
        }

    CSV_HEADER = ["N", "L", "p_L", "A", "sqrt_bound", "tail_sum", "sqrt_bound_holds", "tail_holds", "below_half"]

    def csv_row(self):
        return [
            self.N, self.L, self.p_L, self.A, repr(self.sqrt_bound), self.tail_sum,
            self.sqrt_bound_holds, self.tail_holds, self.below_half,
        ]


def _record(N: int, L: int, lpf: np.ndarray, primes: np.ndarray) -> SmoothCountRecord:
    pL = nth_prime(L)
    A = int(np.count_nonzero(lpf[1 : N + 1] <= pL))
    big = primes[(primes > pL) & (primes <= N)]
    tail = int((N // big).sum()) if big.size else 0
    return SmoothCountRecord(N, L, pL, A, math.sqrt(N) * 2**L, tail)


def smooth_count(N: int, L: int, cap: int = TABLE_CAP) -> SmoothCountRecord:
    if N < 1 or L < 1:
        raise InvalidArgument(f"need N >= 1 and L >= 1, got N={N}, L={L}")
    if N > cap:
        raise ResourceError(f"N={N} exceeds the table cap {cap}")
    return _record(N, L, largest_prime_factor_table(N), _primes_upto(N))


def contradiction_scan(L: int, schedule, cap: int = TABLE_CAP) -> list[SmoothCountRecord]:
    """Records for each N in ``schedule``; ``below_half`` marks A < N/2."""
    schedule = list(schedule)
    if not schedule:
        return []
    if schedule != sorted(schedule):
        raise InvalidArgument("schedule must be ascending")
    if schedule[0] < 1 or L < 1:
        raise InvalidArgument("N and L must be positive")
    top = schedule[-1]
    if top > cap:
        raise ResourceError(f"N={top} exceeds the table cap {cap}")
    lpf = largest_prime_factor_table(top)
    primes = _primes_upto(top)
    return [_record(N, L, lpf, primes) for N in schedule]


def first_below_half(records) -> int | None:
    for r in records:
        if r.below_half:
            return r.N
    return None
