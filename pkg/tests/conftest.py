"""Independent brute-force oracles shared by the test modules."""

import itertools
from fractions import Fraction

import pytest

from approxap import IntegerSet, gen_powers, sieve_primes


def is_prime_td(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def primes_td(limit):
    return [n for n in range(2, limit + 1) if is_prime_td(n)]


def largest_factor_td(n):
    big, d = 1, 2
    while d * d <= n:
        while n % d == 0:
            big, n = d, n // d
        d += 1
    return max(big, n) if n > 1 else big


def dist_to_set(p, elements):
    return min(abs(p - x) for x in elements)


def brute_best_error(elements, k):
    """Optimal relative error by candidate enumeration, no assignment search.

    The optimal gap is (b - a) / d for elements a < b and 1 <= d < k, and for a
    fixed gap the optimal start is a kink or crossing of the distance
    functions, i.e. (y + y' - (j + j') gap) / 2 for elements y, y' and slots j, j'.
    """
    els = list(elements)
    best = None
    for a, b in itertools.combinations(els, 2):
        for d in range(1, k):
            g = Fraction(b - a, d)
            starts = {
                Fraction(y + y2, 2) - Fraction(j + j2, 2) * g
                for y in els
                for y2 in els
                for j in range(k)
                for j2 in range(k)
            }
            for s in starts:
                err = max(dist_to_set(s + j * g, els) for j in range(k)) / g
                if best is None or err < best:
                    best = err
    return best


@pytest.fixture(scope="session")
def primes_1e6():
    return sieve_primes(10**6)


@pytest.fixture(scope="session")
def pow2_40():
    return gen_powers(2, 2**40)


@pytest.fixture
def small_primes():
    return sieve_primes(10)
