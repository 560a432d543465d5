import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from approxap import (
    IntegerSet,
    InvalidArgument,
    OracleTooLarge,
    Progression,
    ap_points,
    best_ap_exact,
    best_ap_search,
    chebyshev_fit,
    eval_error,
    gen_powers,
    sieve_primes,
)
from approxap.progressions import assignment_error, feasible, fmt_q, parse_q

from conftest import brute_best_error, dist_to_set


def test_ap_points():
    assert ap_points(Progression(3, 2, 3)) == [3, 5, 7]
    assert ap_points(Progression(0, 1, 5)) == [0, 1, 2, 3, 4]
    assert ap_points(Progression(F(1, 2), F(1, 3), 2)) == [F(1, 2), F(5, 6)]


def test_progression_invariants():
    with pytest.raises(InvalidArgument):
        Progression(0, 0, 3)
    with pytest.raises(InvalidArgument):
        Progression(0, 1, 0)


def test_rational_rendering():
    assert fmt_q(0) == "0/1"
    assert fmt_q(F(-1, 4)) == "-1/4"
    assert parse_q("3/10") == F(3, 10)
    with pytest.raises(InvalidArgument):
        parse_q("0.1")


def test_eval_error_examples(small_primes):
    assert eval_error(Progression(3, 2, 3), small_primes).relative_error == 0
    rep = eval_error(Progression(10, 10, 5), IntegerSet.of([10, 20, 29, 41, 50]))
    assert [d for _, d in rep.nearest] == [0, 0, 1, 1, 0]
    assert rep.relative_error == F(1, 10)
    assert eval_error(Progression(1, 1, 1), IntegerSet.of([1, 9])).relative_error == 0


def test_eval_error_empty_set():
    with pytest.raises(InvalidArgument):
        eval_error(Progression(1, 1, 2), IntegerSet((), "empty"))


@given(
    st.sets(st.integers(1, 200), min_size=1, max_size=30),
    st.fractions(min_value=-50, max_value=250, max_denominator=12),
    st.fractions(min_value=F(1, 12), max_value=60, max_denominator=12),
    st.integers(1, 8),
)
def test_eval_error_nearest_is_genuine(values, start, gap, k):
    X = IntegerSet.of(values)
    P = Progression(start, gap, k)
    rep = eval_error(P, X)
    for p, (x, d) in zip(P.points(), rep.nearest):
        assert d == abs(p - x) == dist_to_set(p, values)
    assert rep.max_distance == max(d for _, d in rep.nearest)
    assert rep.relative_error == rep.max_distance / gap
    assert (rep.relative_error == 0) == all(p in X for p in P.points())


# --- minimax line fit ---------------------------------------------------------


def test_chebyshev_examples():
    assert chebyshev_fit([1, 2, 3]) == (1, 1, 0)
    assert chebyshev_fit([0, 0, 1]) == (F(-1, 4), F(1, 2), F(1, 4))
    assert chebyshev_fit([5, 5]) == (5, 0, 0)
    with pytest.raises(InvalidArgument):
        chebyshev_fit([1])


def grid_residual(ys):
    """Dense lattice over the gap (step 1/420) with the closed-form midrange start."""
    ys = np.asarray(ys, dtype=float)
    j = np.arange(len(ys))
    gaps = np.arange(-4200, 4201) / 420.0
    vals = ys[None, :] - gaps[:, None] * j[None, :]
    res = (vals.max(axis=1) - vals.min(axis=1)) / 2
    return res.min()


def test_chebyshev_matches_grid_oracle():
    rng = random.Random(20240601)
    for _ in range(200):
        k = rng.randint(2, 8)
        ys = [rng.randint(0, 10) for _ in range(k)]
        _, _, r = chebyshev_fit(ys)
        assert abs(float(r) - grid_residual(ys)) <= 1e-9, ys


@settings(max_examples=200)
@given(st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=6), min_size=2, max_size=8))
def test_chebyshev_beats_perturbations(ys):
    s, g, r = chebyshev_fit(ys)
    assert max(abs(y - s - j * g) for j, y in enumerate(ys)) == r
    for ds in (F(-1, 7), F(0), F(1, 9)):
        for dg in (F(-1, 11), F(0), F(1, 13)):
            other = max(abs(y - (s + ds) - j * (g + dg)) for j, y in enumerate(ys))
            assert other >= r


# --- fixed-assignment objective ----------------------------------------------


def bisect_assignment_error(ys, tol=F(1, 10**12)):
    lo, hi = F(0), F(len(ys))
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if feasible(ys, mid):
            hi = mid
        else:
            lo = mid
    return hi


@settings(max_examples=150)
@given(st.lists(st.integers(1, 60), min_size=2, max_size=6).map(sorted))
def test_assignment_error_matches_bisection(ys):
    exact = assignment_error(ys)
    assert feasible(ys, exact)
    if exact > 0:
        assert not feasible(ys, exact - F(1, 10**9))
    assert abs(bisect_assignment_error(ys) - exact) <= F(1, 10**12)


# --- exact oracle -------------------------------------------------------------


def test_best_ap_exact_examples(small_primes):
    rep = best_ap_exact(small_primes, 3, (2, 10))
    assert rep.relative_error == 0
    assert rep.progression.points() == [3, 5, 7]
    assert best_ap_exact(IntegerSet.of([1, 2, 4, 8]), 2, (1, 8)).relative_error == 0
    assert best_ap_exact(IntegerSet.of([1, 2, 4, 8]), 4, (1, 8)).relative_error > 0


def test_best_ap_exact_errors():
    X = IntegerSet.of(range(1, 60))
    with pytest.raises(OracleTooLarge):
        best_ap_exact(X, 3)
    with pytest.raises(InvalidArgument):
        best_ap_exact(X, 1, (1, 10))
    with pytest.raises(InvalidArgument):
        best_ap_exact(X, 3, (5, 5))


def test_best_ap_exact_against_brute_force():
    rng = random.Random(11)
    for _ in range(40):
        values = rng.sample(range(1, 40), rng.randint(2, 6))
        k = rng.randint(2, 4)
        X = IntegerSet.of(values)
        assert best_ap_exact(X, k).relative_error == brute_best_error(X.elements, k), (values, k)


def test_tie_break_smallest_gap_then_start():
    # {1..6} with k=3: every exact 3-AP ties at 0; smallest gap 1, smallest start 1
    rep = best_ap_exact(IntegerSet.of(range(1, 7)), 3)
    assert (rep.progression.start, rep.progression.gap) == (1, 1)


@settings(max_examples=40, deadline=None)
@given(
    st.sets(st.integers(1, 40), min_size=2, max_size=7),
    st.integers(1, 5),
    st.integers(0, 30),
    st.integers(2, 4),
)
def test_scale_translate_invariance(values, a, b, k):
    X = IntegerSet.of(values)
    Y = IntegerSet.of(a * x + b for x in values)
    rx, ry = best_ap_exact(X, k), best_ap_exact(Y, k)
    assert rx.relative_error == ry.relative_error
    assert eval_error(rx.progression.scaled(a, b), Y).relative_error == rx.relative_error
    assert ry.progression == rx.progression.scaled(a, b)


@settings(max_examples=40, deadline=None)
@given(st.sets(st.integers(1, 60), min_size=3, max_size=8))
def test_monotone_in_k(values):
    X = IntegerSet.of(values)
    errs = [best_ap_exact(X, k).relative_error for k in range(2, 6)]
    assert errs == sorted(errs)


def test_powers_of_two_fail_length_four():
    assert best_ap_exact(gen_powers(2, 2**12), 3).relative_error > 0
    assert best_ap_exact(gen_powers(2, 2**12), 4).relative_error > 0


# --- windowed heuristic -------------------------------------------------------


def test_best_ap_search_examples():
    rep = best_ap_search(sieve_primes(100), 3)
    assert rep.relative_error == 0 and rep.heuristic
    rep = best_ap_search(sieve_primes(30), 5)
    assert rep.relative_error == 0
    assert rep.progression.points() == [5, 11, 17, 23, 29]
    X = IntegerSet.of([1, 10, 100, 1000])
    assert best_ap_search(X, 3).relative_error == best_ap_exact(X, 3).relative_error


def test_best_ap_search_errors():
    with pytest.raises(InvalidArgument):
        best_ap_search(IntegerSet.of([1, 2]), 3)


def test_search_never_beats_oracle_and_windows_suffice():
    rng = random.Random(5)
    for _ in range(60):
        X = IntegerSet.of(rng.sample(range(1, 120), rng.randint(4, 16)))
        k = rng.randint(3, 4)
        exact = best_ap_exact(X, k).relative_error
        assert best_ap_search(X, k).relative_error >= exact
        # window scan alone is still an upper bound
        assert best_ap_search(X, k, refine_cap=0).relative_error >= exact
        # a window as wide as the set is the exact oracle
        assert best_ap_search(X, k, slack=len(X), refine_cap=0).relative_error == exact


def test_search_parallel_matches_serial():
    X = sieve_primes(3000)
    a = best_ap_search(X, 4, threads=1, refine_cap=0)
    b = best_ap_search(X, 4, threads=3, refine_cap=0)
    assert a == b
