import itertools
import math
from fractions import Fraction as F

import pytest

from geomwords import closed_forms as cf
from geomwords import oracle
from geomwords.words import WeakOrderPattern, inversions, weak_order_pattern


def fubini(n):
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(math.comb(m, k) * a[m - k] for k in range(1, m + 1)))
    return a[n]


@pytest.mark.parametrize("n", range(0, 9))
def test_pattern_counts_are_fubini_numbers(n):
    ranks = oracle.pattern_array(n)
    assert len(ranks) == fubini(n)
    assert len({tuple(r) for r in ranks.tolist()}) == len(ranks)


def test_known_counts():
    assert len(oracle.pattern_array(8)) == 545_835


@pytest.mark.parametrize("n", range(1, 6))
def test_patterns_match_word_enumeration(n):
    # every weak order of n positions is the pattern of some word over 1..n
    seen = {weak_order_pattern(w).ranks for w in itertools.product(range(1, n + 1), repeat=n)}
    got = {tuple(r) for r in oracle.pattern_array(n).tolist()}
    assert got == seen


def test_generation_order_is_fixed():
    assert oracle.pattern_array(2).tolist() == [[1, 1], [2, 1], [1, 2]]
    first = [p.ranks for p in oracle.iter_patterns(3)]
    # choice 0 ties the new position with rank 1, parents in order
    assert first[:3] == [(1, 1, 1), (2, 1, 1), (1, 2, 1)]


def test_capacity():
    with pytest.raises(oracle.CapacityError):
        oracle.pattern_array(10)
    with pytest.raises(oracle.CapacityError):
        oracle.weak_order_moments("knuth", 12, F(1, 2))
    with pytest.raises(oracle.CapacityError):
        oracle.truncated_moments("knuth", 5, F(1, 2), 50)
    with pytest.raises(oracle.CapacityError):
        oracle.permutation_enumeration_moments("knuth", 9)


def test_pattern_probability_examples():
    half = F(1, 2)
    assert oracle.pattern_probability(WeakOrderPattern.from_ranks([1, 1]), half) == F(1, 3)
    assert oracle.pattern_probability(WeakOrderPattern.from_ranks([1, 2]), half) == F(1, 3)
    assert sum(oracle.pattern_probability(p, half) for p in oracle.iter_patterns(3)) == 1


def test_pattern_probability_degenerate_law():
    for pat in oracle.iter_patterns(3):
        expected = 1 if pat.k == 1 else 0
        assert oracle.pattern_probability(pat, 0) == expected


@pytest.mark.parametrize("q", [F(1, 4), F(1, 2), F(3, 4)])
def test_pattern_probability_against_direct_summation(q):
    # sum the true word probabilities over {1..K}^3 pattern by pattern
    K, n = 50, 3
    p = 1 - q
    direct = {}
    for w in itertools.product(range(1, K + 1), repeat=n):
        key = weak_order_pattern(w).ranks
        direct[key] = direct.get(key, 0.0) + float(p ** n * q ** (sum(w) - n))
    tail = 1 - (1 - float(q) ** K) ** n
    for pat in oracle.iter_patterns(n):
        exact = oracle.pattern_probability(pat, q)
        assert direct[pat.ranks] <= float(exact) + 1e-15
        assert float(exact) <= direct[pat.ranks] + tail + 1e-15


def test_weak_order_moment_examples():
    half = F(1, 2)
    assert oracle.weak_order_moments("inversions", 2, half).mean == F(1, 3)
    rep = oracle.weak_order_moments("knuth", 1, F(2, 5))
    assert (rep.mean, rep.second_factorial_moment, rep.variance) == (0, 0, 0)
    rep = oracle.weak_order_moments("knuth", 2, half)
    assert (rep.mean, rep.variance) == (F(2, 3), F(2, 9))
    assert rep.provenance == "oracle-exact"


@pytest.mark.parametrize("statistic", ["inversions", "knuth"])
@pytest.mark.parametrize("q", [F(1, 5), F(1, 2), F(3, 4)])
def test_closed_forms_match_oracle(statistic, q):
    for n in range(0, 7):
        ref = oracle.weak_order_moments(statistic, n, q)
        got = cf.closed_form_moments(statistic, n, q)
        assert (got.mean, got.second_factorial_moment, got.variance) == \
            (ref.mean, ref.second_factorial_moment, ref.variance)


def test_distribution_examples():
    half = F(1, 2)
    assert oracle.distribution("inversions", 2, half).entries == {0: F(2, 3), 1: F(1, 3)}
    assert oracle.distribution("knuth", 2, half).entries == {0: F(1, 3), 1: F(2, 3)}


@pytest.mark.parametrize("statistic", ["inversions", "knuth"])
@pytest.mark.parametrize("n", range(0, 7))
def test_distribution_tables(statistic, n):
    q = F(2, 7)
    table = oracle.distribution(statistic, n, q)
    assert sum(table.entries.values()) == 1
    assert all(0 <= k <= math.comb(n, 2) for k in table.entries)
    mean, e2, var = table.moments()
    rep = oracle.weak_order_moments(statistic, n, q)
    assert (mean, e2, var) == (rep.mean, rep.second_factorial_moment, rep.variance)


def test_inversion_table_approaches_mahonian():
    n = 4
    counts = {}
    for perm in itertools.permutations(range(n)):
        k = inversions(perm)
        counts[k] = counts.get(k, 0) + 1
    mahonian = {k: F(c, math.factorial(n)) for k, c in counts.items()}
    gaps = []
    for e in (2, 4, 6):
        table = oracle.distribution("inversions", n, 1 - F(1, 10 ** e)).entries
        gaps.append(max(abs(table.get(k, 0) - mahonian.get(k, 0)) for k in set(table) | set(mahonian)))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-5


def test_truncated_examples():
    box = oracle.truncated_moments("inversions", 1, F(1, 2), 7)
    assert (box.mean_lower, box.mean_upper) == (0, 0)
    box = oracle.truncated_moments("inversions", 2, F(1, 2), 1)
    assert (box.mean_lower, box.mean_upper) == (0, F(3, 4))
    assert box.mean_lower <= F(1, 3) <= box.mean_upper
    box = oracle.truncated_moments("inversions", 2, F(1, 2), 40)
    assert box.mean_width < 1e-10
    assert box.mean_lower <= F(1, 3) <= box.mean_upper


@pytest.mark.parametrize("statistic", ["inversions", "knuth"])
@pytest.mark.parametrize("q", [F(1, 4), F(1, 2), F(3, 4)])
def test_truncated_encloses_weak_order(statistic, q):
    for n in (2, 3):
        ref = oracle.weak_order_moments(statistic, n, q)
        second = ref.second_factorial_moment + ref.mean
        for M in (3, 10, 40):
            box = oracle.truncated_moments(statistic, n, q, M)
            assert box.contains(ref.mean, second)
        assert box.mean_width < F(1, 10 ** 3)


def test_truncated_width_shrinks():
    q = F(1, 2)
    widths = [oracle.truncated_moments("knuth", 3, q, M).mean_width for M in (5, 10, 20)]
    assert widths[0] > widths[1] > widths[2] > 0


@pytest.mark.parametrize("statistic, mean, var", [
    ("inversions", F(3, 2), F(11, 12)),
    ("knuth", F(4, 3), F(8, 9)),
])
def test_permutation_enumeration_examples(statistic, mean, var):
    rep = oracle.permutation_enumeration_moments(statistic, 3)
    assert (rep.mean, rep.variance) == (mean, var)
    rep = oracle.permutation_enumeration_moments(statistic, 1)
    assert (rep.mean, rep.variance) == (0, 0)


@pytest.mark.parametrize("statistic", ["inversions", "knuth"])
def test_permutation_enumeration_equals_limit(statistic):
    for n in range(1, 8):
        rep = oracle.permutation_enumeration_moments(statistic, n)
        assert (rep.mean, rep.variance) == cf.permutation_limit_moments(n, statistic)
