"""Brute-force ground truth for the closed forms.

Three independent routes:

* weak-order summation: a word's statistics depend only on its weak order
  (ordered set partition of the positions), and the probability that a
  geometric word realises a given weak order has a product form.  Summing
  over all weak orders gives exact moments and distributions.
* truncated summation: every word in ``{1..M}^n`` is enumerated with its true
  probability; the missing tail mass gives a rigorous two-sided enclosure.
  This route does not use the product formula, so it checks it.
* permutation enumeration: uniform weights over ``n!`` permutations, the
  ``q -> 1`` model.
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .closed_forms import MomentReport, binom
from .law import GeometricLaw, Scalar, as_law
from .words import STATISTICS, WeakOrderPattern

__all__ = [
    "CapacityError",
    "DistributionTable",
    "MomentEnclosure",
    "MAX_PATTERN_N",
    "MAX_PERMUTATION_N",
    "MAX_TRUNCATED_WORDS",
    "pattern_array",
    "iter_patterns",
    "pattern_probability",
    "weak_order_moments",
    "distribution",
    "truncated_moments",
    "permutation_enumeration_moments",
]

MAX_PATTERN_N = 9
MAX_PERMUTATION_N = 8
MAX_TRUNCATED_WORDS = 10 ** 8


class CapacityError(RuntimeError):
    """The requested enumeration exceeds the oracle's supported size."""


@dataclass(frozen=True)
class DistributionTable:
    entries: dict
    statistic: str
    n: int
    law: GeometricLaw

    def moments(self) -> tuple:
        """``(mean, second factorial moment, variance)`` from the table."""
        mean = sum((k * pr for k, pr in self.entries.items()), self.law.zero())
        e2 = sum((k * (k - 1) * pr for k, pr in self.entries.items()), self.law.zero())
        return mean, e2, e2 + mean - mean * mean


@dataclass(frozen=True)
class MomentEnclosure:
    """Two-sided bounds on the mean and on the raw second moment ``E[Y^2]``."""

    mean_lower: Scalar
    mean_upper: Scalar
    second_lower: Scalar
    second_upper: Scalar

    @property
    def mean_width(self) -> Scalar:
        return self.mean_upper - self.mean_lower

    @property
    def second_width(self) -> Scalar:
        return self.second_upper - self.second_lower

    def contains(self, mean, second_moment) -> bool:
        return (self.mean_lower <= mean <= self.mean_upper
                and self.second_lower <= second_moment <= self.second_upper)


def _check_statistic(statistic: str) -> None:
    if statistic not in STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}; expected one of {sorted(STATISTICS)}")


# ----------------------------------------------------------- weak orders


@lru_cache(maxsize=None)
def pattern_array(n: int) -> np.ndarray:
    """All weak orders of ``n`` positions as rank rows (read-only int8 array).

    Built position by position.  Given the ranks of positions ``1..t`` with
    ``k`` distinct ranks, position ``t+1`` takes choice ``c`` in ``0..2k``:
    ``c < k`` ties it with rank ``c+1``; ``c >= k`` opens a new rank
    ``s = c-k+1`` and shifts existing ranks ``>= s`` up by one.  Children are
    stacked in choice-major order, which fixes the row order.
    """
    if not 0 <= n <= MAX_PATTERN_N:
        raise CapacityError(f"weak-order enumeration supports 0 <= n <= {MAX_PATTERN_N}, got {n}")
    ranks = np.zeros((1, 0), dtype=np.int8)
    k = np.zeros(1, dtype=np.int8)
    for t in range(n):
        blocks, counts = [], []
        for c in range(2 * t + 1):
            tie = k > c
            if tie.any():
                rows = ranks[tie]
                blocks.append(np.hstack([rows, np.full((len(rows), 1), c + 1, np.int8)]))
                counts.append(k[tie])
            new = (k <= c) & (c <= 2 * k)
            if new.any():
                rows = ranks[new]
                s = (c - k[new] + 1).astype(np.int8)[:, None]
                shifted = rows + (rows >= s)
                blocks.append(np.hstack([shifted, s]).astype(np.int8))
                counts.append(k[new] + 1)
        ranks = np.vstack(blocks)
        k = np.concatenate(counts).astype(np.int8)
    ranks.setflags(write=False)
    return ranks


def iter_patterns(n: int) -> Iterator[WeakOrderPattern]:
    for row in pattern_array(n):
        yield WeakOrderPattern.from_ranks(row.tolist())


@lru_cache(maxsize=None)
def _pattern_table(n: int, statistic: str) -> tuple:
    """``((block_sizes, value, multiplicity), ...)`` aggregated over weak orders."""
    ranks = pattern_array(n)
    if n == 0:
        return (((), 0, 1),)
    values = STATISTICS[statistic][1](ranks)
    sizes = np.stack([(ranks == r).sum(axis=1) for r in range(1, n + 1)], axis=1)
    keys = np.hstack([sizes, values[:, None]]).astype(np.int64)
    uniq, mult = np.unique(keys, axis=0, return_counts=True)
    out = []
    for row, m in zip(uniq.tolist(), mult.tolist()):
        block_sizes = tuple(x for x in row[:n] if x)
        out.append((block_sizes, row[n], m))
    return tuple(out)


def pattern_probability(pattern, law) -> Scalar:
    """Probability that a geometric word has the given weak order.

    With block sizes ``m_1..m_k`` (smallest letters first) and suffix sums
    ``s_j = m_j + ... + m_k`` this is
    ``p^n q^(sum (j-1) m_j) / prod_j (1 - q^(s_j))``.
    At ``q = 0`` this gives 1 for the all-ties pattern and 0 otherwise.
    """
    law = as_law(law)
    sizes = pattern.block_sizes if isinstance(pattern, WeakOrderPattern) else tuple(pattern)
    n = sum(sizes)
    num = law.p ** n * law.q ** sum(j * m for j, m in enumerate(sizes))
    den = law.q * 0 + 1
    suffix = 0
    for m in reversed(sizes):
        suffix += m
        den *= law.one_minus_power(suffix)
    return num / den


def distribution(statistic: str, n: int, law) -> DistributionTable:
    """Exact law of the statistic, ``{value: probability}``, over weak orders."""
    _check_statistic(statistic)
    law = as_law(law)
    probs: dict = {}
    entries: dict = defaultdict(law.zero)
    for sizes, value, mult in _pattern_table(n, statistic):
        if sizes not in probs:
            probs[sizes] = pattern_probability(sizes, law)
        entries[value] += mult * probs[sizes]
    return DistributionTable(dict(sorted(entries.items())), statistic, n, law)


def weak_order_moments(statistic: str, n: int, law) -> MomentReport:
    mean, e2, var = distribution(statistic, n, law).moments()
    return MomentReport(mean, e2, var, "oracle-exact")


# ----------------------------------------------------------- truncation


def truncated_moments(statistic: str, n: int, law, M: int) -> MomentEnclosure:
    """Enclose the mean and ``E[Y^2]`` by summing over all words in ``{1..M}^n``.

    A word with letter sum ``S`` has probability ``p^n q^(S-n)``, so the
    statistic totals are accumulated per letter sum in integers and weighted
    once at the end.  Words outside the box have total mass
    ``1 - (1 - q^M)^n`` and a statistic at most ``C(n,2)``.
    """
    _check_statistic(statistic)
    law = as_law(law)
    if M < 1:
        raise ValueError(f"letter bound must be positive, got {M}")
    if M ** n > MAX_TRUNCATED_WORDS:
        raise CapacityError(f"{M}^{n} words exceeds the limit of {MAX_TRUNCATED_WORDS}")
    batch = STATISTICS[statistic][1]
    cap = binom(n, 2)
    stride = cap + 1
    max_sum = n * M
    counts = np.zeros((max_sum + 1) * stride, dtype=np.int64)

    tail_len = 0
    while tail_len < n and M ** (tail_len + 1) <= 1 << 20:
        tail_len += 1
    tail = np.array(list(itertools.product(range(1, M + 1), repeat=tail_len)),
                    dtype=np.int16).reshape(-1, tail_len)
    tail_sums = tail.sum(axis=1, dtype=np.int64)
    for head in itertools.product(range(1, M + 1), repeat=n - tail_len):
        words = np.hstack([np.broadcast_to(np.array(head, dtype=np.int16), (len(tail), len(head))), tail])
        values = batch(words) if n > 1 else np.zeros(len(words), dtype=np.int64)
        keys = (tail_sums + sum(head)) * stride + values
        counts += np.bincount(keys, minlength=counts.size)

    by_sum = counts.reshape(max_sum + 1, stride)
    v = np.arange(stride, dtype=object)
    p, q = law.p, law.q
    lower1 = law.zero()
    lower2 = law.zero()
    for S in range(n, max_sum + 1):
        row = by_sum[S].astype(object)
        t1, t2 = int((row * v).sum()), int((row * v * v).sum())
        if t1 or t2:
            w = p ** n * q ** (S - n)
            lower1 += w * t1
            lower2 += w * t2
    missing = 1 - (1 - q ** M) ** n
    return MomentEnclosure(lower1, lower1 + cap * missing, lower2, lower2 + cap * cap * missing)


# ----------------------------------------------------------- permutations


def permutation_enumeration_moments(statistic: str, n: int) -> MomentReport:
    _check_statistic(statistic)
    if not 0 <= n <= MAX_PERMUTATION_N:
        raise CapacityError(f"permutation enumeration supports 0 <= n <= {MAX_PERMUTATION_N}, got {n}")
    stat = STATISTICS[statistic][0]
    total = math.factorial(n)
    s1 = s2 = 0
    for perm in itertools.permutations(range(1, n + 1)):
        v = stat(perm)
        s1 += v
        s2 += v * (v - 1)
    mean = Fraction(s1, total)
    e2 = Fraction(s2, total)
    return MomentReport(mean, e2, e2 + mean - mean * mean, "oracle-exact")
