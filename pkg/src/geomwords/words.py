"""Words over the positive integers and the two pair statistics on them.

A word ``x_1 ... x_n`` is any finite sequence of positive integers.  Two
statistics are computed:

``inversions``
    pairs ``i < j`` with ``x_i > x_j`` (strict, so ties never count).
``knuth_a``
    pairs ``i < j`` with ``x_i == min(x_i, ..., x_j)`` (ties do count).

Both depend on a word only through its tie-aware order type, which
:func:`weak_order_pattern` computes.  Each statistic has a fast routine, a
quadratic reference used by the tests, and a numpy batch routine used by the
enumeration oracle and the Monte Carlo sampler.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Word",
    "WeakOrderPattern",
    "inversions",
    "inversions_naive",
    "inversions_batch",
    "knuth_a",
    "knuth_a_naive",
    "knuth_a_batch",
    "weak_order_pattern",
    "STATISTICS",
]


@dataclass(frozen=True)
class Word:
    """An immutable word with validated letters (every letter >= 1)."""

    letters: tuple[int, ...]

    def __init__(self, letters: Iterable[int]):
        letters = tuple(letters)
        for x in letters:
            if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
                raise TypeError(f"letters must be integers, got {x!r}")
            if x < 1:
                raise ValueError(f"letters must be positive, got {x}")
        object.__setattr__(self, "letters", tuple(int(x) for x in letters))

    @property
    def n(self) -> int:
        return len(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]


@dataclass(frozen=True)
class WeakOrderPattern:
    """Rank sequence of a word: equal letters share a rank, ranks are 1..k."""

    ranks: tuple[int, ...]
    block_sizes: tuple[int, ...]

    @classmethod
    def from_ranks(cls, ranks: Sequence[int]) -> "WeakOrderPattern":
        ranks = tuple(ranks)
        k = max(ranks, default=0)
        sizes = [0] * k
        for r in ranks:
            sizes[r - 1] += 1
        if any(m == 0 for m in sizes):
            raise ValueError(f"ranks {ranks} do not cover 1..{k}")
        return cls(ranks, tuple(sizes))

    @property
    def n(self) -> int:
        return len(self.ranks)

    @property
    def k(self) -> int:
        return len(self.block_sizes)


def weak_order_pattern(word: Sequence[int]) -> WeakOrderPattern:
    rank = {x: r for r, x in enumerate(sorted(set(word)), start=1)}
    return WeakOrderPattern.from_ranks([rank[x] for x in word])


def inversions_naive(word: Sequence[int]) -> int:
    n = len(word)
    return sum(1 for i in range(n) for j in range(i + 1, n) if word[i] > word[j])


def inversions(word: Sequence[int]) -> int:
    """Count strict inversions in O(n log n) with a bottom-up merge sort."""
    a = list(word)
    n = len(a)
    buf = [0] * n
    count = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                # Ties go left first: equal letters are not inversions.
                if a[i] <= a[j]:
                    buf[k] = a[i]
                    i += 1
                else:
                    buf[k] = a[j]
                    j += 1
                    count += mid - i
                k += 1
            buf[k:k + mid - i] = a[i:mid]
            k += mid - i
            buf[k:k + hi - j] = a[j:hi]
        a, buf = buf, a
        width *= 2
    return count


def knuth_a_naive(word: Sequence[int]) -> int:
    n = len(word)
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            if word[i] == min(word[i:j + 1]):
                count += 1
    return count


def knuth_a(word: Sequence[int]) -> int:
    """Count pairs i < j where x_i is the minimum of x_i..x_j, in O(n).

    For each i the qualifying j run up to (not including) the next position
    holding a strictly smaller letter, found with a monotonic stack.
    """
    n = len(word)
    count = 0
    stack: list[int] = []
    for pos, x in enumerate(word):
        while stack and word[stack[-1]] > x:
            count += pos - stack.pop() - 1
        stack.append(pos)
    for i in stack:
        count += n - i - 1
    return count


def inversions_batch(words: np.ndarray) -> np.ndarray:
    """Inversion counts for each row of a 2-d integer array."""
    cols = np.asfortranarray(words)
    rows, n = cols.shape
    out = np.zeros(rows, dtype=np.int64)
    for j in range(1, n):
        xj = cols[:, j]
        for i in range(j):
            out += cols[:, i] > xj
    return out


def knuth_a_batch(words: np.ndarray) -> np.ndarray:
    """Knuth's parameter for each row of a 2-d integer array."""
    cols = np.asfortranarray(words)
    rows, n = cols.shape
    out = np.zeros(rows, dtype=np.int64)
    running_min = np.empty(rows, dtype=cols.dtype)
    for i in range(n - 1):
        xi = cols[:, i]
        running_min[:] = xi
        for j in range(i + 1, n):
            np.minimum(running_min, cols[:, j], out=running_min)
            out += running_min == xi
    return out


STATISTICS = {
    "inversions": (inversions, inversions_batch),
    "knuth": (knuth_a, knuth_a_batch),
}
