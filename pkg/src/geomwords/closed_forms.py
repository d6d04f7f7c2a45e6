"""Closed-form moments of the two statistics on geometric words.

Everything here is evaluated at a given ``(n, q)``; nothing is manipulated
symbolically.  With a rational ``q`` every result is an exact
:class:`~fractions.Fraction`, with a float ``q`` a float.

Notation used throughout: ``p = 1 - q`` and ``a_i = 1 / (1 - q**i)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from .law import DomainError, GeometricLaw, Scalar, as_law

__all__ = [
    "MomentReport",
    "HarmonicPair",
    "SeriesValue",
    "QSeriesConstants",
    "binom",
    "mean_inversions",
    "variance_inversions",
    "inversion_moment_components",
    "second_factorial_moment_inversions",
    "asymptotic_inversions",
    "mean_knuth",
    "variance_knuth",
    "knuth_range_contributions",
    "knuth_second_factorial_moment",
    "rearrangement_identity_sides",
    "check_rearrangement_identities",
    "alpha",
    "beta",
    "q_series_constants",
    "asymptotic_knuth",
    "harmonic",
    "permutation_limit_moments",
    "closed_form_moments",
    "KNUTH_STAGES",
]

PROVENANCES = ("closed-form", "oracle-exact", "oracle-enclosure", "monte-carlo")


@dataclass(frozen=True)
class MomentReport:
    mean: Scalar
    second_factorial_moment: Scalar
    variance: Scalar
    provenance: str
    enclosure_width: Optional[Scalar] = None

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")


class HarmonicPair(NamedTuple):
    h1: Fraction
    h2: Fraction


class SeriesValue(NamedTuple):
    value: float
    tolerance: float
    terms_used: int


class QSeriesConstants(NamedTuple):
    alpha: float
    beta: float
    tolerance: float
    terms_used: int


def binom(top: int, k: int) -> int:
    """Binomial coefficient that is 0 for a negative or undersized top."""
    if top < 0 or k < 0 or k > top:
        return 0
    return math.comb(top, k)


def _check_n(n: int) -> None:
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")


def _a(law: GeometricLaw, n: int) -> list:
    """``[None, a_1, ..., a_n]`` so that ``a[i]`` reads like the formulas."""
    return [None] + [1 / law.one_minus_power(i) for i in range(1, n + 1)]


# ---------------------------------------------------------------- inversions


def mean_inversions(n: int, law) -> Scalar:
    law = as_law(law)
    _check_n(n)
    q = law.q
    return binom(n, 2) * q / (1 + q)


def variance_inversions(n: int, law) -> Scalar:
    law = as_law(law)
    _check_n(n)
    q = law.q
    return (Fraction(n * (n - 1), 6) if law.exact else n * (n - 1) / 6) * q \
        / ((1 + q) ** 2 * (1 + q + q * q)) * (2 * (1 - q + q * q) * n - q * q + 7 * q - 1)


def inversion_moment_components(n: int, law) -> tuple:
    """The four pieces of the second factorial moment of the inversion count.

    In order: four distinct indices; shared left index; shared right index;
    chained pairs ``j < k = l < m`` (both orientations).
    """
    law = as_law(law)
    _check_n(n)
    q = law.q
    c3 = 2 * binom(n, 3)
    e1 = binom(n, 2) * binom(n - 2, 2) * q * q / (1 + q) ** 2
    e2 = c3 * q * (1 + q * q) / ((1 + q) * (1 + q + q * q))
    e3 = c3 * q * q / (1 + q + q * q)
    e4 = c3 * q ** 3 / ((1 + q) * (1 + q + q * q))
    return e1, e2, e3, e4


def second_factorial_moment_inversions(n: int, law) -> Scalar:
    law = as_law(law)
    _check_n(n)
    q = law.q
    front = Fraction(n * (n - 1) * (n - 2), 12) if law.exact else n * (n - 1) * (n - 2) / 12
    bracket = 3 * n * q * (1 + q + q * q) + 3 * q ** 3 + 7 * q * q - q + 4
    return front * bracket * q / ((1 + q) ** 2 * (1 + q + q * q))


def asymptotic_inversions(n: int, law) -> tuple:
    """Leading terms ``(n^2/2 q/(1+q), n^3/3 q(1-q+q^2)/((1+q)^2(1+q+q^2)))``."""
    law = as_law(law)
    q = law.q
    mean_lead = n * n * q / (2 * (1 + q))
    var_lead = n ** 3 * q * (1 - q + q * q) / (3 * (1 + q) ** 2 * (1 + q + q * q))
    return mean_lead, var_lead


# ------------------------------------------------------------ Knuth's param


def mean_knuth(n: int, law, form: str = "theorem") -> Scalar:
    """Expected value of Knuth's parameter.

    ``form="theorem"`` sums ``p (n+1-i) a_i`` over ``1 <= i <= n`` and subtracts
    ``n``; ``form="derivation"`` starts the sum at ``i = 2`` instead (the
    ``i = 1`` term is exactly ``n``).
    """
    law = as_law(law)
    _check_n(n)
    p = law.p
    a = _a(law, n)
    if form == "theorem":
        return p * law.total((n + 1 - i) * a[i] for i in range(1, n + 1)) - n
    if form == "derivation":
        return p * law.total((n + 1 - h) * a[h] for h in range(2, n + 1))
    raise ValueError(f"unknown form {form!r}")


def variance_knuth(n: int, law) -> Scalar:
    law = as_law(law)
    _check_n(n)
    p = law.p
    a = _a(law, n)
    rng = range(1, n + 1)
    s1 = law.total((m - 1) * a[m] * binom(n + 2 - m, 2) for m in rng)
    # sum_{i<j} i (n+1-j) a_i a_j via a running prefix of i a_i
    prefix = law.zero()
    cross = []
    for j in rng:
        cross.append((n + 1 - j) * a[j] * prefix)
        prefix += j * a[j]
    s2 = law.total(cross)
    s3 = law.total((n + 1 - i) ** 2 * a[i] ** 2 for i in rng)
    s4 = law.total((n + 1 - i) * (2 * i - 1) * a[i] for i in rng)
    return -2 * p * p * s1 + 2 * p * p * s2 - p * p * s3 + p * s4


def knuth_range_contributions(n: int, law, fifth_from: int = 1) -> tuple:
    """The six index-range sums making up half the second factorial moment.

    Each is summed over its original index tuples, quartic in ``n``, so this
    is a verification path only.  Ranges: ``j<k<l<m`` (disjoint),
    ``j<l<m<k`` (nested), ``j<l<k<m`` (overlapping), ``j<k=l<m`` (glued),
    ``j<l<m=k`` (common right end; lowest ``j`` is ``fifth_from``) and
    ``j=l<k<m`` (common left end).  The first five carry ``p**2`` and the last
    ``p``.
    """
    law = as_law(law)
    _check_n(n)
    p = law.p
    a = _a(law, n + 1)
    R = range(1, n + 1)
    c1 = law.total(a[k + 1 - j] * a[m + 1 - l]
                   for j in R for k in range(j + 1, n + 1)
                   for l in range(k + 1, n + 1) for m in range(l + 1, n + 1))
    c2 = law.total(a[k + 1 - j] * a[m + 1 - l]
                   for j in R for l in range(j + 1, n + 1)
                   for m in range(l + 1, n + 1) for k in range(m + 1, n + 1))
    c3 = law.total(a[m + 1 - j] * a[m + 1 - l] * (m - l - 1)
                   for j in R for l in range(j + 1, n + 1) for m in range(l + 1, n + 1))
    c4 = law.total(a[m + 1 - j] * a[m + 1 - k]
                   for j in R for k in range(j + 1, n + 1) for m in range(k + 1, n + 1))
    c5 = law.total(a[m + 1 - j] * a[m + 1 - l]
                   for j in range(fifth_from, n + 1) for l in range(j + 1, n + 1)
                   for m in range(l + 1, n + 1))
    c6 = law.total(a[m + 1 - j]
                   for j in R for k in range(j + 1, n + 1) for m in range(k + 1, n + 1))
    pp = p * p
    return pp * c1, pp * c2, pp * c3, pp * c4, pp * c5, p * c6


def _knuth_e2_rearranged(n: int, law: GeometricLaw) -> Scalar:
    # the six range sums after each index rearrangement, in (i, j) form
    p = law.p
    a = _a(law, n)
    pairs = [(i, j) for j in range(2, n + 1) for i in range(2, j)]
    s1 = law.total(a[i] * a[j] * binom(n + 2 - i - j, 2)
                   for i in range(2, n - 1) for j in range(2, n - 1) if i + j <= n)
    s2 = law.total(a[i] * a[j] * (n + 1 - j) * (j - i - 1) for i, j in pairs)
    s3 = law.total(a[i] * a[j] * (n + 1 - j) * (i - 2) for i, j in pairs if i >= 3)
    s45 = law.total(a[i] * a[j] * (n + 1 - j) for i, j in pairs)
    s6 = law.total(a[i] * (n + 1 - i) * (i - 2) for i in range(3, n + 1))
    return 2 * (p * p * (s1 + s2 + s3 + 2 * s45) + p * s6)


def _knuth_e2_simplified(n: int, law: GeometricLaw) -> Scalar:
    p = law.p
    a = _a(law, n)
    s1 = law.total(a[i] * a[m - i] * binom(n + 2 - m, 2)
                   for m in range(2, n + 1) for i in range(1, m))
    s2 = law.total((n + 1 - j) ** 2 * a[j] for j in range(1, n + 1))
    s3 = law.total(a[i] * a[j] * (n + 1 - j) * (j - 1)
                   for j in range(2, n + 1) for i in range(1, j))
    return 2 * p * p * s1 - 2 * p * s2 + 2 * p * p * s3 + n * (n + 1)


def _knuth_e2_final(n: int, law: GeometricLaw) -> Scalar:
    p = law.p
    a = _a(law, n)
    s1 = law.total((m - 1) * a[m] * binom(n + 2 - m, 2) for m in range(1, n + 1))
    s2 = law.total((n + 1 - j) ** 2 * a[j] for j in range(1, n + 1))
    prefix = law.zero()
    cross = []
    for j in range(1, n + 1):
        cross.append((n + 1 - j) * a[j] * prefix)
        prefix += a[j]
    s3 = law.total(cross)
    return -2 * p * p * s1 - 2 * p * s2 + 2 * p * p * (n + 1) * s3 + n * (n + 1)


_STAGES = {
    "raw": lambda n, law: 2 * law.total(knuth_range_contributions(n, law)),
    "rearranged": _knuth_e2_rearranged,
    "simplified": _knuth_e2_simplified,
    "final": _knuth_e2_final,
}
KNUTH_STAGES = tuple(_STAGES)


def knuth_second_factorial_moment(n: int, law, stage: str = "final") -> Scalar:
    """Second factorial moment ``E[a(a-1)]`` of Knuth's parameter.

    ``stage`` picks one of the successive forms of the same quantity:
    ``raw`` (six range sums over the original indices), ``rearranged`` (the
    same six sums re-indexed by window lengths), ``simplified`` (three sums
    plus ``n(n+1)``) and ``final`` (partial fractions applied, linear in
    ``n`` work).  All stages agree exactly.
    """
    law = as_law(law)
    _check_n(n)
    try:
        fn = _STAGES[stage]
    except KeyError:
        raise ValueError(f"unknown stage {stage!r}; expected one of {KNUTH_STAGES}") from None
    return fn(n, law)


# ------------------------------------------------------- general identities


def rearrangement_identity_sides(a: Sequence, n: int, law=None) -> dict:
    """Left and right sides of the seven summation identities.

    ``a[0]`` plays the role of ``a_1``.  Left sides run over the raw index
    tuples.  Identity ``"7"`` is the partial-fraction step and uses
    ``a_i = 1/(1 - q**i)`` from ``law`` (default ``q = 1/2``) for every
    ``2 <= m <= n``, ignoring the ``a`` argument.
    """
    if len(a) < n:
        raise ValueError(f"need at least {n} sequence entries, got {len(a)}")
    A = [None] + list(a[:n]) + [0]  # A[n+1] is never read with a nonzero weight
    R = range(1, n + 1)

    def total(terms):
        return sum(terms, 0)

    sides = {}
    sides["1"] = (
        total(A[k + 1 - j] * A[m + 1 - l] for j in R for k in range(j + 1, n + 1)
              for l in range(k + 1, n + 1) for m in range(l + 1, n + 1)),
        total(A[i] * A[j] * binom(n + 2 - i - j, 2)
              for i in range(2, n - 1) for j in range(2, n - 1) if i + j <= n),
    )
    sides["2"] = (
        total(A[k + 1 - j] * A[m + 1 - l] for j in R for l in range(j + 1, n + 1)
              for m in range(l + 1, n + 1) for k in range(m + 1, n + 1)),
        total(A[i] * A[j] * (n + 1 - j) * (j - i - 1)
              for j in range(2, n + 1) for i in range(2, j)),
    )
    sides["3"] = (
        total(A[m + 1 - j] * A[m + 1 - l] * (m - l - 1) for j in R
              for l in range(j + 1, n + 1) for m in range(l + 1, n + 1)),
        total(A[i] * A[j] * (n + 1 - j) * (i - 2)
              for j in range(3, n + 1) for i in range(3, j)),
    )
    glued = (
        total(A[m + 1 - j] * A[m + 1 - k] for j in R
              for k in range(j + 1, n + 1) for m in range(k + 1, n + 1)),
        total(A[i] * A[j] * (n + 1 - j) for j in range(2, n + 1) for i in range(2, j)),
    )
    sides["4"] = glued
    sides["5"] = glued
    sides["6"] = (
        total(A[m + 1 - j] for j in R for k in range(j + 1, n + 1) for m in range(k + 1, n + 1)),
        total(A[i] * (i - 2) * (n + 1 - i) for i in range(3, n + 1)),
    )
    law = as_law(law if law is not None else Fraction(1, 2))
    b = _a(law, n)
    lhs7, rhs7 = [], []
    for m in range(2, n + 1):
        lhs7.append(law.total(b[i] * b[m - i] for i in range(1, m)))
        rhs7.append(-(m - 1) * b[m] + 2 * b[m] * law.total(b[i] for i in range(1, m)))
    sides["7"] = (tuple(lhs7), tuple(rhs7))
    return sides


def check_rearrangement_identities(a: Sequence, n: int, law=None) -> dict:
    """Map identity name ``"1"``..``"7"`` to whether both sides agree.

    Agreement is exact equality; in float arithmetic use
    :func:`rearrangement_identity_sides` and compare with a tolerance.
    """
    return {name: lhs == rhs for name, (lhs, rhs) in rearrangement_identity_sides(a, n, law).items()}


# ---------------------------------------------------------- q-series consts


def _series(law: GeometricLaw, tol: float, squared: bool) -> SeriesValue:
    if tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    q = float(law.q)
    if q == 0:
        return SeriesValue(0.0, 0.0, 0)
    terms = []
    N = 0
    while True:
        # tail sum_{i>N} bound, using 1 - q^i >= 1 - q^(N+1) for i > N
        head = -math.expm1((N + 1) * math.log(q))
        if squared:
            bound = q ** (2 * (N + 1)) / ((1 - q * q) * head * head)
        else:
            bound = q ** (N + 1) / ((1 - q) * head)
        if bound <= tol:
            break
        N += 1
        t = q ** N / -math.expm1(N * math.log(q))
        terms.append(t * t if squared else t)
    return SeriesValue(math.fsum(terms), bound, N)


def alpha(law, tol: float = 1e-12) -> SeriesValue:
    """``sum_{i>=1} 1/(q**-i - 1)``, truncated once the tail bound is <= tol."""
    return _series(as_law(law), tol, squared=False)


def beta(law, tol: float = 1e-12) -> SeriesValue:
    """``sum_{i>=1} 1/(q**-i - 1)**2``, truncated once the tail bound is <= tol."""
    return _series(as_law(law), tol, squared=True)


def q_series_constants(law, tol: float = 1e-12) -> QSeriesConstants:
    al, be = alpha(law, tol), beta(law, tol)
    return QSeriesConstants(al.value, be.value, tol, max(al.terms_used, be.terms_used))


def asymptotic_knuth(n: int, law, constants: Optional[QSeriesConstants] = None) -> tuple:
    """Two-term approximations ``(mean, variance)`` for large ``n``, in floats.

    mean ~ p/2 n^2 + (p/2 - 1 + p alpha) n,
    variance ~ pq/3 n^3 + (pq/2 - p^2 (alpha + beta)) n^2.
    """
    law = as_law(law)
    if constants is None:
        constants = q_series_constants(law)
    p, q = float(law.p), float(law.q)
    al, be = constants.alpha, constants.beta
    mean = p / 2 * n * n + (p / 2 - 1 + p * al) * n
    var = p * q / 3 * n ** 3 + (p * q / 2 - p * p * (al + be)) * n * n
    return mean, var


# ------------------------------------------------------------- q -> 1 limit


def harmonic(n: int) -> HarmonicPair:
    _check_n(n)
    h1 = sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))
    h2 = sum((Fraction(1, k * k) for k in range(1, n + 1)), Fraction(0))
    return HarmonicPair(h1, h2)


def permutation_limit_moments(n: int, statistic: str) -> tuple:
    """Exact ``(mean, variance)`` of the statistic on uniform permutations."""
    _check_n(n)
    if statistic == "inversions":
        return Fraction(n * (n - 1), 4), Fraction(n * (n - 1) * (2 * n + 5), 72)
    if statistic == "knuth":
        h1, h2 = harmonic(n)
        mean = (n + 1) * h1 - 2 * n
        var = -(n + 1) * h1 - (n + 1) ** 2 * h2 + 2 * n * (n + 2)
        return mean, var
    raise ValueError(f"unknown statistic {statistic!r}")


def closed_form_moments(statistic: str, n: int, law) -> MomentReport:
    law = as_law(law)
    if statistic == "inversions":
        mean = mean_inversions(n, law)
        e2 = second_factorial_moment_inversions(n, law)
        var = variance_inversions(n, law)
    elif statistic == "knuth":
        mean = mean_knuth(n, law)
        e2 = knuth_second_factorial_moment(n, law, "final")
        var = variance_knuth(n, law)
    else:
        raise ValueError(f"unknown statistic {statistic!r}")
    return MomentReport(mean, e2, var, "closed-form")
