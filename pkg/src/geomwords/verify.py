"""Verification suites comparing closed forms with the brute-force oracles.

Each suite yields :class:`Check` records.  A check passes only on exact
equality (rational mode) or containment (enclosures); failures carry the
exact residual.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from . import closed_forms as cf
from . import oracle
from .law import GeometricLaw

SUITES = ("inversions", "knuth", "identities", "limits", "oracle-ladder")
DEFAULT_Q = tuple(Fraction(1, d) for d in (5, 4, 3, 2)) + (Fraction(2, 3), Fraction(3, 4))
DEFAULT_N_MAX = {"inversions": 6, "knuth": 6, "identities": 12, "limits": 7, "oracle-ladder": 4}
LADDER_WIDTH = Fraction(1, 10 ** 9)

PASS, FAIL, CAPACITY = "PASS", "FAIL", "CAPACITY"


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    residual: Optional[Fraction] = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS


def _equal(name: str, lhs, rhs) -> Check:
    if lhs == rhs:
        return Check(name, PASS)
    try:
        residual = lhs - rhs
    except TypeError:
        residual = None
    return Check(name, FAIL, residual, f"{lhs} != {rhs}")


def inversions_suite(n_max: int, qs: Iterable[Fraction]) -> Iterator[Check]:
    for q in qs:
        law = GeometricLaw(q)
        for n in range(0, n_max + 1):
            tag = f"inversions n={n} q={q}"
            comps = cf.inversion_moment_components(n, law)
            e2 = cf.second_factorial_moment_inversions(n, law)
            yield _equal(f"{tag} E2 = E1+E2+E3+E4", e2, sum(comps))
            mean, var = cf.mean_inversions(n, law), cf.variance_inversions(n, law)
            yield _equal(f"{tag} variance = E2 + mean - mean^2", var, e2 + mean - mean * mean)
            try:
                ref = oracle.weak_order_moments("inversions", n, law)
            except oracle.CapacityError as exc:
                yield Check(f"{tag} oracle", CAPACITY, detail=str(exc))
                continue
            yield _equal(f"{tag} mean vs oracle", mean, ref.mean)
            yield _equal(f"{tag} variance vs oracle", var, ref.variance)


def knuth_suite(n_max: int, qs: Iterable[Fraction]) -> Iterator[Check]:
    for q in qs:
        law = GeometricLaw(q)
        for n in range(0, n_max + 1):
            tag = f"knuth n={n} q={q}"
            mean = cf.mean_knuth(n, law)
            yield _equal(f"{tag} mean theorem vs derivation form", mean,
                         cf.mean_knuth(n, law, form="derivation"))
            stages = {s: cf.knuth_second_factorial_moment(n, law, s) for s in cf.KNUTH_STAGES}
            for s in cf.KNUTH_STAGES[1:]:
                yield _equal(f"{tag} E2 raw vs {s}", stages["raw"], stages[s])
            var = cf.variance_knuth(n, law)
            e2 = stages["final"]
            yield _equal(f"{tag} variance = E2 + mean - mean^2", var, e2 + mean - mean * mean)
            try:
                ref = oracle.weak_order_moments("knuth", n, law)
            except oracle.CapacityError as exc:
                yield Check(f"{tag} oracle", CAPACITY, detail=str(exc))
                continue
            yield _equal(f"{tag} mean vs oracle", mean, ref.mean)
            yield _equal(f"{tag} variance vs oracle", var, ref.variance)


def random_rational_sequence(rng: random.Random, length: int) -> list:
    return [Fraction(rng.randint(-50, 50), rng.randint(1, 20)) for _ in range(length)]


def identities_suite(n_max: int, qs: Iterable[Fraction], sequences: int = 100,
                     seed: int = 0) -> Iterator[Check]:
    """Sequence ``t`` has length ``1 + t % n_max``; q cycles through ``qs``."""
    rng = random.Random(seed)
    qs = list(qs)
    for t in range(sequences):
        n = 1 + t % n_max
        a = random_rational_sequence(rng, n)
        q = qs[t % len(qs)]
        sides = cf.rearrangement_identity_sides(a, n, GeometricLaw(q))
        for name, (lhs, rhs) in sides.items():
            chk = _equal(f"identity {name} seq={t} n={n}", lhs, rhs)
            if not chk.passed and isinstance(lhs, tuple):
                bad = [l - r for l, r in zip(lhs, rhs) if l != r]
                chk = Check(chk.name, FAIL, bad[0] if bad else None, chk.detail)
            yield chk


def limits_suite(n_max: int) -> Iterator[Check]:
    for statistic in ("inversions", "knuth"):
        for n in range(1, n_max + 1):
            tag = f"limit {statistic} n={n}"
            mean, var = cf.permutation_limit_moments(n, statistic)
            try:
                ref = oracle.permutation_enumeration_moments(statistic, n)
            except oracle.CapacityError as exc:
                yield Check(tag, CAPACITY, detail=str(exc))
                continue
            yield _equal(f"{tag} mean", mean, ref.mean)
            yield _equal(f"{tag} variance", var, ref.variance)


def ladder_letter_bound(n: int, q: Fraction, width: Fraction = LADDER_WIDTH) -> int:
    """Smallest M whose tail bound makes both enclosure widths below ``width``."""
    cap = cf.binom(n, 2)
    M = 1
    while cap * cap * (1 - (1 - q ** M) ** n) >= width:
        M += 1
    return M


def oracle_ladder_suite(n_max: int, qs: Iterable[Fraction],
                        letter_bound: Optional[int] = None) -> Iterator[Check]:
    """Truncated enclosures must contain the weak-order moments and be narrow.

    ``letter_bound=None`` picks M per ``(n, q)`` from the tail bound.
    """
    for q in qs:
        law = GeometricLaw(q)
        for n in range(2, n_max + 1):
            M = letter_bound or ladder_letter_bound(n, q)
            for statistic in ("inversions", "knuth"):
                tag = f"ladder {statistic} n={n} q={q} M={M}"
                try:
                    box = oracle.truncated_moments(statistic, n, law, M)
                    ref = oracle.weak_order_moments(statistic, n, law)
                except oracle.CapacityError as exc:
                    yield Check(tag, CAPACITY, detail=str(exc))
                    continue
                second = ref.second_factorial_moment + ref.mean
                if not box.contains(ref.mean, second):
                    yield Check(f"{tag} containment", FAIL, detail=f"{box} misses ({ref.mean}, {second})")
                else:
                    yield Check(f"{tag} containment", PASS)
                width = max(box.mean_width, box.second_width)
                if width < LADDER_WIDTH:
                    yield Check(f"{tag} width", PASS)
                else:
                    yield Check(f"{tag} width", FAIL, width - LADDER_WIDTH,
                                f"width {float(width):.3g} >= 1e-9")


def run_suite(suite: str, n_max: Optional[int] = None, qs=DEFAULT_Q, *,
              sequences: int = 100, seed: int = 0,
              letter_bound: Optional[int] = None) -> list:
    if suite == "all":
        out = []
        for s in SUITES:
            out.extend(run_suite(s, n_max, qs, sequences=sequences, seed=seed,
                                 letter_bound=letter_bound))
        return out
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    n = DEFAULT_N_MAX[suite] if n_max is None else n_max
    if suite == "inversions":
        return list(inversions_suite(n, qs))
    if suite == "knuth":
        return list(knuth_suite(n, qs))
    if suite == "identities":
        return list(identities_suite(n, qs, sequences, seed))
    if suite == "limits":
        return list(limits_suite(n))
    return list(oracle_ladder_suite(n, qs, letter_bound))
