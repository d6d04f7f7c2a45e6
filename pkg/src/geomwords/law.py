"""The geometric letter distribution P{X = k} = p q^(k-1), k >= 1."""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Union

Scalar = Union[Fraction, float]


class DomainError(ValueError):
    """A parameter lies outside the domain where a formula is defined."""


def parse_scalar(text: str, exact: bool | None = None) -> Scalar:
    """Parse ``"a/b"`` or a decimal literal.

    ``"a/b"`` is always exact.  A decimal literal gives a float unless
    ``exact`` is true, in which case it is converted from its digits
    (``"0.1"`` becomes ``1/10``, not the binary float nearest to it).
    """
    text = text.strip()
    if "/" in text:
        try:
            value = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed rational {text!r}") from exc
        return value if exact is not False else float(value)
    try:
        dec = Decimal(text)
    except InvalidOperation as exc:
        raise ValueError(f"malformed number {text!r}") from exc
    if not dec.is_finite():
        raise ValueError(f"malformed number {text!r}")
    if exact:
        return Fraction(dec)
    return float(dec)


@dataclass(frozen=True)
class GeometricLaw:
    """Geometric law with parameter ``q`` in [0, 1); ``p = 1 - q``.

    A :class:`~fractions.Fraction` (or int) ``q`` puts every formula in exact
    rational mode; a float ``q`` selects float mode.
    """

    q: Scalar

    def __post_init__(self):
        q = self.q
        if isinstance(q, bool):
            raise TypeError("q must be a number")
        if isinstance(q, int):
            q = Fraction(q)
        elif not isinstance(q, (Fraction, float)):
            q = float(q)
        if isinstance(q, float) and not math.isfinite(q):
            raise DomainError(f"q must be finite, got {q}")
        if not 0 <= q < 1:
            raise DomainError(f"q must satisfy 0 <= q < 1, got {q}")
        object.__setattr__(self, "q", q)

    @classmethod
    def parse(cls, text: str, exact: bool | None = None) -> "GeometricLaw":
        return cls(parse_scalar(text, exact))

    @property
    def p(self) -> Scalar:
        return 1 - self.q

    @property
    def exact(self) -> bool:
        return isinstance(self.q, Fraction)

    def pmf(self, k: int) -> Scalar:
        if k < 1:
            return self.q * 0
        return self.p * self.q ** (k - 1)

    def one_minus_power(self, i: int) -> Scalar:
        """``1 - q**i``, computed without cancellation in float mode."""
        if self.exact or self.q == 0:
            return 1 - self.q ** i
        return -math.expm1(i * math.log(self.q))

    def zero(self) -> Scalar:
        return Fraction(0) if self.exact else 0.0

    def total(self, terms) -> Scalar:
        """Sum scalars in the law's arithmetic (``math.fsum`` in float mode)."""
        if self.exact:
            return sum(terms, Fraction(0))
        return math.fsum(terms)


def as_law(law) -> GeometricLaw:
    if isinstance(law, GeometricLaw):
        return law
    if isinstance(law, str):
        return GeometricLaw.parse(law)
    return GeometricLaw(law)
