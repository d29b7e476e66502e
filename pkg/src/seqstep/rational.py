"""Exact rational values for procedure parameters.

Every parameter that enters a rejection decision (the FDR target, the
win probability, the additive constant in the decoy estimate) is kept
as an exact fraction so that threshold comparisons can be settled in
integer arithmetic. Binary floating point never touches a value on its
way in: decimal strings are converted digit-exactly.

Backed by :class:`fractions.Fraction`, which already guarantees the
canonical form we need (lowest terms, positive denominator, zero as
0/1) and arbitrary-precision components.
"""

from __future__ import annotations

import re
from fractions import Fraction

# Public alias: the canonical rational type of this package.
Rational = Fraction

_FRACTION_RE = re.compile(r"^[+-]?\d+\s*/\s*\d+$")
_DECIMAL_RE = re.compile(r"^[+-]?(?:\d+\.\d*|\.\d+|\d+)$")


class RationalParseError(ValueError):
    """A string did not denote a rational in an accepted form."""


def make_rational(num: int, den: int = 1) -> Fraction:
    """Return num/den in canonical form.

    Canonical means lowest terms with a positive denominator; zero is
    represented as 0/1. Raises ZeroDivisionError when den == 0.
    """
    if den == 0:
        raise ZeroDivisionError("rational with zero denominator")
    return Fraction(num, den)


def parse_rational(text: str) -> Fraction:
    """Parse "p/q", a finite decimal, or an integer literal, exactly.

    "0.95" becomes 19/20 by reading the digits over a power of ten; the
    value never round-trips through a binary float, so inputs that are
    not representable in binary (most decimals) stay exact.
    """
    s = text.strip()
    if _FRACTION_RE.match(s):
        num_s, den_s = s.split("/")
        den = int(den_s)
        if den == 0:
            raise RationalParseError(f"zero denominator in {text!r}")
        return Fraction(int(num_s), den)
    if _DECIMAL_RE.match(s):
        # Fraction's own string parser handles decimal literals exactly.
        return Fraction(s)
    raise RationalParseError(
        f"cannot parse {text!r} as a rational (expected p/q, a finite decimal, or an integer)"
    )


def compare(x: Fraction, y: Fraction) -> int:
    """Three-way exact comparison: -1, 0, or 1 as x <, ==, > y.

    Decided by cross-multiplication in unbounded integers, which is the
    whole point of carrying rationals instead of floats.
    """
    lhs = x.numerator * y.denominator
    rhs = y.numerator * x.denominator
    if lhs < rhs:
        return -1
    if lhs > rhs:
        return 1
    return 0
