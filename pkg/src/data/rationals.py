"""Exact rational coercion shared by the data types and file parsers."""

from __future__ import annotations

import numbers
from fractions import Fraction

from src.errors import ParseError


def as_rational(value, name: str = "value") -> Fraction:
    """Coerce an int, Fraction or rational literal ("3/10", "0.3", "2") to Fraction.

    Binary floats are refused.
    """
    if isinstance(value, bool):
        raise ParseError(f"{name}: booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, numbers.Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{name}: malformed rational {value!r}") from exc
    if isinstance(value, float):
        raise ParseError(
            f"{name}: got float {value!r}; pass the rational as a string, e.g. \"3/10\""
        )
    raise ParseError(f"{name}: cannot interpret {type(value).__name__} as a rational")
