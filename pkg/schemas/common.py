"""
Common schema types used across instance and report schemas.
"""

from fractions import Fraction
from typing import Annotated, Any

from pydantic import BeforeValidator, PlainSerializer


def parse_fraction(value: Any) -> Fraction:
    """Accept ints, Fractions and exact strings such as "1/2", "3" or "0.25"."""
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not an exact rational: {value!r}") from e
    raise ValueError(f"expected an int or a fraction string, got {type(value).__name__}")


def _non_negative(value: Fraction) -> Fraction:
    if value < 0:
        raise ValueError("must be non-negative")
    return value


def format_fraction(value: Fraction) -> str:
    return str(value)


RationalField = Annotated[
    Fraction,
    BeforeValidator(parse_fraction),
    PlainSerializer(format_fraction, return_type=str),
]

NonNegativeRational = Annotated[
    Fraction,
    BeforeValidator(lambda v: _non_negative(parse_fraction(v))),
    PlainSerializer(format_fraction, return_type=str),
]
