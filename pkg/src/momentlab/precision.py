"""Arbitrary-precision helpers built on mpmath.

Convention used across the package: a routine that promises `precision_bits`
of accuracy evaluates everything at a working precision of
2*precision_bits + 16 bits and rounds the final value down to
`precision_bits`.  That head-room absorbs argument-reduction and summation
error, keeping results well inside the advertised 2^(-precision_bits/2)
relative envelope.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath
from mpmath import mp, mpf

__all__ = [
    "MIN_PRECISION_BITS",
    "working_bits",
    "working_precision",
    "round_to",
    "mpf_from_fraction",
    "format_real",
    "check_precision_bits",
]

MIN_PRECISION_BITS = 64


def check_precision_bits(precision_bits: int) -> int:
    if precision_bits < MIN_PRECISION_BITS:
        raise ValueError(f"precision_bits must be >= {MIN_PRECISION_BITS}")
    return precision_bits


def working_bits(precision_bits: int) -> int:
    return 2 * precision_bits + 16


def working_precision(precision_bits: int):
    """Context manager setting mp.prec to the working precision."""
    return mp.workprec(working_bits(check_precision_bits(precision_bits)))


def round_to(x, precision_bits: int):
    """Round an mpf/mpc to exactly precision_bits of mantissa."""
    with mp.workprec(precision_bits):
        return +x


def mpf_from_fraction(q: Fraction) -> mpf:
    """Correctly rounded mpf of an exact rational at the current precision."""
    return mpf(q.numerator) / mpf(q.denominator)


def format_real(x, precision_bits: int) -> str:
    """Decimal string with precision_bits/3 significant digits (round to nearest)."""
    digits = max(precision_bits // 3, 3)
    if isinstance(x, float):
        x = mpf(x)
    with mp.workprec(working_bits(precision_bits)):
        return mpmath.nstr(x, digits, strip_zeros=False)
