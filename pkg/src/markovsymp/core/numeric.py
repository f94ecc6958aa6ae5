"""Arbitrary-precision complex numbers.

All numeric code in the package goes through one private mpmath context so the
caller's global ``mpmath.mp`` precision is never touched.  The default working
precision is 256 bits and can be overridden with ``MARKOVSYMP_PREC``.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterator, Union

import mpmath

MIN_PREC = 53
DEFAULT_PREC = max(MIN_PREC, int(os.environ.get("MARKOVSYMP_PREC", "256")))

ctx = mpmath.MPContext()
ctx.prec = DEFAULT_PREC

mpc = ctx.mpc
mpf = ctx.mpf

Number = Union[int, Fraction, float, complex, "mpmath.mpf", "mpmath.mpc"]


@contextmanager
def precision(bits: int) -> Iterator[int]:
    """Temporarily set the working precision (in bits) of the package context."""
    if bits < MIN_PREC:
        raise ValueError(f"precision must be at least {MIN_PREC} bits, got {bits}")
    with ctx.workprec(bits):
        yield bits


def current_prec() -> int:
    return ctx.prec


def to_mpc(value) -> "mpmath.mpc":
    """Convert ints, Fractions, floats, complex, mpmath numbers and ``[re, im]``
    pairs of decimal strings to a complex number at the working precision."""
    if isinstance(value, Fraction):
        return ctx.mpc(ctx.mpf(value.numerator) / value.denominator)
    if isinstance(value, (list, tuple)):
        re, im = value
        return ctx.mpc(to_mpc(re).real, to_mpc(im).real)
    if isinstance(value, str):
        value = value.strip()
        if "/" in value:
            return to_mpc(Fraction(value))
        return ctx.mpc(ctx.mpf(value))
    return ctx.mpc(value)


def cabs(value) -> "mpmath.mpf":
    return ctx.fabs(value) if isinstance(value, (int, Fraction)) else abs(ctx.mpc(value))


def dps_for(bits: int | None = None) -> int:
    bits = ctx.prec if bits is None else bits
    return int(bits * 0.30103) + 1


def decimal_str(value, digits: int | None = None) -> str:
    """Decimal string of a real number with enough digits to round-trip."""
    digits = dps_for() if digits is None else digits
    return ctx.nstr(ctx.mpf(value), digits)


def complex_pair(value, digits: int | None = None) -> list[str]:
    """``[re, im]`` decimal strings, the JSON encoding used for complex values."""
    z = to_mpc(value)
    return [decimal_str(z.real, digits), decimal_str(z.imag, digits)]


def rel_tol(bits_margin: int) -> "mpmath.mpf":
    """``2**-(prec - bits_margin)`` at the current working precision."""
    return ctx.ldexp(ctx.mpf(1), -(ctx.prec - bits_margin))
