"""Normal forms modulo a Markov-type surface ideal and numeric evaluation."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .numeric import to_mpc
from .poly import X, Y, Z, Poly, PowerReducer


def _exact(params) -> tuple[Fraction, ...]:
    vals = []
    for name in "ABCDE":
        v = getattr(params, name)
        if not isinstance(v, (int, Fraction)):
            raise TypeError(f"symbolic reduction needs rational parameters, {name} = {v!r}")
        vals.append(Fraction(v))
    if vals[4] == 0:
        raise ValueError("E must be nonzero")
    return tuple(vals)


@lru_cache(maxsize=64)
def _reducer(A, B, C, D, E) -> PowerReducer:
    replacement = X.scale(A) + Y.scale(B) + Z.scale(C) + D - X * X - Y * Y - (X * Y * Z).scale(E)
    return PowerReducer("z", 2, replacement)


def surface_reducer(params) -> PowerReducer:
    return _reducer(*_exact(params))


def poly_reduce(p: Poly, params) -> Poly:
    """Normal form of ``p``: z-degree at most one, congruent modulo the surface ideal."""
    return surface_reducer(params)(p)


def poly_eval(p: Poly, pt):
    """Evaluate at a point given as three numbers (converted to working-precision complex)."""
    x, y, z = (to_mpc(c) for c in pt)
    return p.evaluate(x, y, z)
