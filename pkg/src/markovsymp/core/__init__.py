from .echelon import EchelonBasis
from .numeric import DEFAULT_PREC, ctx, mpc, mpf, precision, to_mpc
from .reduce import poly_eval, poly_reduce, surface_reducer
from .poly import ONE, X, Y, Z, ZERO, Poly, PolySyntaxError, PowerReducer, grlex_key, normal_monomials, parse_poly

__all__ = [
    "DEFAULT_PREC",
    "EchelonBasis",
    "ONE",
    "Poly",
    "PolySyntaxError",
    "PowerReducer",
    "X",
    "Y",
    "Z",
    "ZERO",
    "ctx",
    "grlex_key",
    "mpc",
    "mpf",
    "normal_monomials",
    "parse_poly",
    "poly_eval",
    "poly_reduce",
    "precision",
    "surface_reducer",
    "to_mpc",
]
