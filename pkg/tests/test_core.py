"""Polynomial arithmetic, reduction and elimination, checked against sympy."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from markovsymp.core.echelon import EchelonBasis
from markovsymp.core.numeric import cabs, ctx, decimal_str, precision, to_mpc
from markovsymp.core.poly import (ONE, X, Y, Z, Poly, PolySyntaxError, PowerReducer, grlex_key,
                                  normal_monomials, parse_poly, sum_polys)
from markovsymp.core.reduce import poly_eval, poly_reduce, surface_reducer
from markovsymp.surface import SurfaceParams

sx, sy, sz = sp.symbols("x y z")

coeffs = st.fractions(min_value=-6, max_value=6, max_denominator=5)
monos = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(monos, coeffs, max_size=5).map(Poly)


def to_sympy(p: Poly):
    return sum((sp.Rational(c.numerator, c.denominator) * sx**m[0] * sy**m[1] * sz**m[2]
                for m, c in p.items()), sp.Integer(0))


def from_sympy(e) -> Poly:
    sp_poly = sp.Poly(sp.expand(e), sx, sy, sz)
    return Poly({m: Fraction(int(c.p), int(c.q)) for m, c in sp_poly.terms()})


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Poly()
    assert a * ONE == a


@settings(max_examples=60)
@given(polys, polys)
def test_product_matches_sympy(a, b):
    assert from_sympy(to_sympy(a) * to_sympy(b)) == a * b


@given(polys)
def test_text_round_trip(p):
    assert Poly.parse(p.to_string()) == p


def test_parse_forms():
    assert Poly.parse("x^2 - 3*x*y + 1/2") == X**2 - 3 * X * Y + Fraction(1, 2)
    assert Poly.parse("-(x+y)^2") == -(X + Y) ** 2
    assert Poly.parse("2*z*x") == 2 * X * Z
    assert Poly.parse("0") == Poly()


@pytest.mark.parametrize("bad", ["x^", "x +* y", "w", "(x", "x^-1", "", "2 z x"])
def test_parse_rejects(bad):
    with pytest.raises(PolySyntaxError):
        parse_poly(bad)


def test_canonical_order():
    p = Poly.parse("z + x^2 + y + 1 + x*y")
    assert p.to_string() == "1+1*z^1+1*y^1+1*x^1*y^1+1*x^2"
    order = sorted(p, key=grlex_key)
    assert [sum(m) for m in order] == sorted(sum(m) for m in order)


@given(polys)
def test_diff_matches_sympy(p):
    for name, s in zip("xyz", (sx, sy, sz)):
        assert p.diff(name) == from_sympy(sp.diff(to_sympy(p), s))


@given(polys, polys)
def test_compose_matches_sympy(p, q):
    got = p.compose(q, X + Y, Z)
    want = to_sympy(p).subs({sx: to_sympy(q), sy: sx + sy}, simultaneous=True)
    assert got == from_sympy(want)


@given(polys, st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_evaluate_matches_sympy(p, u, v):
    got = complex(p.evaluate(to_mpc(u), to_mpc(v), to_mpc(1.5)))
    want = complex(to_sympy(p).subs({sx: u, sy: v, sz: 1.5}).evalf(30))
    assert abs(got - want) <= 1e-10 * (1 + abs(want))


def test_normal_monomials_count():
    for d in range(8):
        assert len(normal_monomials(d)) == (d + 1) ** 2


# reduction --------------------------------------------------------------------

params_st = st.builds(SurfaceParams, coeffs, coeffs, coeffs, coeffs,
                      st.sampled_from([Fraction(1), Fraction(-2), Fraction(3, 2)]))


@settings(max_examples=40)
@given(params_st, polys)
def test_reduction_is_idempotent_and_normal(params, p):
    r = poly_reduce(p, params)
    assert r.degree_in("z") < 2
    assert poly_reduce(r, params) == r


@settings(max_examples=40, deadline=None)
@given(params_st, polys)
def test_reduction_agrees_with_sympy_remainder(params, p):
    P = to_sympy(params.defining_poly())
    _, rem = sp.reduced(to_sympy(p), [P], sz, sx, sy, order="lex")
    assert poly_reduce(p, params) == from_sympy(rem)


@settings(max_examples=30)
@given(params_st, polys, polys)
def test_reduction_is_ring_homomorphism(params, a, b):
    red = surface_reducer(params)
    assert red(a * b) == red(red(a) * red(b))
    assert red(a + b) == red(a) + red(b)


def test_reduction_kills_defining_poly():
    params = SurfaceParams(1, 2, 3, 4, 5)
    assert poly_reduce(params.defining_poly(), params).is_zero()


def test_power_reducer_validates_degree():
    with pytest.raises(ValueError):
        PowerReducer("z", 2, Z**2)
    red = PowerReducer("x", 3, Y)
    assert red(X**4) == X * Y


def test_poly_eval_on_point():
    assert poly_eval(X * Y + Z, (2, 3, 4)) == 10


# echelon ----------------------------------------------------------------------

@settings(max_examples=40)
@given(st.lists(st.dictionaries(st.integers(0, 5), st.integers(-4, 4), max_size=4), max_size=6))
def test_echelon_rank_matches_sympy(vectors):
    basis = EchelonBasis()
    for i, v in enumerate(vectors):
        basis.insert({k: c for k, c in v.items() if c}, i)
    rows = [[v.get(k, 0) for k in range(6)] for v in vectors]
    want = sp.Matrix(rows).rank() if rows else 0
    assert basis.rank == want


def test_echelon_express_recovers_combination():
    basis = EchelonBasis()
    basis.insert({0: 1, 1: 2}, "a")
    basis.insert({1: 1, 2: -1}, "b")
    combo = basis.express({0: 2, 1: 7, 2: -3})
    assert combo == {"a": 2, "b": 3}
    assert basis.express({2: 1, 3: 1}) is None
    assert basis.contains({0: 1, 1: 3, 2: -1})


# numeric ----------------------------------------------------------------------

def test_precision_context_restores():
    before = ctx.prec
    with precision(400):
        assert ctx.prec == 400
        assert cabs(ctx.mpf(2) ** ctx.mpf(0.5) ** 2 - 2) >= 0
    assert ctx.prec == before


def test_decimal_str_round_trip():
    with precision(200):
        v = ctx.mpf(1) / 3
        assert abs(ctx.mpf(decimal_str(v)) - v) < ctx.mpf(2) ** -190


def test_sum_polys():
    rng = random.Random(1)
    ps = [Poly({(rng.randint(0, 2), 0, 0): rng.randint(-3, 3)}) for _ in range(10)]
    acc = Poly()
    for p in ps:
        acc = acc + p
    assert sum_polys(ps) == acc
