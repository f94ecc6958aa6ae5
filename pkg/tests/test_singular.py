"""Singular points, ADE classification and the model germ fields."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from markovsymp import singular
from markovsymp.core.poly import X, Y, Z
from markovsymp.errors import DecompositionFailure, InvalidInput, NotSingular, NotTangential
from markovsymp.poisson import SymbolicField
from markovsymp.surface import SurfaceParams
from test_core import to_sympy

sx, sy, sz = sp.symbols("x y z")
small_q = st.fractions(-3, 3, max_denominator=3)


def tjurina_total(params: SurfaceParams) -> int:
    """dim Q[x,y,z]/(P, grad P) by counting standard monomials of a Groebner basis."""
    P = to_sympy(params.defining_poly())
    G = sp.groebner([P] + [sp.diff(P, s) for s in (sx, sy, sz)], sx, sy, sz, order="grevlex")
    if list(G.exprs) == [1]:
        return 0
    leads = [sp.Poly(g, sx, sy, sz).monoms(order="grevlex")[0] for g in G.exprs]
    count, d = 0, 0
    while True:
        layer = 0
        for i in range(d + 1):
            for j in range(d + 1 - i):
                m = (i, j, d - i - j)
                if not any(all(a >= b for a, b in zip(m, lm)) for lm in leads):
                    layer += 1
        if layer == 0:
            return count
        count += layer
        d += 1


def milnor_sum(reports) -> int:
    # for ADE germs the Milnor and Tjurina numbers coincide and equal the index
    return sum(r.k for r in reports)


CASES = [
    (SurfaceParams(0, 0, 0, 0, 1), ["A1"]),
    (SurfaceParams(0, 0, 0, 4, 1), ["A1"] * 4),
    (SurfaceParams(4, 0, 0, -4, 1), ["A3"]),
    (SurfaceParams(8, 8, 8, -28, 1), ["D4"]),
    (SurfaceParams(1, 2, 3, 4, 1), []),
]


@pytest.mark.parametrize("params,types", CASES)
def test_known_surfaces(params, types):
    reports = singular.classify_surface(params)
    assert sorted(r.ade_type for r in reports) == types
    assert milnor_sum(reports) == tjurina_total(params)


def test_markov_origin():
    (pt,) = singular.singular_points(SurfaceParams.markov())
    assert all(c == 0 for c in pt)
    rep = singular.classify(SurfaceParams.markov(), pt)
    assert rep.ade_type == "A1" and rep.corank == 0


def test_a3_evidence_is_exact():
    rep = singular.classify(SurfaceParams(4, 0, 0, -4, 1), (2, 0, 0))
    assert rep.exact and rep.corank == 1 and rep.k == 3
    assert rep.evidence["residual_order"] == 4


@settings(max_examples=12, deadline=None)
@given(small_q, small_q, small_q)
def test_forced_singular_point(a, b, c):
    # choose A, B, C, D so that (a, b, c) is a critical point of P with P = 0
    A, B, C = 2 * a + b * c, 2 * b + a * c, 2 * c + a * b
    D = a * a + b * b + c * c + a * b * c - A * a - B * b - C * c
    params = SurfaceParams(A, B, C, D, 1)
    reports = singular.classify_surface(params)
    assert any(r.point == (a, b, c) for r in reports)
    assert all(r.corank in (0, 1, 2) for r in reports)
    for r in reports:
        P = params.defining_poly()
        vals = [g.evaluate(*r.point) for g in (P,) + P.gradient()]
        if r.exact:
            assert all(v == 0 for v in vals)
        else:
            assert all(abs(complex(v)) < 1e-40 for v in vals)
    assert milnor_sum(reports) == tjurina_total(params)


def test_rescaling_preserves_points():
    base = SurfaceParams(8, 8, 8, -28, 1)
    scaled = SurfaceParams(Fraction(8, 2), Fraction(8, 2), Fraction(8, 2), Fraction(-28, 4), 2)
    (pt,) = singular.singular_points(scaled)
    assert pt == (1, 1, 1)
    assert singular.find_singular_points(base) == [(2, 2, 2)]
    with pytest.raises(InvalidInput):
        singular.find_singular_points(scaled)


def test_newton_method_agrees():
    params = SurfaceParams(0, 0, 0, 4, 1)
    a = singular.find_singular_points(params)
    b = singular.find_singular_points(params, method="newton")
    assert len(a) == len(b) == 4
    for p, q in zip(a, b):
        assert all(abs(complex(u) - complex(v)) < 1e-30 for u, v in zip(p, q))


def test_not_singular():
    with pytest.raises(NotSingular):
        singular.classify(SurfaceParams.markov(), (1, 1, 1))


def test_cubic_discriminant():
    # x^3 - x y^2 = x (x - y)(x + y) has distinct roots; x^2 y has a double root
    assert singular.cubic_discriminant(1, 0, -1, 0) != 0
    assert singular.cubic_discriminant(0, 1, 0, 0) == 0


def test_d4_requires_even_signs_and_fixed_constant():
    rows = singular.d4_sign_sweep()
    assert len(rows) == 16
    for row in rows:
        even = row["negatives"] % 2 == 0
        has_d4 = "D4" in row["types"]
        assert has_d4 == (even and row["D"] == -28), row
        if row["D"] == 36:
            assert row["points"] == []


# model germs ------------------------------------------------------------------------

GERMS = [("A", k) for k in range(1, 6)] + [("D", k) for k in range(4, 7)]


@pytest.mark.parametrize("kind,k", GERMS)
def test_relations_hold(kind, k):
    germ = singular.model_fields(kind, k)
    assert all(germ.check_relations().values())


@pytest.mark.parametrize("k", [4, 5, 6])
def test_literal_relation_signs_are_wrong(k):
    germ = singular.model_fields("D", k)
    F = germ.fields
    half = Fraction(1, 2)
    assert not germ.reduce_field(F["K"] * X - F["Vx"] * Z.scale(half)).is_zero()
    assert germ.reduce_field(F["K"] * X + F["Vx"] * Z.scale(half)).is_zero()
    assert not germ.reduce_field(F["Lambda"] * Y - (-F["Vz"] + F["K"] * (k - 1))).is_zero()


@pytest.mark.parametrize("kind,k", [("A", 1), ("A", 3), ("D", 4), ("D", 5)])
def test_pairings_and_ratios(kind, k):
    rep = singular.germ_pairings(kind, k, samples=3, seed=k)
    assert rep.max_pairing_error < 1e-40
    assert rep.lambda_ratio_error < 1e-6
    expected = 2 if kind == "A" else 1
    assert abs(complex(rep.lambda_ratio) - expected) < 1e-6
    if kind == "D":
        assert rep.k_ratio_error < 1e-6


def test_decomposition_example():
    germ = singular.model_fields("A", 3)
    dec = singular.decompose_tangent_field("A", germ.fields["Lambda"] * X, 3)
    assert all(c == 0 for c in dec.lambdas)
    assert dec.f[0].is_zero() and dec.f[1] == Z and dec.f[2] == Y.scale(-2)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(GERMS), st.integers(0, 10 ** 6))
def test_decomposition_round_trip(germ_id, seed):
    kind, k = germ_id
    W = singular.random_tangential_field(kind, k, random.Random(seed))
    dec = singular.decompose_tangent_field(kind, W, k)
    germ = singular.model_fields(kind, k)
    assert germ.reduce_field(dec.recompose() - W).is_zero()


def test_decomposition_rejects_normal_field():
    germ = singular.model_fields("D", 4)
    grad = germ.gradient()
    with pytest.raises(NotTangential):
        singular.decompose_tangent_field("D", SymbolicField(*grad), 4)


def test_bad_germ_names():
    with pytest.raises(InvalidInput):
        singular.model_fields("A", 0)
    with pytest.raises(InvalidInput):
        singular.model_fields("E", 6)
