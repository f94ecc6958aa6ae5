"""Surface membership, the bracket and its algebraic laws, Hamiltonian fields."""

from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from markovsymp.core.numeric import cabs, ctx
from markovsymp.core.poly import X, Y, Z, Poly
from markovsymp.core.reduce import poly_reduce
from markovsymp.errors import AllChartsSingular
from markovsymp.poisson import (bracket, bracket_unreduced, casimir_check, coordinate_fields,
                                hamiltonian_field, is_tangential, normal_component)
from markovsymp.surface import (SurfaceParams, SurfacePoint, omega_eval, on_surface, spanning_rank,
                                tangency_defect, tangent_fields_at)
from support import random_point
from test_core import coeffs, from_sympy, polys, to_sympy

params_st = st.builds(SurfaceParams, coeffs, coeffs, coeffs, coeffs,
                      st.sampled_from([Fraction(1), Fraction(-3), Fraction(2, 3)]))
small = st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1)),
                        coeffs, max_size=3).map(Poly)


def test_markov_bracket_example():
    assert bracket(X, Y, SurfaceParams.markov()).to_string() == "2*z^1-3*x^1*y^1"


def test_coordinate_brackets_are_gradient_components():
    params = SurfaceParams(1, 2, 3, 4, 5)
    Nx, Ny, Nz = params.normal_form()
    assert bracket(X, Y, params) == Nz
    assert bracket(Y, Z, params) == poly_reduce(Nx, params)
    assert bracket(Z, X, params) == poly_reduce(Ny, params)


@settings(max_examples=30, deadline=None)
@given(params_st, polys, polys)
def test_bracket_matches_sympy_determinant(params, f, g):
    P = to_sympy(params.defining_poly())
    F, G = to_sympy(f), to_sympy(g)
    grad = lambda e: [sp.diff(e, s) for s in sp.symbols("x y z")]
    det = sp.Matrix([grad(F), grad(G), grad(P)]).det()
    assert bracket_unreduced(f, g, params) == from_sympy(det)


@settings(max_examples=40, deadline=None)
@given(params_st, small, small, small)
def test_bracket_laws(params, f, g, h):
    br = lambda a, b: bracket(a, b, params)
    assert br(f, g) == -br(g, f)
    assert br(f, g * h) == poly_reduce(br(f, g) * h + g * br(f, h), params)
    jac = br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g))
    assert jac.is_zero()


@settings(max_examples=30, deadline=None)
@given(params_st, small)
def test_defining_poly_is_casimir(params, f):
    assert casimir_check(f, params).is_zero()


@settings(max_examples=30, deadline=None)
@given(params_st, small, small)
def test_hamiltonian_field_acts_as_bracket(params, f, g):
    Xf = hamiltonian_field(f, params)
    assert poly_reduce(Xf(g), params) == bracket(f, g, params)
    assert is_tangential(Xf, params)
    assert normal_component(Xf, params).is_zero()


def test_coordinate_fields_tangent():
    params = SurfaceParams(Fraction(1, 2), 0, -1, 3, 2)
    for V in coordinate_fields(params):
        assert is_tangential(V, params)


# numerical surface geometry -------------------------------------------------

def test_on_surface_and_fields():
    rng = random.Random(5)
    params = SurfaceParams(1, -2, Fraction(1, 3), 2, -1)
    for _ in range(10):
        pt = random_point(params, rng)
        ok, r = on_surface(params, *pt)
        assert ok, r
        assert spanning_rank(params, pt) == 2
        for v in tangent_fields_at(params, pt):
            assert tangency_defect(params, pt, v) < 1e-60


def test_omega_on_coordinate_fields_equals_bracket():
    rng = random.Random(7)
    params = SurfaceParams(Fraction(3, 7), Fraction(-2, 5), Fraction(1, 3), Fraction(5, 2), Fraction(7, 4))
    Vx, Vy, Vz = None, None, None
    for _ in range(5):
        pt = random_point(params, rng)
        Vx, Vy, Vz = tangent_fields_at(params, pt)
        want = bracket(X, Y, params).evaluate(*pt)
        assert cabs(omega_eval(params, pt, Vx, Vy) - want) < 1e-50 * (1 + cabs(want))


def test_omega_fails_at_singular_point():
    params = SurfaceParams.markov()
    with pytest.raises(AllChartsSingular):
        omega_eval(params, (0, 0, 0), (1, 0, 0), (0, 1, 0))
    assert spanning_rank(params, (0, 0, 0)) == 0


def test_params_json_round_trip():
    params = SurfaceParams(Fraction(1, 3), -2, 0, 5, Fraction(-7, 2))
    data = json.loads(json.dumps(params.to_json()))
    assert SurfaceParams.from_json(data) == params


def test_surface_point_json_round_trip():
    params = SurfaceParams.markov()
    pt = SurfacePoint.make(params, 1, 1, 1)
    back = SurfacePoint.from_json(params, json.loads(json.dumps(pt.to_json())))
    assert all(cabs(a - b) == 0 for a, b in zip(pt.coords(), back.coords()))
