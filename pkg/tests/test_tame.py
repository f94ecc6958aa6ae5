"""Flow-time equations and the interpolating automorphism of Markov triples."""

from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markovsymp import tame
from markovsymp.core.numeric import cabs, ctx, precision
from markovsymp.errors import ExcludedZ, InvalidInput
from markovsymp.flows import flow_axis
from markovsymp.surface import SurfaceParams

MARKOV = SurfaceParams.markov()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["x", "y", "z"]))
def test_solved_times_hit_target(seed, axis):
    rng = random.Random(seed)
    pt = tame.random_markov_points(1, seed)[0]
    target = ctx.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2))
    coord = tame.moving_coordinates(axis)[rng.randint(0, 1)]
    idx = "xyz".index(coord)
    for t in tame.solve_flow_time(MARKOV, axis, pt, target, coord):
        img = flow_axis(MARKOV, axis, pt, t).coords()
        assert cabs(img[idx] - target) < 1e-40 * (1 + cabs(target))


def test_trig_form_matches_flow():
    pt = tame.random_markov_points(1, 3)[0]
    t = ctx.mpc("0.4", "-0.2")
    kappa, alpha, beta, gamma = tame._trig_form(MARKOV, "z", pt, 0)
    x_t = flow_axis(MARKOV, "z", pt, t).coords()[0]
    assert cabs(kappa + alpha * ctx.cos(gamma * t) + beta * ctx.sin(gamma * t) - x_t) < 1e-50


def test_excluded_fixed_coordinate():
    with pytest.raises(ExcludedZ):
        tame.solve_flow_time(MARKOV, "z", (1, 1, 0), 2)
    with pytest.raises(ExcludedZ):
        tame.sign_conditions(1, 1, ctx.mpf(2) / 3)
    with pytest.raises(InvalidInput):
        tame.solve_flow_time(MARKOV, "z", (1, 1, 1), 2, coordinate="z")


def test_sign_conditions_at_triples():
    for t in [(1, 1, 1), (1, 2, 5), (2, 5, 29)]:
        assert tame.sign_conditions(*t)["holds"]


def test_problem_constructors():
    assert tame.TameProblem.cyclic(3).eta == {1: 2, 2: 3, 3: 4}
    assert tame.TameProblem.transposition(3).eta == {1: 1, 2: 3, 3: 2}
    p = tame.TameProblem.parse_map("1:3,3:1", 3)
    assert p.eta == {1: 3, 2: 2, 3: 1}
    with pytest.raises(InvalidInput):
        tame.TameProblem.parse_map("1:1,1:2", 2)


@pytest.fixture(scope="module")
def cyclic_solution():
    return tame.build_tame_automorphism(tame.TameProblem.cyclic(3, seed=7))


def test_cyclic_interpolation(cyclic_solution):
    assert cyclic_solution.max_residual < tame.RESIDUAL_TOL
    for row in tame.verify_solution(cyclic_solution):
        assert max(row["relative"]) < 1e-30


def test_solution_json_replay(cyclic_solution):
    data = json.loads(json.dumps(cyclic_solution.to_json()))
    again = tame.TameSolution.from_json(data)
    rows = tame.verify_solution(again)
    assert max(max(r["relative"]) for r in rows) < 1e-30


def test_build_is_deterministic():
    a = tame.build_tame_automorphism(tame.TameProblem.transposition(3, seed=11)).to_json()
    b = tame.build_tame_automorphism(tame.TameProblem.transposition(3, seed=11)).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_symplectic_at_sources(cyclic_solution):
    assert tame.verify_symplectic_at_points(cyclic_solution) < 1e-20


def test_identity_solution_fixes_triples():
    sol = tame.identity_solution(2)
    with precision(sol.precision):
        for t in sol.triples[:2]:
            img = sol.automorphism(MARKOV, [ctx.mpf(c) for c in t.as_tuple()], check=False).coords()
            assert max(cabs(a - b) for a, b in zip(img, t.as_tuple())) < 1e-30
