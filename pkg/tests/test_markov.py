"""Markov triples, the Lagrange spectrum values and the growth fit."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markovsymp import markov
from markovsymp.core.numeric import ctx
from markovsymp.errors import InvalidInput, NotMarkovNumber

# OEIS A002559
KNOWN = [1, 2, 5, 13, 29, 34, 89, 169, 194, 233, 433, 610, 985, 1325, 1597, 2897, 4181, 5741, 6466]


def test_first_markov_numbers():
    assert markov.first_markov_numbers(len(KNOWN)) == KNOWN


def test_enumerate_small():
    got = [t.as_tuple() for t in markov.enumerate_ordered(30)]
    assert got == [(1, 1, 1), (1, 1, 2), (1, 2, 5), (1, 5, 13), (2, 5, 29)]


@pytest.mark.parametrize("bound", [1, 10, 100, 1000, 20000])
def test_tree_matches_brute_force(bound):
    assert markov.enumerate_ordered(bound) == markov.brute_force(bound)


def test_bound_1000_count():
    assert len(markov.enumerate_ordered(1000)) == 13


@settings(max_examples=30)
@given(st.integers(1, 50000))
def test_every_triple_is_a_solution(bound):
    for t in markov.enumerate_ordered(bound):
        assert t.x ** 2 + t.y ** 2 + t.z ** 2 == 3 * t.x * t.y * t.z and t.z <= bound


def test_uniqueness_to_a_million():
    assert markov.uniqueness_scan(10 ** 6) == {}


def test_invalid_triple():
    with pytest.raises(InvalidInput):
        markov.MarkovTriple(1, 2, 3)
    with pytest.raises(InvalidInput):
        markov.enumerate_ordered(0)


@pytest.mark.parametrize("z", [1, 2, 5, 13, 29])
def test_lagrange_values(z):
    assert abs(float(markov.lagrange_value(z)) - math.sqrt(9 * z * z - 4) / z) < 1e-14
    assert markov.lagrange_value(z) < 3


def test_lagrange_known():
    assert abs(markov.lagrange_value(1) - ctx.sqrt(5)) < 1e-60
    assert abs(markov.lagrange_value(2) - ctx.sqrt(8)) < 1e-60


@pytest.mark.parametrize("z", [3, 4, 0, -5, True, 2.0])
def test_lagrange_rejects(z):
    with pytest.raises(NotMarkovNumber):
        markov.lagrange_value(z)


def test_zagier_fit_window():
    fit = markov.zagier_fit(200, (100, 200))
    assert 2.2 < fit.C < 2.5
    assert len(fit.residuals) == 101
    with pytest.raises(InvalidInput):
        markov.zagier_fit(5)
    with pytest.raises(InvalidInput):
        markov.zagier_fit(50, (30, 20))
