"""Compiled and numpy kernels agree with each other and with exact results."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from markovsymp import _kernels, flows, markov
from markovsymp.surface import SurfaceParams
from support import random_point

PARAMS = SurfaceParams(Fraction(3, 7), Fraction(-2, 5), Fraction(1, 3), Fraction(5, 2), Fraction(7, 4))
BACKENDS = [False, True] if _kernels.HAVE_NUMBA else [False]


def _cparams(params):
    return [complex(v) for v in params.numeric()]


@pytest.mark.parametrize("use_numba", BACKENDS)
def test_scan_matches_tree(use_numba):
    want = [t.as_tuple() for t in markov.enumerate_ordered(5000)]
    assert sorted(_kernels.markov_scan(5000, use_numba)) == sorted(want)


@pytest.mark.parametrize("use_numba", BACKENDS)
@pytest.mark.parametrize("axis", [0, 1, 2])
def test_rk4_matches_closed_form(use_numba, axis):
    rng = random.Random(axis)
    pts = [random_point(PARAMS, rng, 0.6) for _ in range(4)]
    ts = [complex(rng.uniform(-1, 1), rng.uniform(-0.3, 0.3)) for _ in pts]
    out = _kernels.rk4_axis_flow(_cparams(PARAMS), axis, [[complex(c) for c in p] for p in pts], ts,
                                 nsteps=2000, use_numba=use_numba)
    for p, t, row in zip(pts, ts, out):
        exact = flows.flow_axis(PARAMS, "xyz"[axis], p, t).coords()
        assert max(abs(complex(a) - b) for a, b in zip(exact, row)) < 1e-9


def test_rk4_backends_agree():
    if not _kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    pts = np.array([[0.1 + 0.2j, 0.3, 0.0]] * 3)
    ts = np.array([0.5, 1j, -0.25])
    a = _kernels.rk4_axis_flow(_cparams(PARAMS), 2, pts, ts, 500, use_numba=True)
    b = _kernels.rk4_axis_flow(_cparams(PARAMS), 2, pts, ts, 500, use_numba=False)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("use_numba", BACKENDS)
def test_newton_finds_markov_origin(use_numba):
    starts = np.array([[0.1, -0.05, 0.08], [0.02j, 0.03, -0.01]])
    out = _kernels.newton_critical_points(_cparams(SurfaceParams.markov()), starts, 40, use_numba)
    assert np.abs(out).max() < 1e-12


def test_backend_name():
    assert _kernels.backend() in ("numba", "numpy")
