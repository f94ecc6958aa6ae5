"""Shared helpers for the test suite: random parameters and random surface points."""

from __future__ import annotations

import random
from fractions import Fraction

from markovsymp.core.numeric import ctx
from markovsymp.core.poly import Poly
from markovsymp.surface import SurfaceParams


def random_params(rng: random.Random, E_choices=(-3, -2, -1, 1, 2, 3), spread: int = 3) -> SurfaceParams:
    def q():
        return Fraction(rng.randint(-spread * 4, spread * 4), rng.randint(1, 4))

    return SurfaceParams(q(), q(), q(), q(), Fraction(rng.choice(E_choices), rng.randint(1, 2)))


def point_from_xy(params: SurfaceParams, x, y, root: int = 0) -> tuple:
    """Solve P(x, y, z) = 0 for z."""
    A, B, C, D, E = params.numeric()
    b = E * x * y - C
    c = x * x + y * y - A * x - B * y - D
    s = ctx.sqrt(b * b - 4 * c)
    z = (-b + s) / 2 if root == 0 else (-b - s) / 2
    return (ctx.mpc(x), ctx.mpc(y), z)


def point_from_xz(params: SurfaceParams, x, z, root: int = 0) -> tuple:
    """Solve P(x, y, z) = 0 for y."""
    A, B, C, D, E = params.numeric()
    b = E * x * z - B
    c = x * x + z * z - A * x - C * z - D
    s = ctx.sqrt(b * b - 4 * c)
    y = (-b + s) / 2 if root == 0 else (-b - s) / 2
    return (ctx.mpc(x), y, ctx.mpc(z))


def random_point(params: SurfaceParams, rng: random.Random, radius: float = 1.0) -> tuple:
    x = ctx.mpc(rng.uniform(-radius, radius), rng.uniform(-radius, radius))
    y = ctx.mpc(rng.uniform(-radius, radius), rng.uniform(-radius, radius))
    return point_from_xy(params, x, y, rng.randint(0, 1))


def random_poly(rng: random.Random, max_deg: int = 4, terms: int = 4, coeff: int = 5) -> Poly:
    out = {}
    for _ in range(terms):
        d = rng.randint(0, max_deg)
        i = rng.randint(0, d)
        j = rng.randint(0, d - i)
        out[(i, j, d - i - j)] = Fraction(rng.randint(-coeff, coeff), rng.randint(1, 3))
    return Poly(out)


def max_abs_diff(a, b):
    return max(abs(complex(u) - complex(v)) for u, v in zip(a, b))
