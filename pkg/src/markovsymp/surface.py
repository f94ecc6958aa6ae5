"""Markov-type cubic surfaces x^2+y^2+z^2+Exyz-Ax-By-Cz-D = 0.

Parameters may be exact rationals (symbolic path) or complex numbers
(numeric path).  Numeric quantities are computed in the package mpmath
context at the current working precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core.numeric import cabs, complex_pair, ctx, to_mpc
from .core.poly import X, Y, Z, Poly
from .errors import AllChartsSingular, InvalidInput


def _coerce_param(v):
    if isinstance(v, bool):
        raise InvalidInput(f"bad parameter value {v!r}")
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except ValueError:
            return to_mpc(v)
    if isinstance(v, float):
        return Fraction(v)
    return to_mpc(v)


@dataclass(frozen=True)
class SurfaceParams:
    A: object = Fraction(0)
    B: object = Fraction(0)
    C: object = Fraction(0)
    D: object = Fraction(0)
    E: object = Fraction(-3)

    def __post_init__(self):
        for name in "ABCDE":
            object.__setattr__(self, name, _coerce_param(getattr(self, name)))
        if self.E == 0:
            raise InvalidInput("E must be nonzero", E="0")

    @classmethod
    def markov(cls) -> "SurfaceParams":
        return cls(0, 0, 0, 0, -3)

    @property
    def is_rational(self) -> bool:
        return all(isinstance(getattr(self, n), Fraction) for n in "ABCDE")

    def values(self) -> tuple:
        return (self.A, self.B, self.C, self.D, self.E)

    def numeric(self) -> tuple:
        return tuple(to_mpc(v) for v in self.values())

    # symbolic data --------------------------------------------------------

    def defining_poly(self) -> Poly:
        A, B, C, D, E = self.values()
        return X * X + Y * Y + Z * Z + (X * Y * Z).scale(E) - X.scale(A) - Y.scale(B) - Z.scale(C) - D

    def normal_form(self) -> tuple[Poly, Poly, Poly]:
        """(2x+Eyz-A, 2y+Exz-B, 2z+Exy-C), the gradient of the defining polynomial."""
        A, B, C, _, E = self.values()
        return (X.scale(2) + (Y * Z).scale(E) - A,
                Y.scale(2) + (X * Z).scale(E) - B,
                Z.scale(2) + (X * Y).scale(E) - C)

    # numeric data ---------------------------------------------------------

    def P(self, x, y, z):
        A, B, C, D, E = self.numeric()
        return x * x + y * y + z * z + E * x * y * z - A * x - B * y - C * z - D

    def N(self, x, y, z) -> tuple:
        A, B, C, _, E = self.numeric()
        return (2 * x + E * y * z - A, 2 * y + E * x * z - B, 2 * z + E * x * y - C)

    # serialization --------------------------------------------------------

    def to_json(self) -> dict:
        out = {}
        for name in "ABCDE":
            v = getattr(self, name)
            if isinstance(v, Fraction):
                out[name] = str(v)
            else:
                out[name] = complex_pair(v)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "SurfaceParams":
        if not isinstance(data, dict):
            raise InvalidInput("surface parameters must be a JSON object", input=data)
        unknown = set(data) - set("ABCDE")
        if unknown:
            raise InvalidInput(f"unknown parameter keys {sorted(unknown)}", input=data)
        defaults = {"A": 0, "B": 0, "C": 0, "D": 0, "E": -3}
        defaults.update(data)
        try:
            return cls(**defaults)
        except (ValueError, TypeError) as exc:
            raise InvalidInput(str(exc), input=data) from exc


@dataclass(frozen=True)
class SurfacePoint:
    x: object
    y: object
    z: object
    residual: object = 0

    @classmethod
    def make(cls, params: SurfaceParams, x, y, z) -> "SurfacePoint":
        x, y, z = to_mpc(x), to_mpc(y), to_mpc(z)
        return cls(x, y, z, params.P(x, y, z))

    def coords(self) -> tuple:
        return (self.x, self.y, self.z)

    def to_json(self) -> dict:
        return {"x": complex_pair(self.x), "y": complex_pair(self.y), "z": complex_pair(self.z),
                "residual": complex_pair(self.residual)}

    @classmethod
    def from_json(cls, params: SurfaceParams, data) -> "SurfacePoint":
        if isinstance(data, dict):
            coords = [data[k] for k in "xyz"]
        else:
            coords = list(data)
        if len(coords) != 3:
            raise InvalidInput("a point needs three coordinates", input=data)
        return cls.make(params, *coords)


def membership_tol():
    return ctx.ldexp(ctx.mpf(1), -(ctx.prec - 32))


def on_surface(params: SurfaceParams, x, y, z, tol=None) -> tuple[bool, object]:
    """Whether |P(x,y,z)| < tol, together with the residual P(x,y,z)."""
    r = params.P(to_mpc(x), to_mpc(y), to_mpc(z))
    tol = membership_tol() if tol is None else tol
    return bool(cabs(r) < tol), r


def tangent_fields_at(params: SurfaceParams, pt) -> tuple[tuple, tuple, tuple]:
    """Values of the three complete fields at ``pt`` as 3-vectors."""
    Nx, Ny, Nz = params.N(*_coords(pt))
    zero = 0 * Nx
    return ((zero, Nz, -Ny), (-Nz, zero, Nx), (Ny, -Nx, zero))


def _coords(pt) -> tuple:
    if isinstance(pt, SurfacePoint):
        return pt.coords()
    return tuple(to_mpc(c) for c in pt)


def omega_charts(params: SurfaceParams, pt, u: Sequence, v: Sequence) -> list[tuple]:
    """All three chart expressions as ``(denominator, value or None)`` pairs."""
    Nx, Ny, Nz = params.N(*_coords(pt))
    wedges = (
        (Nz, u[0] * v[1] - u[1] * v[0]),
        (Nx, u[1] * v[2] - u[2] * v[1]),
        (Ny, u[2] * v[0] - u[0] * v[2]),
    )
    return [(den, (num / den) if den != 0 else None) for den, num in wedges]


def omega_eval(params: SurfaceParams, pt, u: Sequence, v: Sequence):
    """The symplectic form evaluated on tangent vectors u, v at a smooth point."""
    u = [to_mpc(c) for c in u]
    v = [to_mpc(c) for c in v]
    charts = omega_charts(params, pt, u, v)
    den, val = max(charts, key=lambda dv: cabs(dv[0]))
    if cabs(den) < ctx.ldexp(ctx.mpf(1), -(ctx.prec // 2)):
        raise AllChartsSingular("all chart denominators vanish at this point",
                                point=[complex_pair(c) for c in _coords(pt)])
    return val


def spanning_rank(params: SurfaceParams, pt, tol=None) -> int:
    """Rank (0 or 2) of the antisymmetric matrix whose rows are the three fields at ``pt``."""
    N = params.N(*_coords(pt))
    tol = ctx.ldexp(ctx.mpf(1), -(ctx.prec // 2)) if tol is None else tol
    return 2 if max(cabs(c) for c in N) >= tol else 0


def tangency_defect(params: SurfaceParams, pt, v: Sequence):
    """|N . v| at ``pt``; zero exactly for tangent vectors."""
    N = params.N(*_coords(pt))
    return cabs(sum(a * to_mpc(b) for a, b in zip(N, v)))
