"""Jacobian Poisson bracket with Casimir P and Hamiltonian vector fields.

Sign convention: the Hamiltonian field of f is X_f = grad(P) x grad(f), so that

    X_f(g) = {f, g} = det(grad f, grad g, grad P),

and X_x, X_y, X_z are exactly the complete fields V^x, V^y, V^z.  With the
symplectic form omega = dx^dy / (2z+Exy-C) this gives i_{X_f} omega = -df and
omega(X_f, X_g) = {f, g}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .core.poly import ZERO, Poly, sum_polys
from .core.reduce import poly_reduce
from .surface import SurfaceParams

SIGN_CONVENTION = "X_f = grad(P) x grad(f); X_f(g) = {f,g}; i_{X_f} omega = -df; X_x = V^x"


@dataclass(frozen=True)
class SymbolicField:
    """Polynomial vector field cx d/dx + cy d/dy + cz d/dz."""

    cx: Poly = ZERO
    cy: Poly = ZERO
    cz: Poly = ZERO

    @property
    def coeffs(self) -> tuple[Poly, Poly, Poly]:
        return (self.cx, self.cy, self.cz)

    def __call__(self, g: Poly) -> Poly:
        """Directional derivative V(g)."""
        return self.cx * g.diff("x") + self.cy * g.diff("y") + self.cz * g.diff("z")

    def __add__(self, other: "SymbolicField") -> "SymbolicField":
        return SymbolicField(*(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "SymbolicField") -> "SymbolicField":
        return SymbolicField(*(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "SymbolicField":
        return SymbolicField(-self.cx, -self.cy, -self.cz)

    def __mul__(self, f) -> "SymbolicField":
        return SymbolicField(*(c * f for c in self.coeffs))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, SymbolicField) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def map(self, fn: Callable[[Poly], Poly]) -> "SymbolicField":
        return SymbolicField(*(fn(c) for c in self.coeffs))

    def lie_bracket(self, other: "SymbolicField") -> "SymbolicField":
        return SymbolicField(*(self(b) - other(a) for a, b in zip(self.coeffs, other.coeffs)))

    def evaluate(self, x, y, z) -> tuple:
        return tuple(c.evaluate(x, y, z) for c in self.coeffs)

    def degree(self) -> int:
        return max(c.degree() for c in self.coeffs)

    def to_json(self) -> dict:
        return {"dx": self.cx.to_string(), "dy": self.cy.to_string(), "dz": self.cz.to_string()}


def _det_bracket(f: Poly, g: Poly, P: Poly) -> Poly:
    fx, fy, fz = f.gradient()
    gx, gy, gz = g.gradient()
    Px, Py, Pz = P.gradient()
    return fx * (gy * Pz - gz * Py) - fy * (gx * Pz - gz * Px) + fz * (gx * Py - gy * Px)


def bracket_unreduced(f: Poly, g: Poly, params: SurfaceParams) -> Poly:
    """{f, g} in C[x,y,z] before reduction modulo the surface ideal."""
    return _det_bracket(f, g, params.defining_poly())


def bracket(f: Poly, g: Poly, params: SurfaceParams) -> Poly:
    """{f, g} reduced to normal form."""
    return poly_reduce(bracket_unreduced(f, g, params), params)


@dataclass(frozen=True)
class BracketTable:
    params: SurfaceParams
    xy: Poly
    yz: Poly
    zx: Poly

    @classmethod
    def of(cls, params: SurfaceParams) -> "BracketTable":
        Nx, Ny, Nz = params.normal_form()
        return cls(params, Nz, Nx, Ny)

    def leibniz(self, f: Poly, g: Poly) -> Poly:
        """Bilinear Leibniz extension of the generator table (unreduced)."""
        fx, fy, fz = f.gradient()
        gx, gy, gz = g.gradient()
        return sum_polys((
            (fx * gy - fy * gx) * self.xy,
            (fy * gz - fz * gy) * self.yz,
            (fz * gx - fx * gz) * self.zx,
        ))


def hamiltonian_field(f: Poly, params: SurfaceParams) -> SymbolicField:
    """X_f = grad(P) x grad(f); see the module docstring for the sign convention."""
    fx, fy, fz = f.gradient()
    Px, Py, Pz = params.normal_form()
    return SymbolicField(Py * fz - Pz * fy, Pz * fx - Px * fz, Px * fy - Py * fx)


def coordinate_fields(params: SurfaceParams) -> tuple[SymbolicField, SymbolicField, SymbolicField]:
    """The complete fields V^x, V^y, V^z."""
    Nx, Ny, Nz = params.normal_form()
    return (SymbolicField(ZERO, Nz, -Ny), SymbolicField(-Nz, ZERO, Nx), SymbolicField(Ny, -Nx, ZERO))


def normal_component(field: SymbolicField, params: SurfaceParams) -> Poly:
    """N(V) reduced modulo the ideal; zero iff the field is tangential."""
    N = params.normal_form()
    return poly_reduce(sum_polys(n * c for n, c in zip(N, field.coeffs)), params)


def is_tangential(field: SymbolicField, params: SurfaceParams) -> bool:
    return normal_component(field, params).is_zero()


def casimir_check(f: Poly, params: SurfaceParams) -> Poly:
    """{P, f} before reduction; identically zero for every f."""
    return bracket_unreduced(params.defining_poly(), f, params)
