"""Closed-form complete flows of V^x, V^y, V^z, their shears and compositions.

Along V^z the coordinate z is constant and (x, y) solve a linear ODE with
constant coefficients.  Its solution only involves the entire functions

    C0 = cos(t*sqrt(w)),  S0 = sin(t*sqrt(w))/sqrt(w),  V0 = (1 - C0)/w

of w = 4 - E^2 z^2, so no branch of the square root is ever visible.
The other two axes are handled by cyclic relabelling of the coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core.numeric import cabs, complex_pair, ctx, to_mpc
from .core.poly import Poly, parse_poly
from .errors import DegenerateFrame, InvalidInput, SurfaceDrift
from .surface import SurfaceParams, SurfacePoint, omega_eval, tangent_fields_at

THETA = 0.25
AXES = ("x", "y", "z")

# position of (x, y, z) inside the relabelled frame where the axis plays the role of z
_PERM = {"z": (0, 1, 2), "x": (2, 0, 1), "y": (1, 2, 0)}


def entire_trig(w, t) -> tuple:
    """(cos(t*sqrt(w)), sin(t*sqrt(w))/sqrt(w), (1 - cos(t*sqrt(w)))/w)."""
    w, t = to_mpc(w), to_mpc(t)
    u = t * t * w
    if cabs(u) < THETA:
        return _trig_series(u, t)
    s = ctx.sqrt(w)
    c = ctx.cos(t * s)
    return c, ctx.sin(t * s) / s, (1 - c) / w


def _trig_series(u, t) -> tuple:
    # C0 = sum (-u)^n/(2n)!, S0 = t sum (-u)^n/(2n+1)!, V0 = t^2 sum (-u)^n/(2n+2)!
    eps = ctx.ldexp(ctx.mpf(1), -ctx.prec - 8)
    c = s = v = ctx.mpc(0)
    term = ctx.mpc(1)  # (-u)^n / (2n)!
    n = 0
    while True:
        s_term = term / (2 * n + 1)
        v_term = s_term / (2 * n + 2)
        c += term
        s += s_term
        v += v_term
        if cabs(term) < eps:
            break
        term = term * (-u) / ((2 * n + 1) * (2 * n + 2))
        n += 1
    return c, t * s, t * t * v


def _scale(params: SurfaceParams, x, y, z):
    A, B, C, D, E = (cabs(v) for v in params.numeric())
    ax, ay, az = cabs(x), cabs(y), cabs(z)
    return 1 + ax * ax + ay * ay + az * az + E * ax * ay * az + A * ax + B * ay + C * az + cabs(D)


def drift_tol(params: SurfaceParams, x, y, z, bits: int = 64):
    """Residual allowed after a flow step: 2^-(prec - bits) times the size of the terms of P."""
    return ctx.ldexp(_scale(params, x, y, z), -(ctx.prec - bits))


def _checked(params: SurfaceParams, x, y, z, check: bool, where: str) -> SurfacePoint:
    r = params.P(x, y, z)
    if check and cabs(r) > drift_tol(params, x, y, z):
        raise SurfaceDrift(f"{where}: image left the surface (precision exhausted?)",
                           residual=complex_pair(r, 10), precision=ctx.prec)
    return SurfacePoint(x, y, z, r)


def flow_z(params: SurfaceParams, pt, t, check: bool = True) -> SurfacePoint:
    """Time-t flow of V^z = (2y+Exz-B) d/dx - (2x+Eyz-A) d/dy."""
    x, y, z = _coords(pt)
    return _checked(params, *_flow_z_raw(params.numeric(), x, y, z, to_mpc(t)), check, "flow_z")


def _flow_z_raw(nums, x, y, z, t):
    A, B, _, _, E = nums[:5]
    w = 4 - E * E * z * z
    C0, S0, V0 = entire_trig(w, t)
    Nx = 2 * x + E * y * z - A
    Ny = 2 * y + E * x * z - B
    xt = x * C0 + Ny * S0 + (2 * A - B * E * z) * V0
    yt = y * C0 - Nx * S0 + (2 * B - A * E * z) * V0
    return xt, yt, z


def flow_axis(params: SurfaceParams, axis: str, pt, t, check: bool = True) -> SurfacePoint:
    """Time-t flow of the complete field V^axis."""
    if axis not in _PERM:
        raise InvalidInput(f"axis must be one of x, y, z, got {axis!r}", input=axis)
    c = _coords(pt)
    A, B, C, D, E = params.numeric()
    if axis == "z":
        nums, local = (A, B, C, D, E), c
    elif axis == "x":
        nums, local = (B, C, A, D, E), (c[1], c[2], c[0])
    else:
        nums, local = (C, A, B, D, E), (c[2], c[0], c[1])
    out = _flow_z_raw(nums, *local, to_mpc(t))
    perm = _PERM[axis]
    x, y, z = out[perm[0]], out[perm[1]], out[perm[2]]
    return _checked(params, x, y, z, check, f"flow_{axis}")


def _coords(pt) -> tuple:
    if isinstance(pt, SurfacePoint):
        return pt.coords()
    return tuple(to_mpc(v) for v in pt)


# time functions ----------------------------------------------------------------

class TimeFunction:
    """A function of one variable used as a shear time."""

    def __call__(self, v):
        raise NotImplementedError

    def negated(self) -> "TimeFunction":
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PolyTime(TimeFunction):
    poly: Poly

    def __call__(self, v):
        v = to_mpc(v)
        return self.poly.evaluate(v, v, v)

    def negated(self) -> "PolyTime":
        return PolyTime(-self.poly)

    def to_json(self) -> dict:
        return {"time_poly": self.poly.to_string()}


@dataclass(frozen=True)
class ComplexPolyTime(TimeFunction):
    """sum c_i v^i with complex coefficients (lowest degree first)."""

    coeffs: tuple

    def __call__(self, v):
        v = to_mpc(v)
        acc = ctx.mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * v + c
        return acc

    def negated(self) -> "ComplexPolyTime":
        return ComplexPolyTime(tuple(-c for c in self.coeffs))

    def to_json(self) -> dict:
        return {"time_coeffs": [complex_pair(c) for c in self.coeffs]}


@dataclass(frozen=True)
class InterpTime(TimeFunction):
    """Lagrange interpolant through (node, value) pairs, evaluated in barycentric form."""

    nodes: tuple
    values: tuple
    sign: int = 1

    def weights(self) -> list:
        w = []
        for j, xj in enumerate(self.nodes):
            prod = ctx.mpc(1)
            for k, xk in enumerate(self.nodes):
                if k != j:
                    prod *= xj - xk
            w.append(1 / prod)
        return w

    def __call__(self, v):
        v = to_mpc(v)
        nodes = [to_mpc(n) for n in self.nodes]
        vals = [to_mpc(f) for f in self.values]
        for n, f in zip(nodes, vals):
            if v == n:
                return self.sign * f
        w = self.weights()
        num = den = ctx.mpc(0)
        for wj, n, f in zip(w, nodes, vals):
            q = wj / (v - n)
            num += q * f
            den += q
        return self.sign * num / den

    def negated(self) -> "InterpTime":
        return InterpTime(self.nodes, self.values, -self.sign)

    def to_json(self) -> dict:
        return {"time_interp": {"nodes": [complex_pair(n) for n in self.nodes],
                                "values": [complex_pair(f) for f in self.values],
                                "sign": self.sign}}


def time_from_json(data: dict, axis: str) -> TimeFunction:
    if "time_poly" in data:
        p = parse_poly(data["time_poly"])
        if p.variables() - {axis}:
            raise InvalidInput(f"time polynomial of a {axis}-shear may only involve {axis}", input=data)
        return PolyTime(p)
    if "time_coeffs" in data:
        return ComplexPolyTime(tuple(to_mpc(c) for c in data["time_coeffs"]))
    if "time_interp" in data:
        d = data["time_interp"]
        return InterpTime(tuple(to_mpc(n) for n in d["nodes"]), tuple(to_mpc(v) for v in d["values"]),
                          int(d.get("sign", 1)))
    raise InvalidInput("shear needs time_poly, time_coeffs or time_interp", input=data)


@dataclass(frozen=True)
class ShearFlow:
    """Flow of V^axis for the time f(c), c the coordinate that V^axis fixes."""

    axis: str
    time: TimeFunction

    def __post_init__(self):
        if self.axis not in AXES:
            raise InvalidInput(f"axis must be one of x, y, z, got {self.axis!r}", input=self.axis)
        if isinstance(self.time, Poly):
            object.__setattr__(self, "time", PolyTime(self.time))
        if isinstance(self.time, PolyTime) and self.time.poly.variables() - {self.axis}:
            raise InvalidInput(f"time polynomial of a {self.axis}-shear may only involve {self.axis}",
                               input=self.time.poly.to_string())

    def __call__(self, params: SurfaceParams, pt, check: bool = True) -> SurfacePoint:
        c = _coords(pt)
        t = self.time(c[AXES.index(self.axis)])
        return flow_axis(params, self.axis, c, t, check)

    def inverse(self) -> "ShearFlow":
        return ShearFlow(self.axis, self.time.negated())

    def to_json(self) -> dict:
        return {"axis": self.axis, **self.time.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "ShearFlow":
        if not isinstance(data, dict) or data.get("axis") not in AXES:
            raise InvalidInput("shear entries need an axis among x, y, z", input=data)
        return cls(data["axis"], time_from_json(data, data["axis"]))


def axis_flow(axis: str, t) -> ShearFlow:
    """Constant-time shear, i.e. the plain flow of V^axis at time t."""
    if isinstance(t, (int, Fraction)):
        return ShearFlow(axis, PolyTime(Poly.const(t)))
    return ShearFlow(axis, ComplexPolyTime((to_mpc(t),)))


@dataclass(frozen=True)
class Automorphism:
    """s_1 o s_2 o ... o s_n; the last listed shear acts first."""

    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __call__(self, params: SurfaceParams, pt, check: bool = True) -> SurfacePoint:
        return apply(self, params, pt, check)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self o other."""
        return Automorphism(self.steps + other.steps)

    def inverse(self) -> "Automorphism":
        return Automorphism(tuple(s.inverse() for s in reversed(self.steps)))

    def to_json(self) -> list:
        return [s.to_json() for s in self.steps]

    @classmethod
    def from_json(cls, data) -> "Automorphism":
        if not isinstance(data, list):
            raise InvalidInput("an automorphism is a JSON array of shears", input=data)
        return cls(tuple(ShearFlow.from_json(d) for d in data))


def apply(auto: Automorphism, params: SurfaceParams, pt, check: bool = True) -> SurfacePoint:
    c = _coords(pt)
    out = SurfacePoint(c[0], c[1], c[2], params.P(*c))
    for step in reversed(auto.steps):
        out = step(params, out, check)
    return out


# symplecticity -----------------------------------------------------------------

def tangent_frame(params: SurfaceParams, pt) -> tuple[str, str]:
    """The pair of axes whose fields are the best-conditioned tangent frame at pt."""
    c = _coords(pt)
    N = params.N(*c)
    # omega(V^a, V^b) is the remaining component of N up to sign
    best = max(range(3), key=lambda i: cabs(N[i]))
    if cabs(N[best]) < ctx.ldexp(ctx.mpf(1), -(ctx.prec // 2)):
        raise DegenerateFrame("no independent tangent pair at a singular point",
                              point=[complex_pair(v, 20) for v in c])
    pairs = {2: ("x", "y"), 0: ("y", "z"), 1: ("z", "x")}
    return pairs[best]


def pushforward(params: SurfaceParams, auto: Automorphism, pt, axis: str, h) -> tuple:
    """Central difference of F along the flow curve of V^axis through pt."""
    h = to_mpc(h)
    plus = apply(auto, params, flow_axis(params, axis, pt, h, check=False), check=False)
    minus = apply(auto, params, flow_axis(params, axis, pt, -h, check=False), check=False)
    return tuple((a - b) / (2 * h) for a, b in zip(plus.coords(), minus.coords()))


def check_symplectic(params: SurfaceParams, auto: Automorphism, pt, h=1e-5) -> object:
    """Relative defect |omega(F_*u, F_*v) - omega(u, v)| / |omega(u, v)|."""
    c = _coords(pt)
    a, b = tangent_frame(params, c)
    fields = dict(zip(AXES, tangent_fields_at(params, c)))
    u, v = fields[a], fields[b]
    before = omega_eval(params, c, u, v)
    image = apply(auto, params, c, check=False)
    Fu = pushforward(params, auto, c, a, h)
    Fv = pushforward(params, auto, c, b, h)
    after = omega_eval(params, image, Fu, Fv)
    return cabs(after - before) / cabs(before)
