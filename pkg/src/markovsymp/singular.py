"""Singular points of Markov-type surfaces and the model germs A_k, D_k.

Singular points solve grad P = 0 and P = 0.  With E = 1 the first gradient
equation gives x = (A - yz)/2; the remaining two become

    g1 = (4 - z^2) y + (A z - 2B),    g2 = -z y^2 + A y + (4z - 2C),

and the resultant in y is a quintic in z.  Classification uses the Hessian
corank and, in corank one, a formal splitting of the Taylor expansion.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import _kernels
from .core.echelon import EchelonBasis
from .core.numeric import cabs, complex_pair, ctx, to_mpc
from .core.poly import X, Y, Z, ZERO, Poly, PowerReducer, grlex_key, sum_polys
from .errors import (DecompositionFailure, InvalidInput, JetDegenerate, NotSingular, NotTangential,
                     ResultantDegenerate)
from .poisson import SymbolicField
from .surface import SurfaceParams

SERIES_DEGREE = 10


# rescaling --------------------------------------------------------------------

def rescale_to_E1(params: SurfaceParams) -> tuple[SurfaceParams, object]:
    """Parameters of E^2 P(x/E, y/E, z/E); a point p of the old surface maps to E*p."""
    A, B, C, D, E = params.values()
    return SurfaceParams(A * E, B * E, C * E, D * E * E, 1), E


# exact univariate helpers (coefficients lowest degree first) --------------------

def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _pmul(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            out[i + j] += u * v
    return _trim(out)


def _padd(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _pscale(a: list, c) -> list:
    return _trim([c * v for v in a])


def _pdivmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        c = Fraction(a[-1]) / b[-1]
        d = len(a) - len(b)
        q[d] = c
        for i, v in enumerate(b):
            a[i + d] -= c * v
        a.pop()
        _trim(a)
    return _trim(q), a


def _pgcd(a: list, b: list) -> list:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pdivmod(a, b)[1]
    return [Fraction(v) / a[-1] for v in a] if a else a


def _pderiv(a: list) -> list:
    return _trim([i * a[i] for i in range(1, len(a))])


def _peval(a: list, t):
    acc = 0 * t
    for c in reversed(a):
        acc = acc * t + c
    return acc


def resultant_in_z(params: SurfaceParams) -> list:
    """Res_y(g1, g2) as a polynomial in z (lowest degree first); needs E = 1."""
    A, B, C = params.A, params.B, params.C
    a1 = [4, 0, -1]
    a0 = [-2 * B, A]
    b2 = [0, -1]
    b1 = [A]
    b0 = [-2 * C, 4]
    res = _padd(_padd(_pmul(b2, _pmul(a0, a0)), _pscale(_pmul(b1, _pmul(a1, a0)), -1)), _pmul(b0, _pmul(a1, a1)))
    return res


# singular points ----------------------------------------------------------------

def _tol(scale=1):
    return ctx.ldexp(ctx.mpf(1), -(ctx.prec // 4)) * (1 + cabs(scale))


def _is_exact_zero(v) -> bool:
    return isinstance(v, (int, Fraction)) and v == 0


def _exact_point(params: SurfaceParams, pt) -> tuple | None:
    """Snap a numeric point to rationals if that gives an exact singular point."""
    if not params.is_rational:
        return None
    q = []
    for c in pt:
        c = to_mpc(c)
        if cabs(c.imag) > _tol(c):
            return None
        q.append(Fraction(str(ctx.nstr(c.real, 40))).limit_denominator(10**9))
    if all(v == 0 for v in params.N(*q)) and params.P(*q) == 0:
        return tuple(q)
    return None


def _exact_N(params, pt):
    A, B, C, D, E = params.values()
    x, y, z = pt
    return (2 * x + E * y * z - A, 2 * y + E * x * z - B, 2 * z + E * x * y - C)


def _exact_P(params, pt):
    A, B, C, D, E = params.values()
    x, y, z = pt
    return x * x + y * y + z * z + E * x * y * z - A * x - B * y - C * z - D


def _refine(params: SurfaceParams, pt, iters: int = 80) -> tuple:
    """Newton on grad P = 0 at the working precision."""
    A, B, C, D, E = params.numeric()
    x, y, z = (to_mpc(c) for c in pt)
    for _ in range(iters):
        F = [2 * x + E * y * z - A, 2 * y + E * x * z - B, 2 * z + E * x * y - C]
        H = ctx.matrix([[2, E * z, E * y], [E * z, 2, E * x], [E * y, E * x, 2]])
        try:
            d = ctx.lu_solve(H, ctx.matrix(F))
        except ZeroDivisionError:
            break
        x, y, z = x - d[0], y - d[1], z - d[2]
        if cabs(d[0]) + cabs(d[1]) + cabs(d[2]) < ctx.ldexp(ctx.mpf(1), -ctx.prec + 8) * (1 + cabs(x) + cabs(y) + cabs(z)):
            break
    return (x, y, z)


def _dedupe(points: list) -> list:
    out = []
    for p in points:
        if all(max(cabs(to_mpc(a) - to_mpc(b)) for a, b in zip(p, q)) > _tol(max(cabs(to_mpc(c)) for c in p))
               for q in out):
            out.append(p)
    return out


def _accept(params: SurfaceParams, pt) -> bool:
    if all(isinstance(c, Fraction) for c in pt) and params.is_rational:
        return all(v == 0 for v in _exact_N(params, pt)) and _exact_P(params, pt) == 0
    c = [to_mpc(v) for v in pt]
    scale = 1 + sum(cabs(v) for v in c) ** 3
    return cabs(params.P(*c)) < _tol(scale) and max(cabs(v) for v in params.N(*c)) < _tol(scale)


def _candidates_from_z(params: SurfaceParams, z) -> list:
    A, B, C = params.A, params.B, params.C
    exact = isinstance(z, Fraction) and params.is_rational
    if not exact:
        A, B, C, z = to_mpc(A), to_mpc(B), to_mpc(C), to_mpc(z)
    a1 = 4 - z * z
    a0 = A * z - 2 * B
    pts = []
    small = (a1 == 0) if exact else cabs(a1) < _tol(4)
    if not small:
        y = -a0 / a1
        pts.append(((A - y * z) / 2, y, z))
    else:
        # g1 degenerates; y solves the quadratic g2 and a0 must vanish
        b2, b1, b0 = -z, A, 4 * z - 2 * C
        if exact:
            disc = b1 * b1 - 4 * b2 * b0
            ys = _rational_sqrt_roots(b2, b1, disc)
            if ys is None:
                ys = [(-b1 + s) / (2 * b2) for s in (ctx.sqrt(to_mpc(disc)), -ctx.sqrt(to_mpc(disc)))]
        else:
            s = ctx.sqrt(to_mpc(b1 * b1 - 4 * b2 * b0))
            ys = [(-b1 + s) / (2 * b2), (-b1 - s) / (2 * b2)]
        for y in ys:
            pts.append(((A - y * z) / 2, y, z))
    return pts


def _rational_sqrt_roots(b2, b1, disc):
    if disc < 0:
        return None
    num, den = disc.numerator, disc.denominator
    rn, rd = _isqrt(num), _isqrt(den)
    if rn * rn != num or rd * rd != den:
        return None
    s = Fraction(rn, rd)
    return [(-b1 + s) / (2 * b2), (-b1 - s) / (2 * b2)]


def _isqrt(n: int) -> int:
    import math

    return math.isqrt(n)


def find_singular_points(params: SurfaceParams, search_box: float = 10.0, method: str = "resultant",
                         seed: int = 0, starts: int = 400) -> list[tuple]:
    """All singular points of a surface with E = 1.

    Rational points are returned exactly as Fractions, others as complex numbers.
    """
    if params.E != 1:
        raise InvalidInput("find_singular_points expects E = 1; use rescale_to_E1 first",
                           params=params.to_json())
    if method == "newton":
        return _newton_points(params, search_box, seed, starts)
    try:
        return _resultant_points(params)
    except ResultantDegenerate:
        return _newton_points(params, search_box, seed, starts)


def _resultant_points(params: SurfaceParams) -> list[tuple]:
    res = resultant_in_z(params)
    if len(res) <= 1:
        raise ResultantDegenerate("resultant vanishes identically")
    zs: list = []
    if params.is_rational:
        sqf = _pdivmod(res, _pgcd(res, _pderiv(res)))[0]
        roots = ctx.polyroots([to_mpc(c) for c in reversed(sqf)], maxsteps=400, extraprec=2 * ctx.prec,
                              error=False) if len(sqf) > 1 else []
        for r in roots:
            q = _snap_root(sqf, r)
            zs.append(q if q is not None else r)
    else:
        roots = ctx.polyroots([to_mpc(c) for c in reversed(res)], maxsteps=400, extraprec=2 * ctx.prec,
                              error=False)
        zs = list(roots)
    pts = []
    for z in zs:
        for cand in _candidates_from_z(params, z):
            if not all(isinstance(c, Fraction) for c in cand):
                cand = _refine(params, cand)
                snapped = _exact_point(params, cand)
                cand = snapped if snapped is not None else cand
            if _accept(params, cand):
                pts.append(cand)
    return _sort_points(_dedupe(pts))


def _snap_root(poly: list, r):
    if cabs(to_mpc(r).imag) > _tol(r):
        return None
    q = Fraction(str(ctx.nstr(to_mpc(r).real, 40))).limit_denominator(10**9)
    return q if _peval(poly, q) == 0 else None


def _newton_points(params: SurfaceParams, box: float, seed: int, n: int) -> list[tuple]:
    rng = random.Random(seed)
    starts = [[complex(rng.uniform(-box, box), rng.uniform(-box, box)) for _ in range(3)] for _ in range(n)]
    nums = [complex(to_mpc(v)) for v in params.values()]
    ends = _kernels.newton_critical_points(nums, starts)
    pts = []
    for e in ends:
        if not all(abs(c) < 10 * box for c in e):
            continue
        cand = _refine(params, [complex(c) for c in e])
        snapped = _exact_point(params, cand)
        cand = snapped if snapped is not None else cand
        if _accept(params, cand):
            pts.append(cand)
    return _sort_points(_dedupe(pts))


def _sort_points(pts: list) -> list:
    def key(p):
        return tuple(float(ctx.re(to_mpc(c))) for c in p) + tuple(float(ctx.im(to_mpc(c))) for c in p)

    return sorted(pts, key=key)


def singular_points(params: SurfaceParams, **kw) -> list[tuple]:
    """Singular points for any E != 0 (rescaled internally)."""
    p1, E = rescale_to_E1(params)
    return [tuple(c / E for c in p) for p in find_singular_points(p1, **kw)]


# classification -------------------------------------------------------------------

@dataclass
class SingularityReport:
    point: tuple
    hessian: list
    corank: int
    ade_type: str | None
    k: int | None = None
    evidence: dict = field(default_factory=dict)
    exact: bool = False

    def to_json(self) -> dict:
        def enc(v):
            return str(v) if isinstance(v, Fraction) else complex_pair(v, 30)

        return {
            "point": [enc(c) for c in self.point],
            "exact": self.exact,
            "hessian": [[enc(c) for c in row] for row in self.hessian],
            "hessian_corank": self.corank,
            "ade_type": self.ade_type,
            "k": self.k,
            "evidence": {k: (v if isinstance(v, (int, str, list, bool)) or v is None else str(v))
                         for k, v in self.evidence.items()},
        }


class _Field:
    """Arithmetic helpers for either exact rationals or working-precision complex numbers."""

    def __init__(self, exact: bool):
        self.exact = exact

    def conv(self, v):
        return Fraction(v) if self.exact else to_mpc(v)

    def is_zero(self, v, scale=1) -> bool:
        if self.exact:
            return v == 0
        return cabs(v) < ctx.ldexp(ctx.mpf(1), -(ctx.prec // 3)) * (1 + cabs(scale))


def _rank3(F: _Field, H: list) -> tuple[int, list]:
    """Rank of a 3x3 matrix and a basis of its kernel."""
    M = [list(r) for r in H]
    scale = max(cabs(to_mpc(c)) for r in M for c in r) if not F.exact else 1
    pivots = []
    row = 0
    for col in range(3):
        piv = None
        best = None
        for r in range(row, 3):
            if not F.is_zero(M[r][col], scale):
                mag = cabs(to_mpc(M[r][col])) if not F.exact else 1
                if best is None or mag > best:
                    piv, best = r, mag
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        for r in range(3):
            if r != row and not F.is_zero(M[r][col], scale):
                f = M[r][col] / M[row][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[row])]
        pivots.append(col)
        row += 1
    free = [c for c in range(3) if c not in pivots]
    kernel = []
    for fc in free:
        v = [F.conv(0)] * 3
        v[fc] = F.conv(1)
        for i, pc in enumerate(pivots):
            v[pc] = -M[i][fc] / M[i][pc]
        kernel.append(v)
    return len(pivots), kernel


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _matvec(H, v):
    return [_dot(r, v) for r in H]


def _series_mul(a: list, b: list, n: int) -> list:
    out = [0 * a[0]] * (n + 1)
    for i, u in enumerate(a):
        if i > n:
            break
        if u == 0:
            continue
        for j in range(min(len(b), n + 1 - i)):
            out[i + j] = out[i + j] + u * b[j]
    return out


def _splitting_series(F: _Field, H: list, E, kvec: list, n: int = SERIES_DEGREE) -> tuple[list, list]:
    """Residual g(W) after eliminating the two nondegenerate directions."""
    # complement of the kernel direction from standard basis vectors
    idx = max(range(3), key=lambda i: cabs(to_mpc(kvec[i])) if not F.exact else (kvec[i] != 0, -i))
    others = [i for i in range(3) if i != idx]
    e = []
    for i in others:
        v = [F.conv(0)] * 3
        v[i] = F.conv(1)
        e.append(v)
    cands = [e[0], e[1], [a + b for a, b in zip(e[0], e[1])]]
    b1 = max(cands, key=lambda v: cabs(to_mpc(_dot(v, _matvec(H, v)))))
    h1 = _dot(b1, _matvec(H, b1))
    other = e[1] if b1 is e[0] else e[0]
    b2 = [o - _dot(other, _matvec(H, b1)) / h1 * c for o, c in zip(other, b1)]
    h2 = _dot(b2, _matvec(H, b2))
    if F.is_zero(h1) or F.is_zero(h2):
        raise JetDegenerate("quadratic part degenerate on the chosen complement")
    zero = F.conv(0)

    def lin(X1, X2):
        W = [zero] * (n + 1)
        W[1] = F.conv(1)
        return [[X1[d] * b1[i] + X2[d] * b2[i] + W[d] * kvec[i] for d in range(n + 1)] for i in range(3)]

    X1 = [zero] * (n + 1)
    X2 = [zero] * (n + 1)
    for _ in range(n + 1):
        u = lin(X1, X2)
        uyz = _series_mul(u[1], u[2], n)
        uxz = _series_mul(u[0], u[2], n)
        uxy = _series_mul(u[0], u[1], n)
        d1 = [E * (b1[0] * a + b1[1] * b + b1[2] * c) for a, b, c in zip(uyz, uxz, uxy)]
        d2 = [E * (b2[0] * a + b2[1] * b + b2[2] * c) for a, b, c in zip(uyz, uxz, uxy)]
        X1 = [-v / h1 for v in d1]
        X2 = [-v / h2 for v in d2]
    u = lin(X1, X2)
    cubic = _series_mul(_series_mul(u[0], u[1], n), u[2], n)
    g = [h1 * a / 2 + h2 * b / 2 + E * c for a, b, c in
         zip(_series_mul(X1, X1, n), _series_mul(X2, X2, n), cubic)]
    return g, [b1, b2]


def _binary_cubic(E, k1, k2) -> list:
    """Coefficients (a, b, c, d) of E * l_x l_y l_z restricted to s*k1 + t*k2."""
    lx, ly, lz = ([k1[i], k2[i]] for i in range(3))
    prod = [lx[0] * ly[0], lx[0] * ly[1] + lx[1] * ly[0], lx[1] * ly[1]]
    cub = [prod[0] * lz[0], prod[0] * lz[1] + prod[1] * lz[0], prod[1] * lz[1] + prod[2] * lz[0], prod[2] * lz[1]]
    return [E * c for c in cub]


def cubic_discriminant(a, b, c, d):
    return b * b * c * c - 4 * a * c ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d + 18 * a * b * c * d


def hessian(params: SurfaceParams, pt) -> list:
    E = params.E
    x, y, z = pt
    return [[2, E * z, E * y], [E * z, 2, E * x], [E * y, E * x, 2]]


def classify(params: SurfaceParams, point: Sequence) -> SingularityReport:
    """ADE type of a singular point via Hessian corank and formal splitting."""
    exact = params.is_rational and all(isinstance(c, (int, Fraction)) for c in point)
    F = _Field(exact)
    pt = tuple(F.conv(c) for c in point)
    if exact:
        singular = all(v == 0 for v in _exact_N(params, pt)) and _exact_P(params, pt) == 0
    else:
        scale = 1 + sum(cabs(c) for c in pt) ** 3
        singular = (max(cabs(v) for v in params.N(*pt)) < _tol(scale) and cabs(params.P(*pt)) < _tol(scale))
    if not singular:
        raise NotSingular("point is not a singular point of the surface",
                          point=[str(c) if exact else complex_pair(c, 20) for c in pt])
    E = F.conv(params.E) if exact else to_mpc(params.E)
    H = [[F.conv(c) if exact else to_mpc(c) for c in row] for row in hessian(params, pt)]
    rank, kernel = _rank3(F, H)
    corank = 3 - rank
    evidence: dict = {}
    if corank == 0:
        return SingularityReport(pt, H, 0, "A1", 1, {"morse": True}, exact)
    if corank == 1:
        kvec = kernel[0]
        g, _ = _splitting_series(F, H, E, kvec)
        order = next((i for i, c in enumerate(g) if not F.is_zero(c)), None)
        evidence["kernel"] = [str(c) for c in kvec]
        evidence["residual_series"] = [str(c) for c in g]
        if order is None:
            raise JetDegenerate(f"residual series vanishes to degree {SERIES_DEGREE}",
                                kernel=[str(c) for c in kvec])
        k = order - 1
        evidence["residual_order"] = order
        evidence["residual_leading_coefficient"] = str(g[order])
        if k > 5:
            evidence["warning"] = f"A_{k} exceeds the expected bound k <= 5"
        return SingularityReport(pt, H, 1, f"A{k}", k, evidence, exact)
    k1, k2 = kernel
    a, b, c, d = _binary_cubic(E, k1, k2)
    disc = cubic_discriminant(a, b, c, d)
    evidence["kernel_plane"] = [[str(v) for v in k1], [str(v) for v in k2]]
    evidence["binary_cubic"] = [str(v) for v in (a, b, c, d)]
    evidence["discriminant"] = str(disc)
    if F.is_zero(disc, max(cabs(to_mpc(v)) for v in (a, b, c, d)) ** 4 if not exact else 1):
        raise JetDegenerate("3-jet on the kernel plane has a repeated linear factor",
                            binary_cubic=[str(v) for v in (a, b, c, d)])
    return SingularityReport(pt, H, 2, "D4", 4, evidence, exact)


def classify_surface(params: SurfaceParams, **kw) -> list[SingularityReport]:
    """Singular points (in the original coordinates) with their types."""
    return [classify(params, p) for p in singular_points(params, **kw)]


def d4_sign_sweep() -> list[dict]:
    """For A, B, C = +-8 and D in {-28, 36}: which surfaces carry a corank-2 point."""
    out = []
    for sa in (1, -1):
        for sb in (1, -1):
            for sc in (1, -1):
                for D in (-28, 36):
                    params = SurfaceParams(8 * sa, 8 * sb, 8 * sc, D, 1)
                    reports = []
                    for p in find_singular_points(params):
                        try:
                            reports.append(classify(params, p))
                        except JetDegenerate:
                            reports.append(None)
                    d4 = [r for r in reports if r is not None and r.corank == 2]
                    out.append({"signs": (sa, sb, sc), "D": D,
                                "negatives": [sa, sb, sc].count(-1),
                                "corank2": bool(d4),
                                "points": [tuple(str(c) for c in r.point) for r in d4],
                                "types": [r.ade_type if r else None for r in reports]})
    return out


# model germs ------------------------------------------------------------------------

@dataclass
class ModelGerm:
    kind: str
    k: int
    poly: Poly
    reducer: PowerReducer
    fields: dict

    @property
    def name(self) -> str:
        return f"{self.kind}{self.k}"

    def gradient(self) -> tuple[Poly, Poly, Poly]:
        return self.poly.gradient()

    def reduce(self, p: Poly) -> Poly:
        return self.reducer(p)

    def reduce_field(self, V: SymbolicField) -> SymbolicField:
        return V.map(self.reducer)

    def normal_component(self, V: SymbolicField) -> Poly:
        return self.reducer(sum_polys(g * c for g, c in zip(self.gradient(), V.coeffs)))

    def is_tangential(self, V: SymbolicField) -> bool:
        return self.normal_component(V).is_zero()

    def hamiltonian_fields(self) -> tuple:
        return (self.fields["Vx"], self.fields["Vy"], self.fields["Vz"])

    def extra_fields(self) -> list[tuple[str, SymbolicField]]:
        """The complement: z^i Lambda (A) or x^i Lambda and K (D)."""
        L = self.fields["Lambda"]
        if self.kind == "A":
            return [(f"z^{i}*Lambda", L * (Z ** i)) for i in range(self.k)]
        out = [(f"x^{i}*Lambda", L * (X ** i)) for i in range(self.k - 1)]
        out.append(("K", self.fields["K"]))
        return out

    def relations(self) -> list[tuple[str, SymbolicField, SymbolicField]]:
        """Module relations between the named fields (lhs, rhs), to hold modulo the ideal."""
        F = self.fields
        Vx, Vy, Vz, L = F["Vx"], F["Vy"], F["Vz"], F["Lambda"]
        k = self.k
        h = Fraction(1, 2)
        if self.kind == "A":
            return [
                ("x*Lambda", L * X, Vy * Z - Vz * Y.scale(Fraction(k + 1, 2))),
                ("y*Lambda", L * Y, Vz * X.scale(Fraction(k + 1, 2)) - Vx * Z),
                ("z^k*Lambda", L * Z ** k, Vx * Y - Vy * X),
            ]
        K = F["K"]
        return [
            ("z*Lambda", L * Z, -(Vy * X) + Vx * Y.scale(Fraction(k - 2, 2))),
            ("y*Lambda", L * Y, Vz + K * (k - 1)),
            ("x*y*Lambda", L * (X * Y), Vz * X - Vx * Z.scale(Fraction(k - 1, 2))),
            ("x^(k-1)*Lambda", L * X ** (k - 1), L * (-(X * Y * Y) - Z * Z)),
            ("x*K", K * X, Vx * Z.scale(-h)),
            ("y*K", K * Y, Vy * Z - Vz * Y - L * X ** (k - 2)),
        ]

    def check_relations(self) -> dict[str, bool]:
        return {name: self.reduce_field(lhs - rhs).is_zero() for name, lhs, rhs in self.relations()}


@lru_cache(maxsize=None)
def model_fields(kind: str, k: int | None = None) -> ModelGerm:
    """Model surface and its named tangent fields; ``kind`` is 'A' or 'D' (or e.g. 'A3')."""
    if k is None:
        kind, k = kind[0], int(kind[1:])
    kind = kind.upper()
    if kind == "A":
        if k < 1:
            raise InvalidInput("A_k needs k >= 1", input=k)
        f = X * X + Y * Y + Z ** (k + 1)
        red = PowerReducer("x", 2, -(Y * Y) - Z ** (k + 1))
        c = Z.__pow__(k).scale(k + 1)
        fields = {
            "Vx": SymbolicField(ZERO, c, Y.scale(-2)),
            "Vy": SymbolicField(-c, ZERO, X.scale(2)),
            "Vz": SymbolicField(Y.scale(2), X.scale(-2), ZERO),
            "Lambda": SymbolicField(X.scale(k + 1), Y.scale(k + 1), Z.scale(2)),
        }
    elif kind == "D":
        if k < 4:
            raise InvalidInput("D_k needs k >= 4", input=k)
        f = X * (Y * Y + X ** (k - 2)) + Z * Z
        red = PowerReducer("z", 2, -(X * Y * Y) - X ** (k - 1))
        q = Y * Y + (X ** (k - 2)).scale(k - 1)
        fields = {
            "Vx": SymbolicField(ZERO, Z.scale(2), (X * Y).scale(-2)),
            "Vy": SymbolicField(Z.scale(-2), ZERO, q),
            "Vz": SymbolicField((X * Y).scale(2), -q, ZERO),
            "Lambda": SymbolicField(X.scale(2), Y.scale(k - 2), Z.scale(k - 1)),
            "K": SymbolicField(ZERO, Y * Y + X ** (k - 2), Y * Z),
        }
    else:
        raise InvalidInput(f"unknown germ kind {kind!r}", input=kind)
    germ = ModelGerm(kind, k, f, red, fields)
    for name, V in fields.items():
        if not germ.is_tangential(V):
            raise AssertionError(f"model field {name} of {germ.name} is not tangential")
    return germ


# numeric pairings ----------------------------------------------------------------------

def _model_point(germ: ModelGerm, rng: random.Random) -> tuple:
    """A random smooth point of the model surface."""
    def rnd():
        return ctx.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))

    k = germ.k
    while True:
        if germ.kind == "A":
            y, z = rnd(), rnd()
            x = ctx.sqrt(-y * y - z ** (k + 1))
        else:
            x, y = rnd(), rnd()
            z = ctx.sqrt(-x * y * y - x ** (k - 1))
        g = [c.evaluate(x, y, z) for c in germ.gradient()]
        if min(cabs(c) for c in g) > 0.05:
            return (x, y, z)


def model_omega(germ: ModelGerm, pt, u, v):
    """omega = dx^dy/f_z = dy^dz/f_x = dz^dx/f_y on the model surface."""
    fx, fy, fz = (c.evaluate(*pt) for c in germ.gradient())
    charts = [(fz, u[0] * v[1] - u[1] * v[0]), (fx, u[1] * v[2] - u[2] * v[1]), (fy, u[2] * v[0] - u[0] * v[2])]
    den, num = max(charts, key=lambda c: cabs(c[0]))
    return num / den


def _chart_z(germ: ModelGerm, x, y, z0):
    z = z0
    fz_poly = germ.gradient()[2]
    for _ in range(200):
        dz = germ.poly.evaluate(x, y, z) / fz_poly.evaluate(x, y, z)
        z -= dz
        if cabs(dz) < ctx.ldexp(ctx.mpf(1), -ctx.prec + 4) * (1 + cabs(z)):
            break
    return z


def exterior_ratio(germ: ModelGerm, V: SymbolicField, pt, h) -> object:
    """(d i_V omega) / omega at pt, by central differences in the (x, y) chart."""
    x0, y0, z0 = pt
    h = to_mpc(h)
    fx_p, fy_p, fz_p = germ.gradient()

    def alpha(x, y):
        z = _chart_z(germ, x, y, z0)
        fx, fy, fz = fx_p.evaluate(x, y, z), fy_p.evaluate(x, y, z), fz_p.evaluate(x, y, z)
        Vv = V.evaluate(x, y, z)
        Tx = (1, 0, -fx / fz)
        Ty = (0, 1, -fy / fz)
        # omega(V, T) in the chart dx^dy/f_z
        ax = (Vv[0] * Tx[1] - Vv[1] * Tx[0]) / fz
        ay = (Vv[0] * Ty[1] - Vv[1] * Ty[0]) / fz
        return ax, ay

    day_dx = (alpha(x0 + h, y0)[1] - alpha(x0 - h, y0)[1]) / (2 * h)
    dax_dy = (alpha(x0, y0 + h)[0] - alpha(x0, y0 - h)[0]) / (2 * h)
    return (day_dx - dax_dy) * fz_p.evaluate(x0, y0, z0)


@dataclass
class PairingReport:
    germ: str
    max_pairing_error: object
    lambda_ratio: object
    lambda_ratio_error: object
    k_ratio_error: object | None
    samples: int

    def to_json(self) -> dict:
        def s(v):
            return None if v is None else ctx.nstr(v, 10)

        return {"germ": self.germ, "max_pairing_error": s(self.max_pairing_error),
                "lambda_ratio": complex_pair(self.lambda_ratio, 10),
                "lambda_ratio_error": s(self.lambda_ratio_error), "k_ratio_error": s(self.k_ratio_error),
                "samples": self.samples}


def lambda_weight(germ: ModelGerm) -> int:
    """The constant c with d i_Lambda omega = c * omega (weighted degree of omega)."""
    return 2 if germ.kind == "A" else 1


def germ_pairings(kind: str, k: int | None = None, samples: int = 5, seed: int = 0,
                  h=ctx.mpf("1e-12")) -> PairingReport:
    """Check i_V omega = -d(coordinate) and the non-closedness of i_Lambda omega, i_K omega."""
    germ = model_fields(kind, k)
    rng = random.Random(seed)
    worst = ctx.mpf(0)
    lam_err = ctx.mpf(0)
    k_err = ctx.mpf(0) if germ.kind == "D" else None
    lam_ratio = None
    Vs = germ.hamiltonian_fields()
    for _ in range(samples):
        pt = _model_point(germ, rng)
        grad = [c.evaluate(*pt) for c in germ.gradient()]
        r = [ctx.mpc(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(3)]
        W = (grad[1] * r[2] - grad[2] * r[1], grad[2] * r[0] - grad[0] * r[2], grad[0] * r[1] - grad[1] * r[0])
        for i, V in enumerate(Vs):
            val = model_omega(germ, pt, V.evaluate(*pt), W)
            worst = max(worst, cabs(val + W[i]) / (1 + cabs(W[i])))
        lam_ratio = exterior_ratio(germ, germ.fields["Lambda"], pt, h)
        lam_err = max(lam_err, cabs(lam_ratio - lambda_weight(germ)))
        if germ.kind == "D":
            kr = exterior_ratio(germ, germ.fields["K"], pt, h)
            k_err = max(k_err, cabs(kr - pt[1]))
    return PairingReport(germ.name, worst, lam_ratio, lam_err, k_err, samples)


# decomposition ------------------------------------------------------------------------

def _field_vec(germ: ModelGerm, V: SymbolicField) -> dict:
    out = {}
    for i, c in enumerate(germ.reduce_field(V).coeffs):
        for m, v in c.items():
            out[(i, m)] = v
    return out


def _col_order(key):
    i, m = key
    return (grlex_key(m), -i)


def _normal_monomials_for(germ: ModelGerm, degree: int) -> list:
    var = 0 if germ.kind == "A" else 2
    out = []
    for d in range(degree + 1):
        for i in range(d + 1):
            for j in range(d - i + 1):
                m = (i, j, d - i - j)
                if m[var] < 2:
                    out.append(m)
    return out


@lru_cache(maxsize=64)
def _decomposition_basis(kind: str, k: int, degree: int) -> EchelonBasis:
    germ = model_fields(kind, k)
    basis = EchelonBasis(order=_col_order)
    for name, V in germ.extra_fields():
        basis.insert(_field_vec(germ, V), ("extra", name))
    for m in _normal_monomials_for(germ, degree):
        mono = Poly.monomial(m)
        for a, V in zip(("x", "y", "z"), germ.hamiltonian_fields()):
            basis.insert(_field_vec(germ, V * mono), ("V", a, m))
    return basis


@dataclass
class Decomposition:
    germ: str
    f: tuple
    lambdas: list
    kappa: Fraction | None

    def recompose(self) -> SymbolicField:
        germ = model_fields(self.germ)
        out = SymbolicField()
        for fa, V in zip(self.f, germ.hamiltonian_fields()):
            out = out + V * fa
        L = germ.fields["Lambda"]
        base = Z if germ.kind == "A" else X
        for i, lam in enumerate(self.lambdas):
            if lam:
                out = out + L * (base ** i).scale(lam)
        if self.kappa:
            out = out + germ.fields["K"] * self.kappa
        return germ.reduce_field(out)

    def to_json(self) -> dict:
        return {"germ": self.germ, "f": [p.to_string() for p in self.f],
                "lambda": [str(v) for v in self.lambdas],
                "kappa": None if self.kappa is None else str(self.kappa)}


def decompose_tangent_field(kind: str, W: SymbolicField, k: int | None = None,
                            max_extra_degree: int = 8) -> Decomposition:
    """Write W = f^x V^x + f^y V^y + f^z V^z + sum lambda_i (base^i Lambda) (+ kappa K)."""
    germ = model_fields(kind, k)
    if not germ.is_tangential(W):
        raise NotTangential("field is not tangent to the model surface", field=W.to_json())
    target = _field_vec(germ, W)
    if not target:
        return _empty(germ)
    start = max(W.degree(), 0)
    for degree in range(start, start + max_extra_degree + 1):
        basis = _decomposition_basis(germ.kind, germ.k, degree)
        combo = basis.express(target)
        if combo is None:
            continue
        f = {"x": {}, "y": {}, "z": {}}
        nl = germ.k if germ.kind == "A" else germ.k - 1
        lambdas = [Fraction(0)] * nl
        kappa = Fraction(0) if germ.kind == "D" else None
        for tag, c in combo.items():
            if tag[0] == "V":
                f[tag[1]][tag[2]] = f[tag[1]].get(tag[2], 0) + c
            elif tag[1] == "K":
                kappa += c
            else:
                i = int(tag[1].split("^")[1].split("*")[0])
                lambdas[i] += c
        dec = Decomposition(germ.name, tuple(germ.reduce(Poly(f[a])) for a in "xyz"), lambdas, kappa)
        return dec
    raise DecompositionFailure(f"no decomposition found up to degree {start + max_extra_degree}",
                               field=W.to_json())


def _empty(germ: ModelGerm) -> Decomposition:
    nl = germ.k if germ.kind == "A" else germ.k - 1
    return Decomposition(germ.name, (ZERO, ZERO, ZERO), [Fraction(0)] * nl,
                         Fraction(0) if germ.kind == "D" else None)


def random_tangential_field(kind: str, k: int | None, rng: random.Random, degree: int = 2,
                            density: float = 0.5) -> SymbolicField:
    """Random polynomial combination of the named fields (tangent by construction)."""
    germ = model_fields(kind, k)

    def rpoly():
        terms = {}
        for d in range(degree + 1):
            for i in range(d + 1):
                for j in range(d - i + 1):
                    if rng.random() < density:
                        terms[(i, j, d - i - j)] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        return Poly(terms)

    W = SymbolicField()
    for V in germ.hamiltonian_fields():
        W = W + V * rpoly()
    for _, V in germ.extra_fields():
        W = W + V * Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return germ.reduce_field(W)


__all__ = [
    "ModelGerm", "SingularityReport", "classify", "classify_surface", "cubic_discriminant", "d4_sign_sweep",
    "decompose_tangent_field", "find_singular_points", "germ_pairings", "model_fields", "random_tangential_field",
    "rescale_to_E1", "resultant_in_z", "singular_points",
]
