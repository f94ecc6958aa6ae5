"""Interpolating injective maps of ordered Markov triples by symplectic automorphisms.

The automorphism has the shape F = G^-1 o phi^x_{h(x)} o phi^y_{g(y)} o G with
G = phi^z_{f(z)}.  Along each axis flow the two moving coordinates trace

    v(t) = kappa + alpha cos(gamma t) + beta sin(gamma t),

so asking for v(t) = u is a quadratic in T = exp(i gamma t).  The time
functions f, g, h are Lagrange interpolants through the finitely many nodes
that occur.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .core.numeric import cabs, complex_pair, ctx, precision, to_mpc
from .errors import (ExcludedZ, InvalidInput, NoSolution, RetryExhausted, RootSelectionFailure, SurfaceDrift,
                     VerificationFailure)
from .flows import AXES, Automorphism, InterpTime, ShearFlow, check_symplectic, flow_axis
from .markov import MarkovTriple, enumerate_ordered
from .surface import SurfaceParams

MAX_PREC = 4096
RESIDUAL_TOL = 1e-15

# local frame (a, b, c) per axis: c is fixed, a and b move
_LOCAL = {"z": (0, 1, 2), "x": (1, 2, 0), "y": (2, 0, 1)}


def _gamma(params: SurfaceParams, c):
    E = to_mpc(params.E)
    return ctx.sqrt(4 - E * E * c * c)


def _excluded(params: SurfaceParams, c, margin=0) -> bool:
    c = to_mpc(c)
    lim = ctx.ldexp(ctx.mpf(1), -(ctx.prec // 2)) + margin
    return cabs(c) <= lim or cabs(_gamma(params, c)) <= lim


# sign conditions ----------------------------------------------------------------

def sign_conditions(x, y, z) -> dict:
    """The non-vanishing conditions at a point of the Markov surface, fixed root gamma."""
    x, y, z = to_mpc(x), to_mpc(y), to_mpc(z)
    g2 = 4 - 9 * z * z
    tiny = ctx.ldexp(ctx.mpf(1), -(ctx.prec // 2))
    if cabs(z) <= tiny or cabs(g2) <= tiny:
        raise ExcludedZ("z must avoid 0 and +-2/3", z=complex_pair(z, 20))
    gamma = ctx.sqrt(g2)
    X = (2 * x - 3 * y * z) / gamma
    Y = (2 * y - 3 * x * z) / gamma
    i = ctx.mpc(0, 1)
    vals = {
        "X+iy": X + i * y, "X-iy": X - i * y,
        "x+iY": x + i * Y, "x-iY": x - i * Y,
    }
    scale = 1 + cabs(x) + cabs(y) + cabs(X) + cabs(Y)
    tol = ctx.ldexp(scale, -(ctx.prec // 2))
    ok = {k: cabs(v) > tol for k, v in vals.items()}
    # third condition cross-multiplied: (ix - Y)(iy - X) != (X + iy)(ix + Y)
    lhs = (i * x - Y) * (i * y - X)
    rhs = (X + i * y) * (i * x + Y)
    ok["ratio"] = cabs(lhs - rhs) > tol * scale
    return {"gamma": gamma, "X": X, "Y": Y, "values": vals, "holds": all(ok.values()), "checks": ok}


# flow times ----------------------------------------------------------------------

def _trig_form(params: SurfaceParams, axis: str, pt, which: int):
    """kappa, alpha, beta, gamma with coordinate(t) = kappa + alpha cos(gamma t) + beta sin(gamma t)."""
    A, B, C, D, E = params.numeric()
    nums = {"z": (A, B, C), "x": (B, C, A), "y": (C, A, B)}[axis]
    ia, ib, ic = _LOCAL[axis]
    a, b, c = to_mpc(pt[ia]), to_mpc(pt[ib]), to_mpc(pt[ic])
    pa, pb, _ = nums
    gamma = _gamma(params, c)
    w = gamma * gamma
    Na = 2 * a + E * b * c - pa
    Nb = 2 * b + E * a * c - pb
    if which == 0:
        kappa = (2 * pa - pb * E * c) / w
        return kappa, a - kappa, Nb / gamma, gamma
    kappa = (2 * pb - pa * E * c) / w
    return kappa, b - kappa, -Na / gamma, gamma


def moving_coordinates(axis: str) -> tuple[str, str]:
    ia, ib, _ = _LOCAL[axis]
    return AXES[ia], AXES[ib]


def solve_flow_time(params: SurfaceParams, axis: str, pt, target, coordinate: str | None = None) -> list:
    """All principal-branch times t with coordinate(phi^axis_t(pt)) = target."""
    if axis not in _LOCAL:
        raise InvalidInput(f"axis must be one of x, y, z, got {axis!r}", input=axis)
    moving = moving_coordinates(axis)
    coordinate = coordinate or moving[0]
    if coordinate not in moving:
        raise InvalidInput(f"coordinate {coordinate!r} is fixed by the {axis}-flow", input=coordinate)
    fixed = to_mpc(pt[_LOCAL[axis][2]])
    if _excluded(params, fixed):
        raise ExcludedZ(f"fixed coordinate {axis} is in the excluded set", value=complex_pair(fixed, 20))
    kappa, alpha, beta, gamma = _trig_form(params, axis, pt, moving.index(coordinate))
    i = ctx.mpc(0, 1)
    u = to_mpc(target)
    qa = i * alpha + beta
    qb = -2 * i * (u - kappa)
    qc = i * alpha - beta
    scale = cabs(qa) + cabs(qb) + cabs(qc)
    tiny = ctx.ldexp(scale, -(ctx.prec // 2))
    if cabs(qa) <= tiny:
        roots = [] if cabs(qb) <= tiny else [-qc / qb]
    else:
        disc = ctx.sqrt(qb * qb - 4 * qa * qc)
        # the numerically stable pair of quadratic roots
        q = -(qb + disc) / 2 if cabs(qb + disc) >= cabs(qb - disc) else -(qb - disc) / 2
        roots = [q / qa, qc / q] if cabs(q) > tiny else [ctx.mpc(0), ctx.mpc(0)]
    roots = [T for T in roots if cabs(T) > tiny]
    if not roots:
        raise NoSolution("flow-time quadratic has no nonzero root", axis=axis, target=complex_pair(u, 20))
    times = []
    for T in roots:
        t = ctx.log(T) / (i * gamma)
        if all(cabs(t - s) > ctx.ldexp(1 + cabs(t), -(ctx.prec // 2)) for s in times):
            times.append(t)
    return times


# problem and solution ----------------------------------------------------------------

@dataclass
class TameProblem:
    """Send source j (1-based, ordered Markov triples by (z, y, x)) to triple eta[j]."""

    eta: dict
    n: int
    precision: int | None = None
    seed: int = 0
    retries: int = 12
    margin: float = 1e-3

    def __post_init__(self):
        self.eta = {int(k): int(v) for k, v in self.eta.items()}
        if self.n < 1:
            raise InvalidInput("need at least one source triple", input=self.n)
        if sorted(self.eta) != list(range(1, self.n + 1)):
            raise InvalidInput("eta must be defined exactly on 1..n", input={str(k): v for k, v in self.eta.items()})
        if len(set(self.eta.values())) != self.n or min(self.eta.values()) < 1:
            raise InvalidInput("eta must be injective into positive indices",
                               input={str(k): v for k, v in self.eta.items()})
        if self.precision is None:
            self.precision = max(512, 64 * self.n)
        if self.precision < 53:
            raise InvalidInput("precision must be at least 53 bits", input=self.precision)

    @property
    def params(self) -> SurfaceParams:
        return SurfaceParams.markov()

    @property
    def size(self) -> int:
        return max(self.n, max(self.eta.values()))

    def triples(self) -> list[MarkovTriple]:
        bound = 2
        while True:
            ts = enumerate_ordered(bound)
            if len(ts) >= self.size:
                return ts[: self.size]
            bound *= 4

    @classmethod
    def identity(cls, n: int, **kw) -> "TameProblem":
        return cls({j: j for j in range(1, n + 1)}, n, **kw)

    @classmethod
    def cyclic(cls, n: int, **kw) -> "TameProblem":
        return cls({j: j + 1 for j in range(1, n + 1)}, n, **kw)

    @classmethod
    def transposition(cls, n: int, a: int = 2, b: int = 3, **kw) -> "TameProblem":
        eta = {j: j for j in range(1, n + 1)}
        eta[a], eta[b] = b, a
        return cls(eta, n, **kw)

    @classmethod
    def parse_map(cls, text: str, n: int | None = None, **kw) -> "TameProblem":
        """From '1:2,2:3,...'; unspecified sources up to n are fixed."""
        eta = {}
        try:
            for part in filter(None, (p.strip() for p in text.split(","))):
                a, b = part.split(":")
                eta[int(a)] = int(b)
        except ValueError:
            raise InvalidInput("map must look like '1:2,2:3'", input=text) from None
        n = n or (max(eta) if eta else 0)
        for j in range(1, n + 1):
            eta.setdefault(j, j)
        return cls(eta, n, **kw)

    def to_json(self) -> dict:
        return {"n": self.n, "map": {str(k): v for k, v in sorted(self.eta.items())},
                "precision": self.precision, "seed": self.seed, "retries": self.retries,
                "margin": repr(self.margin)}


@dataclass
class TameSolution:
    problem: TameProblem
    triples: list
    f: InterpTime
    g: InterpTime
    h: InterpTime
    precision: int
    residuals: list = field(default_factory=list)
    step1: list = field(default_factory=list)

    @property
    def automorphism(self) -> Automorphism:
        G = ShearFlow("z", self.f)
        return Automorphism((G.inverse(), ShearFlow("x", self.h), ShearFlow("y", self.g), G))

    @property
    def max_residual(self):
        return max((r for row in self.residuals for r in row["relative"]), default=ctx.mpf(0))

    def to_json(self) -> dict:
        with precision(self.precision):
            return self._to_json()

    def _to_json(self) -> dict:
        digits = max(20, int(self.precision * 0.30103) + 2)
        return {
            "problem": self.problem.to_json(),
            "precision": self.precision,
            "triples": [list(t.as_tuple()) for t in self.triples],
            "f": self.f.to_json()["time_interp"],
            "g": self.g.to_json()["time_interp"],
            "h": self.h.to_json()["time_interp"],
            "coefficients": {name: [complex_pair(c, 30) for c in newton_to_monomial(fn)]
                             for name, fn in (("f", self.f), ("g", self.g), ("h", self.h))},
            "automorphism": self.automorphism.to_json(),
            "residuals": [{"source": r["source"], "target": r["target"],
                           "relative": [ctx.nstr(v, 6) for v in r["relative"]]} for r in self.residuals],
            "max_residual": ctx.nstr(self.max_residual, 6),
            "digits": digits,
        }

    @classmethod
    def from_json(cls, data: dict) -> "TameSolution":
        try:
            p = data["problem"]
            problem = TameProblem({int(k): int(v) for k, v in p["map"].items()}, int(p["n"]),
                                  precision=int(p["precision"]), seed=int(p["seed"]),
                                  retries=int(p.get("retries", 12)), margin=float(p.get("margin", 1e-3)))
            prec = int(data["precision"])
            with precision(prec):
                fns = [InterpTime(tuple(to_mpc(v) for v in data[k]["nodes"]),
                                  tuple(to_mpc(v) for v in data[k]["values"]), int(data[k].get("sign", 1)))
                       for k in ("f", "g", "h")]
            triples = [MarkovTriple(*t) for t in data["triples"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed tame solution: {exc}", input=str(exc)) from None
        return cls(problem, triples, *fns, prec)


def newton_to_monomial(fn: InterpTime) -> list:
    """Monomial coefficients (lowest first) of the interpolant, at the working precision."""
    nodes = [to_mpc(v) for v in fn.nodes]
    vals = [fn.sign * to_mpc(v) for v in fn.values]
    n = len(nodes)
    # divided differences, then expand the Newton form
    dd = list(vals)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - j])
    coeffs = [ctx.mpc(0)] * n
    for i in range(n - 1, -1, -1):
        # coeffs = coeffs * (v - nodes[i]) + dd[i]
        new = [ctx.mpc(0)] * n
        for k in range(n - 1):
            new[k + 1] += coeffs[k]
            new[k] -= coeffs[k] * nodes[i]
        new[0] += dd[i]
        coeffs = new
    return coeffs


# construction ---------------------------------------------------------------------------

def _step1(problem: TameProblem, triples: list, rng: random.Random) -> tuple[dict, list, list]:
    """Pick r per distinct z so that the images have separated, admissible x and y coordinates."""
    params = problem.params
    groups: dict[int, list[int]] = {}
    for idx, t in enumerate(triples):
        groups.setdefault(t.z, []).append(idx)
    images: list = [None] * len(triples)
    r_of: dict[int, object] = {}
    placed_x: list = []
    placed_y: list = []
    log = []
    for z in sorted(groups):
        members = groups[z]
        zc = ctx.mpf(z)
        gamma = _gamma(params, zc)
        M = max([cabs(v) for v in placed_x + placed_y] + [ctx.mpf(max(max(triples[i].as_tuple()) for i in members))])
        sigma = ctx.log(1 + M) + 1
        for attempt in range(problem.retries):
            tau = ctx.mpf(rng.random()) * 2 * ctx.pi
            r = (tau - ctx.mpc(0, 1) * sigma) / gamma
            cand = [flow_axis(params, "z", [ctx.mpf(c) for c in triples[i].as_tuple()], r).coords() for i in members]
            xs = [c[0] for c in cand]
            ys = [c[1] for c in cand]
            if _admissible(params, xs, placed_x, problem.margin) and _admissible(params, ys, placed_y, problem.margin) \
                    and all(sign_conditions(*c)["holds"] for c in cand):
                break
            sigma *= 2
        else:
            raise RetryExhausted(f"no admissible r for z = {z} after {problem.retries} tries", z=z)
        r_of[z] = r
        for i, c in zip(members, cand):
            images[i] = c
        placed_x += xs
        placed_y += ys
        log.append({"z": z, "attempts": attempt + 1, "sigma": ctx.nstr(sigma, 8)})
    return r_of, images, log


def _admissible(params: SurfaceParams, new: list, placed: list, margin: float) -> bool:
    pool = list(placed)
    for v in new:
        size = 1 + cabs(v)
        if _excluded(params, v, margin):
            return False
        if any(cabs(v - w) <= margin * (size + cabs(w)) for w in pool):
            return False
        pool.append(v)
    return True


def _pick_time(params: SurfaceParams, axis: str, pt, target: tuple, match: str, other: str | None) -> object:
    """Solve for coordinate `match`; among the roots keep one whose `other` coordinate also fits."""
    times = solve_flow_time(params, axis, pt, target[AXES.index(match)], match)
    best, err = None, None
    for t in times:
        img = flow_axis(params, axis, pt, t, check=False).coords()
        coords = [match] + ([other] if other else [])
        e = max(cabs(img[AXES.index(c)] - target[AXES.index(c)]) / (1 + cabs(target[AXES.index(c)])) for c in coords)
        if err is None or e < err:
            best, err = t, e
    if err is None or err > ctx.ldexp(ctx.mpf(1), -(ctx.prec // 3)):
        raise RootSelectionFailure(f"no root of the {axis}-flow quadratic matches the target",
                                   axis=axis, error=ctx.nstr(err, 5) if err is not None else None)
    return best


def _build_once(problem: TameProblem) -> TameSolution:
    params = problem.params
    triples = problem.triples()
    rng = random.Random(problem.seed)
    r_of, images, log = _step1(problem, triples, rng)
    zs = sorted(r_of)
    f = InterpTime(tuple(ctx.mpf(z) for z in zs), tuple(r_of[z] for z in zs))
    n = problem.n
    # step 2: x-coordinate along V^y
    gnodes, gvals, mid = [], [], []
    for j in range(1, n + 1):
        src, dst = images[j - 1], images[problem.eta[j] - 1]
        t = _pick_time(params, "y", src, dst, "x", None)
        gnodes.append(src[1])
        gvals.append(t)
    g = InterpTime(tuple(gnodes), tuple(gvals))
    for j in range(1, n + 1):
        src = images[j - 1]
        mid.append(flow_axis(params, "y", src, g(src[1])).coords())
    # step 3: (y, z) along V^x
    hnodes, hvals = [], []
    for j in range(1, n + 1):
        dst = images[problem.eta[j] - 1]
        s = _pick_time(params, "x", mid[j - 1], dst, "y", "z")
        hnodes.append(mid[j - 1][0])
        hvals.append(s)
    h = InterpTime(tuple(hnodes), tuple(hvals))
    sol = TameSolution(problem, triples, f, g, h, ctx.prec, step1=log)
    sol.residuals = residual_table(sol)
    return sol


def residual_table(sol: TameSolution) -> list[dict]:
    params = sol.problem.params
    F = sol.automorphism
    rows = []
    for j in range(1, sol.problem.n + 1):
        src = sol.triples[j - 1]
        dst = sol.triples[sol.problem.eta[j] - 1]
        img = F(params, [ctx.mpf(c) for c in src.as_tuple()], check=False).coords()
        rel = [cabs(a - b) / cabs(ctx.mpf(b)) for a, b in zip(img, dst.as_tuple())]
        rows.append({"source": list(src.as_tuple()), "target": list(dst.as_tuple()), "relative": rel})
    return rows


def build_tame_automorphism(problem: TameProblem, tol: float = RESIDUAL_TOL, max_prec: int = MAX_PREC) -> TameSolution:
    """Construct and verify F with F(p_j) = p_eta(j); precision doubles on failure up to max_prec."""
    prec = problem.precision
    last = None
    while prec <= max_prec:
        with precision(prec):
            try:
                sol = _build_once(problem)
                if sol.max_residual < tol:
                    return sol
                last = VerificationFailure(f"residual {ctx.nstr(sol.max_residual, 5)} above {tol}",
                                           residuals=sol.to_json()["residuals"], precision=prec)
            except (RootSelectionFailure, SurfaceDrift) as exc:
                last = exc
        prec *= 2
    raise last


def verify_solution(sol: TameSolution) -> list[dict]:
    with precision(sol.precision):
        return residual_table(sol)


def random_markov_points(count: int, seed: int = 0, radius: float = 1.0) -> list[tuple]:
    """Random smooth points of the Markov surface (z solved from random x, y)."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        x = ctx.mpc(rng.uniform(-radius, radius), rng.uniform(-radius, radius))
        y = ctx.mpc(rng.uniform(-radius, radius), rng.uniform(-radius, radius))
        # z^2 - 3xy z + x^2 + y^2 = 0
        s = 3 * x * y
        z = (s + ctx.sqrt(s * s - 4 * (x * x + y * y))) / 2
        pt = (x, y, z)
        if max(cabs(v) for v in SurfaceParams.markov().N(*pt)) > 0.1:
            out.append(pt)
    return out


def verify_symplectic_at_points(sol: TameSolution, samples: int | None = None, h=None, seed: int = 0,
                                points: list | None = None):
    """Largest finite-difference symplectic defect of F.

    By default the sample points are the source triples and h = 2^(-prec/4):
    F carries exponentially large factors from the z-shear, so |DF| is huge and
    only a step far below 1e-5 is inside the quadratic regime of the central
    differences.  Random points (``samples`` with ``seed``) are mostly useless
    for the same reason: the shear times there have enormous imaginary parts.
    """
    with precision(sol.precision):
        if points is None:
            if samples is None:
                points = [[ctx.mpf(c) for c in t.as_tuple()] for t in sol.triples[: sol.problem.n]]
            else:
                points = random_markov_points(samples, seed, radius=0.5)
        step = ctx.ldexp(ctx.mpf(1), -(sol.precision // 4)) if h is None else to_mpc(h)
        F = sol.automorphism
        return max(check_symplectic(SurfaceParams.markov(), F, p, step) for p in points)


def identity_solution(n: int = 1, seed: int = 0) -> TameSolution:
    return build_tame_automorphism(TameProblem.identity(n, seed=seed))

