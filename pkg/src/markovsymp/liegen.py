"""Degree-capped Poisson-Lie closure of {1, x^k, y^k, z^k} with exact certificates.

The span is grown by a worklist that brackets every newly inserted element
against the generators (optionally against every element) and keeps results of
total degree at most ``max_deg``.  A saturation pass then looks for linear
combinations of span elements whose bracket with a generator drops under the
cap even though the individual brackets do not.  The result is the least
subspace S containing the seeds with {s, g} in S whenever s in S and
deg {s, g} <= max_deg, which does not depend on the processing order.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .core.echelon import EchelonBasis
from .core.poly import ONE, X, Y, Z, Poly, grlex_key, normal_monomials, parse_poly, sum_polys
from .core.reduce import poly_reduce
from .errors import IdentityMismatch
from .poisson import bracket
from .surface import SurfaceParams


# derivation nodes: ("gen", label) | ("bracket", left_id, right_id) | ("comb", {id: coeff}, right_id)
Node = tuple


@dataclass
class SpanBasis:
    params: SurfaceParams
    max_gen_deg: int
    max_deg: int
    echelon: EchelonBasis
    elements: list[Poly]
    nodes: list[Node]
    generators: list[int]
    rounds: int = 0

    @property
    def rank(self) -> int:
        return self.echelon.rank

    @property
    def dimension(self) -> int:
        return len(normal_monomials(self.max_deg))

    def is_full(self) -> bool:
        return self.rank == self.dimension

    def rows(self) -> list[Poly]:
        """Reduced echelon rows, leading monomial descending."""
        return [Poly(r) for r in self.echelon.rows()]

    def contains(self, p: Poly) -> bool:
        return self.echelon.contains(dict(p.items()))

    def span_key(self) -> tuple:
        """Canonical description of the span: its reduced echelon form."""
        rows = []
        for r in self.rows():
            lead = r.coeff(r.leading_monomial())
            rows.append(r.scale(1 / lead).to_string())
        return tuple(rows)


@dataclass
class Certificate:
    target: Poly
    combination: dict[int, Fraction]
    nodes: dict[int, Node]
    params: SurfaceParams
    generator_polys: dict[int, Poly] = field(default_factory=dict)

    def replay(self) -> Poly:
        """Recompute every node from the generators and return the combination."""
        memo: dict[int, Poly] = {}

        def value(i: int) -> Poly:
            if i in memo:
                return memo[i]
            node = self.nodes[i]
            if node[0] == "gen":
                v = poly_reduce(parse_poly(node[1]), self.params)
            elif node[0] == "bracket":
                v = bracket(value(node[1]), value(node[2]), self.params)
            elif node[0] == "comb":
                left = sum_polys(value(j).scale(c) for j, c in node[1].items())
                v = bracket(left, value(node[2]), self.params)
            else:
                raise ValueError(f"unknown derivation node {node!r}")
            memo[i] = v
            return v

        return sum_polys(value(i).scale(c) for i, c in self.combination.items())

    def verify(self) -> bool:
        return self.replay() == self.target

    def depth(self) -> int:
        memo: dict[int, int] = {}

        def d(i: int) -> int:
            if i not in memo:
                node = self.nodes[i]
                if node[0] == "gen":
                    memo[i] = 0
                elif node[0] == "bracket":
                    memo[i] = 1 + max(d(node[1]), d(node[2]))
                else:
                    memo[i] = 1 + max([d(node[2])] + [d(j) for j in node[1]])
            return memo[i]

        return max((d(i) for i in self.combination), default=0)

    def to_json(self) -> dict:
        def enc(node):
            if node[0] == "gen":
                return {"op": "gen", "poly": node[1]}
            if node[0] == "bracket":
                return {"op": "bracket", "left": node[1], "right": node[2]}
            return {"op": "comb_bracket", "left": {str(j): str(c) for j, c in node[1].items()},
                    "right": node[2]}

        return {
            "target": self.target.to_string(),
            "combination": {str(i): str(c) for i, c in sorted(self.combination.items())},
            "nodes": {str(i): enc(self.nodes[i]) for i in sorted(self.nodes)},
        }

    @classmethod
    def from_json(cls, data: dict, params: SurfaceParams) -> "Certificate":
        def dec(d):
            if d["op"] == "gen":
                return ("gen", d["poly"])
            if d["op"] == "bracket":
                return ("bracket", int(d["left"]), int(d["right"]))
            return ("comb", {int(j): Fraction(c) for j, c in d["left"].items()}, int(d["right"]))

        return cls(
            target=parse_poly(data["target"]),
            combination={int(i): Fraction(c) for i, c in data["combination"].items()},
            nodes={int(i): dec(n) for i, n in data["nodes"].items()},
            params=params,
        )


@dataclass(frozen=True)
class NotInSpan:
    target: Poly

    def __bool__(self) -> bool:
        return False


def seed_generators(params: SurfaceParams, max_gen_deg: int, max_deg: int) -> list[tuple[str, Poly]]:
    """Normal forms of 1, x^k, y^k, z^k (k <= max_gen_deg) that fit under the cap."""
    seeds = [("1", ONE)]
    for k in range(1, max_gen_deg + 1):
        for name, v in (("x", X), ("y", Y), ("z", Z)):
            p = poly_reduce(v ** k, params)
            if p.degree() <= max_deg:
                seeds.append((f"{name}^{k}", p))
    return seeds


class _Closure:
    def __init__(self, params: SurfaceParams, max_gen_deg: int, max_deg: int, full_pairing: bool):
        self.params = params
        self.max_deg = max_deg
        self.full_pairing = full_pairing
        self.echelon = EchelonBasis(order=grlex_key)
        self.elements: list[Poly] = []
        self.nodes: list[Node] = []
        self.generators: list[int] = []
        self.queue: deque[int] = deque()
        self.seeds = seed_generators(params, max_gen_deg, max_deg)

    def add(self, p: Poly, node: Node) -> int | None:
        if p.degree() > self.max_deg or p.is_zero():
            return None
        idx = len(self.elements)
        if not self.echelon.insert(dict(p.items()), idx):
            return None
        self.elements.append(p)
        self.nodes.append(node)
        self.queue.append(idx)
        return idx

    def seed(self) -> None:
        for label, p in self.seeds:
            idx = self.add(p, ("gen", label))
            if idx is not None:
                self.generators.append(idx)
        # generators already span themselves; their mutual brackets come from the worklist

    def partners(self, i: int) -> list[int]:
        if self.full_pairing:
            return list(range(len(self.elements)))
        return list(self.generators)

    def run_worklist(self, order_rng: random.Random | None = None) -> bool:
        grew = False
        while self.queue:
            if order_rng is not None and len(self.queue) > 1:
                items = list(self.queue)
                order_rng.shuffle(items)
                self.queue = deque(items)
            i = self.queue.popleft()
            for g in self.partners(i):
                if g == i:
                    continue
                b = bracket(self.elements[i], self.elements[g], self.params)
                if self.add(b, ("bracket", i, g)) is not None:
                    grew = True
        return grew

    def saturate(self) -> bool:
        """Insert brackets of combinations whose over-cap parts cancel."""
        grew = False
        n = len(self.elements)
        partners = range(n) if self.full_pairing else list(self.generators)
        for g in partners:
            images = [bracket(self.elements[i], self.elements[g], self.params) for i in range(n)]
            over = [{m: c for m, c in p.items() if sum(m) > self.max_deg} for p in images]
            if not any(over):
                continue
            # kernel of the over-cap part: vectors c with sum c_i over_i = 0
            kern = _kernel(over)
            for combo in kern:
                img = sum_polys(images[i].scale(c) for i, c in combo.items())
                if self.add(img, ("comb", combo, g)) is not None:
                    grew = True
        return grew


def _kernel(vectors: list[dict]) -> list[dict[int, Fraction]]:
    """Basis of {c : sum_i c_i v_i = 0} as sparse dicts index -> coefficient."""
    basis = EchelonBasis(order=grlex_key)
    relations = []
    for i, v in enumerate(vectors):
        residual, combo = basis.reduce(v)
        if residual:
            basis.insert(v, i)
        else:
            rel = {t: -c for t, c in combo.items()}
            rel[i] = rel.get(i, 0) + 1
            relations.append({t: Fraction(c) for t, c in rel.items() if c})
    return relations


def close_span(params: SurfaceParams, max_gen_deg: int, max_deg: int, full_pairing: bool = False,
               shuffle_seed: int | None = None, saturate: bool = True) -> SpanBasis:
    """Degree-capped closure of the generators under the Poisson bracket."""
    if not (max_deg >= max_gen_deg >= 1):
        raise ValueError("need max_deg >= max_gen_deg >= 1")
    if not params.is_rational:
        raise ValueError("closure needs rational parameters")
    rng = random.Random(shuffle_seed) if shuffle_seed is not None else None
    cl = _Closure(params, max_gen_deg, max_deg, full_pairing)
    cl.seed()
    rounds = 0
    while True:
        rounds += 1
        cl.run_worklist(rng)
        if not saturate or not cl.saturate():
            break
    return SpanBasis(params, max_gen_deg, max_deg, cl.echelon, cl.elements, cl.nodes, cl.generators, rounds)


def close_one_round(params: SurfaceParams, max_gen_deg: int, max_deg: int) -> SpanBasis:
    """Seeds plus their pairwise generator brackets, without iterating."""
    cl = _Closure(params, max_gen_deg, max_deg, False)
    cl.seed()
    first = list(cl.queue)
    cl.queue.clear()
    for i in first:
        for g in cl.generators:
            if g != i:
                cl.add(bracket(cl.elements[i], cl.elements[g], params), ("bracket", i, g))
    return SpanBasis(params, max_gen_deg, max_deg, cl.echelon, cl.elements, cl.nodes, cl.generators, 1)


def certify_monomial(basis: SpanBasis, monomial: Poly | str | tuple) -> Certificate | NotInSpan:
    """A replayable derivation of ``monomial`` from the generators, or NotInSpan."""
    if isinstance(monomial, str):
        target = parse_poly(monomial)
    elif isinstance(monomial, tuple):
        target = Poly.monomial(monomial)
    else:
        target = monomial
    target = poly_reduce(target, basis.params)
    combo = basis.echelon.express(dict(target.items()))
    if combo is None:
        return NotInSpan(target)
    needed: dict[int, Node] = {}
    stack = list(combo)
    while stack:
        i = stack.pop()
        if i in needed:
            continue
        node = basis.nodes[i]
        needed[i] = node
        if node[0] == "bracket":
            stack.extend(node[1:])
        elif node[0] == "comb":
            stack.extend(node[1])
            stack.append(node[2])
    return Certificate(target, dict(combo), needed, basis.params)


def certify_all(basis: SpanBasis) -> dict[str, Certificate | NotInSpan]:
    out = {}
    for m in normal_monomials(basis.max_deg):
        p = Poly.monomial(m)
        out[p.to_string()] = certify_monomial(basis, p)
    return out


# identities behind the generation argument ------------------------------------

def _mono(i: int, j: int, k: int, c=1) -> Poly:
    return Poly.monomial((i, j, k), c)


def lemma_identities(params: SurfaceParams, k: int, m: int, p: int) -> list[tuple[str, Poly, Poly]]:
    """Named pairs (lhs, rhs) that must agree in normal form."""
    A, B, C, D, E = params.values()
    br = lambda f, g: bracket(f, g, params)  # noqa: E731
    xy, yz, zx = br(X, Y), br(Y, Z), br(Z, X)
    out: list[tuple[str, Poly, Poly]] = []

    # step 1: brackets of a coordinate with x^k y and its cyclic relatives
    out += [
        ("s1.x.xky", br(X, _mono(k, 1, 0)), _mono(k, 0, 1, 2) + _mono(k + 1, 1, 0, E) - _mono(k, 0, 0, C)),
        ("s1.y.ykz", br(Y, _mono(0, k, 1)), _mono(1, k, 0, 2) + _mono(0, k + 1, 1, E) - _mono(0, k, 0, A)),
        ("s1.z.zkx", br(Z, _mono(1, 0, k)), _mono(0, 1, k, 2) + _mono(1, 0, k + 1, E) - _mono(0, 0, k, B)),
        ("s1.x.xkz", br(X, _mono(k, 0, 1)), -_mono(k, 1, 0, 2) - _mono(k + 1, 0, 1, E) + _mono(k, 0, 0, B)),
        ("s1.y.ykx", br(Y, _mono(1, k, 0)), -_mono(0, k, 1, 2) - _mono(1, k + 1, 0, E) + _mono(0, k, 0, C)),
        ("s1.z.zky", br(Z, _mono(0, 1, k)), -_mono(1, 0, k, 2) - _mono(0, 1, k + 1, E) + _mono(0, 0, k, A)),
    ]

    # step 2: {x^(k-p) y, x^p z}
    lhs2 = br(_mono(k - p, 1, 0), _mono(p, 0, 1))
    leib2 = _mono(k, 0, 0) * yz - _mono(k - 1, 0, 1, p) * xy - _mono(k - 1, 1, 0, k - p) * zx
    exp2 = (-_mono(k - 1, 2, 0, 2 * (k - p)) - _mono(k - 1, 0, 2, 2 * p) - _mono(k, 1, 1, (k - 1) * E)
            + _mono(k + 1, 0, 0, 2) - _mono(k, 0, 0, A) + _mono(k - 1, 0, 1, C * p) + _mono(k - 1, 1, 0, B * (k - p)))
    out += [("s2.leibniz", lhs2, leib2), ("s2.expanded", lhs2, exp2)]

    known3 = _mono(k + 1, 0, 0, 2) - _mono(k, 0, 0, A) + _mono(k - 1, 1, 0, B * k)
    e3 = -_mono(k - 1, 2, 0, 2 * k) - _mono(k, 1, 1, (k - 1) * E)
    known4 = _mono(k + 1, 0, 0, 2) - _mono(k, 0, 0, A) + _mono(k - 1, 0, 1, C * k)
    e4 = -_mono(k - 1, 0, 2, 2 * k) - _mono(k, 1, 1, (k - 1) * E)
    out += [
        ("s2.eq3", br(_mono(k, 1, 0), Z) - known3, e3),
        ("s2.eq4", br(Y, _mono(k, 0, 1)) - known4, e4),
    ]
    rest5 = _mono(k - 1, 0, 0, 2 * k) * (-_mono(2, 0, 0) + _mono(1, 0, 0, A) + _mono(0, 1, 0, B) + _mono(0, 0, 1, C) + D)
    out.append(("s2.eq5", e3 - e4, -_mono(k - 1, 2, 0, 4 * k) - _mono(k, 1, 1, 2 * k * E) + rest5))

    # step 3: {x^(k-p) y^m, x^p z}
    lhs3 = br(_mono(k - p, m, 0), _mono(p, 0, 1))
    leib3 = (_mono(k, m - 1, 0, m) * yz - _mono(k - 1, m - 1, 1, p * m) * xy - _mono(k - 1, m, 0, k - p) * zx)
    exp3 = (_mono(k + 1, m - 1, 0, 2 * m) - _mono(k, m - 1, 0, A * m) + _mono(k - 1, m, 0, B * (k - p))
            - _mono(k - 1, m + 1, 0, 2 * (k - p)) + _mono(k, m, 1, (m - p * m - (k - p)) * E)
            - _mono(k - 1, m - 1, 2, 2 * p * m) + _mono(k - 1, m - 1, 1, C * p * m))
    out += [("s3.leibniz", lhs3, leib3), ("s3.expanded", lhs3, exp3)]

    known6 = _mono(k + 1, m - 1, 0, 2 * m) - _mono(k, m - 1, 0, A * m) + _mono(k - 1, m, 0, B * k)
    e6 = -_mono(k - 1, m + 1, 0, 2 * k) + _mono(k, m, 1, (m - k) * E)
    known7 = _mono(k + 1, m - 1, 0, 2 * m) - _mono(k, m - 1, 0, A * m) + _mono(k - 1, m - 1, 1, C * k * m)
    e7 = -_mono(k - 1, m - 1, 2, 2 * k * m) + _mono(k, m, 1, m * (1 - k) * E)
    out += [
        ("s3.eq6", br(_mono(k, m, 0), Z) - known6, e6),
        ("s3.eq7", br(_mono(0, m, 0), _mono(k, 0, 1)) - known7, e7),
    ]
    rest = lambda c: _mono(k - 1, m - 1, 0, c) * (  # noqa: E731
        -_mono(2, 0, 0) + _mono(1, 0, 0, A) + _mono(0, 1, 0, B) + _mono(0, 0, 1, C) + D)
    comb8 = e6.scale(Fraction(1 - k, 2 * k)) - e7.scale(Fraction(m - k, 2 * k * m))
    e8 = -_mono(k - 1, m + 1, 0, 1 + m - 2 * k) - _mono(k, m, 1, (m - k) * E)
    out += [
        ("s3.eq8.raw", comb8, -_mono(k - 1, m + 1, 0, 1 - k) + _mono(k - 1, m - 1, 2, m - k)),
        ("s3.eq8", comb8, e8 + rest(m - k)),
        ("s3.sum", e6 + e8, -_mono(k - 1, m + 1, 0, 1 + m)),
    ]
    if k == m:
        out.append(("s3.k_eq_m", e7, _mono(m - 1, m + 1, 0, 2 * m * m) + _mono(m, m, 1, m * (1 + m) * E) + rest(-2 * m * m)))
    return out


def verify_lemma_identities(params: SurfaceParams, k: int, m: int, p: int) -> dict[str, bool]:
    """Check every identity for the given indices; raises IdentityMismatch on the first failure."""
    if not (k >= 1 and m >= 1 and 0 <= p <= k):
        raise ValueError("need k >= 1, m >= 1 and 0 <= p <= k")
    report = {}
    for name, lhs, rhs in lemma_identities(params, k, m, p):
        diff = poly_reduce(lhs - rhs, params)
        if not diff.is_zero():
            raise IdentityMismatch(f"identity {name} fails for k={k}, m={m}, p={p}",
                                   difference=diff.to_string())
        report[name] = True
    return report


def dimension_count(max_deg: int) -> int:
    """#{x^a y^b : a+b <= d} + #{x^a y^b z : a+b+1 <= d}."""
    return (max_deg + 1) * (max_deg + 2) // 2 + max_deg * (max_deg + 1) // 2


def monomials_in_span(basis: SpanBasis, monomials: Iterable[Poly]) -> list[bool]:
    return [basis.contains(poly_reduce(p, basis.params)) for p in monomials]
