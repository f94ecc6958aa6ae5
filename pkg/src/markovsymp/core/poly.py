"""Exact polynomials in x, y, z with rational coefficients.

A :class:`Poly` is an immutable sparse map from exponent triples ``(i, j, k)``
to nonzero :class:`fractions.Fraction` coefficients.  Reduction modulo a
hypersurface ideal is done by :class:`PowerReducer`, which rewrites one
variable power ``v**n`` by a replacement of lower ``v``-degree.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping

Monomial = tuple[int, int, int]
VARS = ("x", "y", "z")
_VAR_INDEX = {name: i for i, name in enumerate(VARS)}


def grlex_key(m: Monomial) -> tuple[int, int, int, int]:
    """Sort key for graded lexicographic order with x > y > z."""
    return (m[0] + m[1] + m[2], m[0], m[1], m[2])


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"Poly coefficients must be exact rationals, got {type(c).__name__}")


class Poly:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | Iterable[tuple[Monomial, object]] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for mono, c in items:
                if len(mono) != 3 or min(mono) < 0:
                    raise ValueError(f"bad monomial {mono!r}")
                c = _as_fraction(c)
                if c:
                    mono = (int(mono[0]), int(mono[1]), int(mono[2]))
                    s = clean.get(mono, 0) + c
                    if s:
                        clean[mono] = s
                    else:
                        clean.pop(mono, None)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[Monomial, Fraction]) -> "Poly":
        # terms already clean (no zeros); ownership transferred
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    # constructors -------------------------------------------------------

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(0, 0, 0): c})

    @classmethod
    def var(cls, name: str) -> "Poly":
        e = [0, 0, 0]
        e[_VAR_INDEX[name]] = 1
        return cls({tuple(e): 1})

    @classmethod
    def monomial(cls, mono: Monomial, c=1) -> "Poly":
        return cls({tuple(mono): c})

    # basic protocol -----------------------------------------------------

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return self._terms

    def items(self):
        return self._terms.items()

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coeff(self, mono: Monomial) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({(0, 0, 0): Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({self.to_string()!r})"

    def __str__(self) -> str:
        return self.to_string()

    # arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly.const(_as_fraction(other))

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def scale(self, c) -> "Poly":
        c = _as_fraction(c)
        if not c:
            return Poly._raw({})
        return Poly._raw({m: c * v for m, v in self._terms.items()})

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        if len(other._terms) == 1 and len(self._terms) > 1:
            return other * self
        out: dict[Monomial, Fraction] = {}
        get = out.get
        for (a0, a1, a2), ca in self._terms.items():
            for (b0, b1, b2), cb in other._terms.items():
                m = (a0 + b0, a1 + b1, a2 + b2)
                out[m] = get(m, 0) + ca * cb
        return Poly._raw({m: c for m, c in out.items() if c})

    def __rmul__(self, other) -> "Poly":
        return self.scale(other)

    def __truediv__(self, other) -> "Poly":
        if isinstance(other, Poly):
            raise TypeError("polynomial division is not supported")
        return self.scale(1 / _as_fraction(other))

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def mul_monomial(self, mono: Monomial, c=1) -> "Poly":
        c = _as_fraction(c)
        if not c:
            return Poly._raw({})
        i, j, k = mono
        return Poly._raw({(a + i, b + j, d + k): c * v for (a, b, d), v in self._terms.items()})

    # structure ----------------------------------------------------------

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def degree_in(self, var: str) -> int:
        i = _VAR_INDEX[var]
        return max((m[i] for m in self._terms), default=-1)

    def variables(self) -> set[str]:
        return {VARS[i] for m in self._terms for i in range(3) if m[i]}

    def leading_monomial(self) -> Monomial:
        if not self._terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self._terms, key=grlex_key)

    def truncate(self, max_degree: int) -> "Poly":
        return Poly._raw({m: c for m, c in self._terms.items() if sum(m) <= max_degree})

    def diff(self, var: str) -> "Poly":
        i = _VAR_INDEX[var]
        out = {}
        for m, c in self._terms.items():
            e = m[i]
            if e:
                mm = list(m)
                mm[i] = e - 1
                out[tuple(mm)] = c * e
        return Poly._raw(out)

    def gradient(self) -> tuple["Poly", "Poly", "Poly"]:
        return self.diff("x"), self.diff("y"), self.diff("z")

    def compose(self, px: "Poly", py: "Poly", pz: "Poly") -> "Poly":
        """Substitute polynomials for x, y, z."""
        cache: dict[tuple[int, int], Poly] = {}

        def power(idx: int, e: int, base: Poly) -> Poly:
            key = (idx, e)
            if key not in cache:
                cache[key] = base ** e
            return cache[key]

        out = Poly()
        for (i, j, k), c in self._terms.items():
            out = out + (power(0, i, px) * power(1, j, py) * power(2, k, pz)).scale(c)
        return out

    def permute(self, perm: tuple[int, int, int]) -> "Poly":
        """Rename variables: variable ``i`` becomes variable ``perm[i]``."""
        out = {}
        for m, c in self._terms.items():
            mm = [0, 0, 0]
            for i in range(3):
                mm[perm[i]] = m[i]
            out[tuple(mm)] = c
        return Poly._raw(out)

    # evaluation ---------------------------------------------------------

    def __call__(self, x, y, z):
        return self.evaluate(x, y, z)

    def evaluate(self, x, y, z):
        """Nested Horner evaluation; works for any ring-like values."""
        if not self._terms:
            return 0 * x
        # group as sum_k z^k sum_j y^j p_jk(x)
        nested: dict[int, dict[int, dict[int, Fraction]]] = {}
        for (i, j, k), c in self._terms.items():
            nested.setdefault(k, {}).setdefault(j, {})[i] = c
        zero = 0 * x

        def horner(coeffs: Mapping[int, object], t, leaf):
            top = max(coeffs)
            acc = zero
            for e in range(top, -1, -1):
                acc = acc * t
                if e in coeffs:
                    acc = acc + leaf(coeffs[e])
            return acc

        def in_x(cs):
            return horner(cs, x, lambda c: _lift(c, x))

        def in_y(cs):
            return horner(cs, y, in_x)

        return horner(nested, z, in_y)

    # text ---------------------------------------------------------------

    def to_string(self) -> str:
        """Canonical text: grlex ascending, terms ``c*x^i*y^j*z^k``."""
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=grlex_key):
            c = self._terms[m]
            mag = _coeff_str(abs(c))
            factors = "".join(f"*{VARS[i]}^{m[i]}" for i in range(3) if m[i])
            term = mag + factors
            if not parts:
                parts.append(("-" if c < 0 else "") + term)
            else:
                parts.append(("-" if c < 0 else "+") + term)
        return "".join(parts)

    @classmethod
    def parse(cls, text: str) -> "Poly":
        return parse_poly(text)


def _lift(c: Fraction, like):
    # mpmath numbers do not mix with Fraction; convert through the numerator
    if isinstance(like, (int, Fraction)):
        return c
    if c.denominator == 1:
        return c.numerator + 0 * like
    return (c.numerator + 0 * like) / c.denominator


def _coeff_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


X = Poly.var("x")
Y = Poly.var("y")
Z = Poly.var("z")
ONE = Poly.const(1)
ZERO = Poly()


# parsing ---------------------------------------------------------------------

class PolySyntaxError(ValueError):
    pass


def parse_poly(text: str) -> Poly:
    """Parse expressions such as ``"3*x^2*y - 1/2*z + 7"``.

    Accepts ``^`` or ``**`` for powers, ``+ - * /`` with rational constants and
    parentheses.  Division is only allowed by constants.
    """
    src = text.replace("^", "**").strip()
    if not src:
        raise PolySyntaxError("empty polynomial")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise PolySyntaxError(f"cannot parse polynomial {text!r}") from exc
    return _walk(tree.body, text)


def _walk(node, text: str) -> Poly:
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return Poly.const(node.value)
    if isinstance(node, ast.Name):
        if node.id not in _VAR_INDEX:
            raise PolySyntaxError(f"unknown variable {node.id!r} in {text!r}")
        return Poly.var(node.id)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _walk(node.operand, text)
        return -inner if isinstance(node.op, ast.USub) else inner
    if isinstance(node, ast.BinOp):
        left = _walk(node.left, text)
        if isinstance(node.op, ast.Pow):
            exp = _walk(node.right, text)
            if exp.variables() or (exp and exp.coeff((0, 0, 0)).denominator != 1) or (exp and exp.coeff((0, 0, 0)) < 0):
                raise PolySyntaxError(f"exponent must be a non-negative integer in {text!r}")
            return left ** int(exp.coeff((0, 0, 0)))
        right = _walk(node.right, text)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if right.variables() or right.is_zero():
                raise PolySyntaxError(f"division only by nonzero constants in {text!r}")
            return left / right.coeff((0, 0, 0))
    raise PolySyntaxError(f"unsupported syntax in {text!r}")


# reduction -------------------------------------------------------------------

class PowerReducer:
    """Normal forms modulo an ideal generated by ``v**n - replacement``.

    ``replacement`` must have ``v``-degree below ``n``.  Powers ``v**e`` are
    reduced once and memoized; every other monomial factor is carried along.
    """

    def __init__(self, var: str, power: int, replacement: Poly):
        if replacement.degree_in(var) >= power:
            raise ValueError("replacement must have lower degree in the rewritten variable")
        self.var = var
        self.index = _VAR_INDEX[var]
        self.power = power
        self.replacement = replacement
        unit = [0, 0, 0]
        unit[self.index] = 1
        self._unit = tuple(unit)
        self._powers: list[Poly] = [Poly.monomial(tuple(0 if i != self.index else e for i in range(3)))
                                    for e in range(power)]

    def _vpower(self, e: int) -> Poly:
        while len(self._powers) <= e:
            prev = self._powers[-1]
            shifted = prev.mul_monomial(self._unit)
            top = {m: c for m, c in shifted.items() if m[self.index] >= self.power}
            rest = Poly._raw({m: c for m, c in shifted.items() if m[self.index] < self.power})
            if top:
                lowered = {}
                for m, c in top.items():
                    mm = list(m)
                    mm[self.index] -= self.power
                    lowered[tuple(mm)] = c
                rest = rest + Poly._raw(lowered) * self.replacement
            self._powers.append(rest)
        return self._powers[e]

    def __call__(self, p: Poly) -> Poly:
        if p.degree_in(self.var) < self.power:
            return p
        keep: dict[Monomial, Fraction] = {}
        groups: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in p.items():
            e = m[self.index]
            if e < self.power:
                keep[m] = c
            else:
                mm = list(m)
                mm[self.index] = 0
                groups.setdefault(e, {})[tuple(mm)] = c
        result = Poly._raw(keep)
        for e, cofactor in groups.items():
            result = result + Poly._raw(cofactor) * self._vpower(e)
        return result

    def is_normal(self, p: Poly) -> bool:
        return p.degree_in(self.var) < self.power


def normal_monomials(max_degree: int, var: str = "z", power: int = 2) -> list[Monomial]:
    """All monomials of total degree <= max_degree with ``var``-exponent < power."""
    idx = _VAR_INDEX[var]
    out = []
    for d in range(max_degree + 1):
        for i in range(d + 1):
            for j in range(d - i + 1):
                m = (i, j, d - i - j)
                if m[idx] < power:
                    out.append(m)
    return sorted(out, key=grlex_key)


def sum_polys(polys: Iterable[Poly]) -> Poly:
    acc: dict[Monomial, Fraction] = {}
    for p in polys:
        for m, c in p.items():
            acc[m] = acc.get(m, 0) + c
    return Poly._raw({m: c for m, c in acc.items() if c})


def map_coefficients(p: Poly, fn: Callable[[Fraction], Fraction]) -> Poly:
    return Poly({m: fn(c) for m, c in p.items()})
