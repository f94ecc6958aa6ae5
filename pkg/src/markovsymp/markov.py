"""Markov triples x^2 + y^2 + z^2 = 3xyz: tree walk, spectrum values, growth fit."""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass

from . import _kernels
from .core.numeric import ctx
from .errors import InvalidInput, NotMarkovNumber


@dataclass(frozen=True, order=True)
class MarkovTriple:
    x: int
    y: int
    z: int

    def __post_init__(self):
        if not (0 < self.x <= self.y <= self.z):
            raise InvalidInput("a Markov triple must be positive and sorted", input=[self.x, self.y, self.z])
        if self.x * self.x + self.y * self.y + self.z * self.z != 3 * self.x * self.y * self.z:
            raise InvalidInput("not a solution of x^2+y^2+z^2 = 3xyz", input=[self.x, self.y, self.z])

    @classmethod
    def of(cls, a: int, b: int, c: int) -> "MarkovTriple":
        return cls(*sorted((int(a), int(b), int(c))))

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.x, self.y, self.z)

    def key(self) -> tuple[int, int, int]:
        return (self.z, self.y, self.x)


ROOT = MarkovTriple(1, 1, 1)


def vieta_moves(t: MarkovTriple) -> tuple[MarkovTriple, MarkovTriple, MarkovTriple]:
    """Replace one coordinate by 3 * (product of the others) - itself, then re-sort."""
    x, y, z = t.as_tuple()
    return (MarkovTriple.of(3 * y * z - x, y, z),
            MarkovTriple.of(x, 3 * x * z - y, z),
            MarkovTriple.of(x, y, 3 * x * y - z))


def enumerate_ordered(bound: int) -> list[MarkovTriple]:
    """All ordered triples with largest entry <= bound, sorted by (z, y, x)."""
    if bound < 1:
        raise InvalidInput("bound must be at least 1", input=bound)
    seen = {ROOT}
    queue = deque([ROOT])
    while queue:
        t = queue.popleft()
        for c in vieta_moves(t):
            if c.z <= bound and c not in seen:
                seen.add(c)
                queue.append(c)
    return sorted(seen, key=MarkovTriple.key)


def brute_force(bound: int, use_numba: bool | None = None) -> list[MarkovTriple]:
    """Independent enumeration by testing the discriminant of the quadratic in z."""
    return [MarkovTriple(*t) for t in _kernels.markov_scan(bound, use_numba)]


def uniqueness_scan(bound: int) -> dict[int, list[MarkovTriple]]:
    """Markov numbers <= bound that are the maximum of more than one ordered triple."""
    triples = enumerate_ordered(bound)
    counts = Counter(t.z for t in triples)
    return {z: [t for t in triples if t.z == z] for z, c in counts.items() if c > 1}


def markov_numbers_upto(bound: int) -> list[int]:
    return sorted({t.z for t in enumerate_ordered(bound)})


def first_markov_numbers(n: int) -> list[int]:
    """The n smallest Markov numbers, in increasing order."""
    bound = 16
    while True:
        nums = markov_numbers_upto(bound)
        if len(nums) >= n:
            return nums[:n]
        bound *= 4


def is_markov_number(z: int) -> bool:
    return z >= 1 and any(t.z == z for t in enumerate_ordered(z))


def lagrange_value(z: int):
    """sqrt(9 z^2 - 4) / z for a Markov number z."""
    if isinstance(z, bool) or not isinstance(z, int) or not is_markov_number(z):
        raise NotMarkovNumber(f"{z!r} is not a Markov number", input=str(z))
    return ctx.sqrt(ctx.mpf(9 * z * z - 4)) / z


@dataclass
class ZagierFit:
    C: float
    window: tuple[int, int]
    residuals: list[float]
    numbers: list[int]

    def to_json(self) -> dict:
        return {"C": repr(self.C), "window": list(self.window),
                "residuals": [repr(r) for r in self.residuals]}


def zagier_fit(n: int, window: tuple[int, int] | None = None) -> ZagierFit:
    """Least-squares slope of log(3 m_k) against sqrt(k), k in the window (1-based, inclusive).

    The fit has no intercept: the model is log(3 m_k) = C sqrt(k) + o(1).
    """
    if n < 10:
        raise InvalidInput("need at least 10 Markov numbers", input=n)
    lo, hi = window if window is not None else (1, n)
    if not (1 <= lo < hi <= n):
        raise InvalidInput("window must satisfy 1 <= lo < hi <= n", input=[lo, hi])
    nums = first_markov_numbers(n)
    ks = range(lo, hi + 1)
    xs = [math.sqrt(k) for k in ks]
    ys = [math.log(3 * nums[k - 1]) for k in ks]
    C = sum(a * b for a, b in zip(xs, ys)) / sum(a * a for a in xs)
    residuals = [b - C * a for a, b in zip(xs, ys)]
    return ZagierFit(C, (lo, hi), residuals, nums)
