"""Fraction-free reduced row echelon basis over the rationals.

Rows are sparse integer vectors keyed by arbitrary hashable column labels.
Each row also records which inserted vectors (identified by *tags*) it is a
rational combination of, so a successful membership test comes with an exact
witness in terms of the original inputs.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Callable, Hashable, Mapping

Vec = Mapping[Hashable, Fraction]


def _integerize(vec: Mapping[Hashable, object]) -> tuple[dict, int]:
    """Scale a rational vector to a primitive integer one; returns (ints, scale)."""
    den = 1
    for c in vec.values():
        c = Fraction(c)
        den = den * c.denominator // gcd(den, c.denominator)
    ints = {k: int(Fraction(c) * den) for k, c in vec.items() if c}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    if g > 1:
        ints = {k: v // g for k, v in ints.items()}
    return ints, Fraction(den, g or 1)


class EchelonBasis:
    """Reduced echelon basis; the pivot of a row is its largest column under ``order``."""

    def __init__(self, order: Callable[[Hashable], object] | None = None):
        self._order = order or (lambda k: k)
        self._rows: dict[Hashable, tuple[dict, dict]] = {}  # pivot -> (vec, combo)

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def pivots(self) -> list:
        return sorted(self._rows, key=self._order, reverse=True)

    def rows(self) -> list[dict]:
        return [dict(self._rows[p][0]) for p in self.pivots()]

    def _pivot(self, vec: Mapping) -> Hashable:
        return max(vec, key=self._order)

    def reduce(self, vec: Mapping[Hashable, object]) -> tuple[dict, dict]:
        """Return ``(residual, combo)`` with ``vec - residual = sum combo[t] * input[t]``.

        The residual has no entries in pivot columns.
        """
        res = {k: Fraction(c) for k, c in vec.items() if c}
        combo: dict[Hashable, Fraction] = {}
        for p in [p for p in res if p in self._rows]:
            c = res.get(p)
            if not c:
                continue
            row, rcombo = self._rows[p]
            f = c / row[p]
            for k, v in row.items():
                s = res.get(k, 0) - f * v
                if s:
                    res[k] = s
                else:
                    res.pop(k, None)
            for t, v in rcombo.items():
                s = combo.get(t, 0) + f * v
                if s:
                    combo[t] = s
                else:
                    combo.pop(t, None)
        return res, combo

    def contains(self, vec: Mapping[Hashable, object]) -> bool:
        return not self.reduce(vec)[0]

    def insert(self, vec: Mapping[Hashable, object], tag: Hashable) -> bool:
        """Add ``vec`` (labelled ``tag``); returns False if it was already in the span."""
        residual, combo = self.reduce(vec)
        if not residual:
            return False
        # residual = vec - sum combo * inputs  =>  residual = 1*tag - combo
        full_combo = {t: -v for t, v in combo.items()}
        full_combo[tag] = full_combo.get(tag, 0) + 1
        ints, scale = _integerize(residual)
        new_combo = {t: v * scale for t, v in full_combo.items() if v}
        p = self._pivot(ints)
        pv = ints[p]
        # keep the basis reduced: clear column p from existing rows
        for q, (row, rcombo) in list(self._rows.items()):
            c = row.get(p)
            if not c:
                continue
            g = gcd(pv, c)
            a, b = pv // g, c // g
            nrow = {}
            for k in set(row) | set(ints):
                s = a * row.get(k, 0) - b * ints.get(k, 0)
                if s:
                    nrow[k] = s
            ncombo = {}
            for t in set(rcombo) | set(new_combo):
                s = a * rcombo.get(t, 0) - b * new_combo.get(t, 0)
                if s:
                    ncombo[t] = s
            nrow, sc = _integerize(nrow)
            ncombo = {t: v * sc for t, v in ncombo.items()}
            self._rows[q] = (nrow, ncombo)
        self._rows[p] = (ints, new_combo)
        return True

    def express(self, vec: Mapping[Hashable, object]) -> dict | None:
        """Coefficients over input tags reproducing ``vec`` exactly, or None if outside the span."""
        residual, combo = self.reduce(vec)
        return None if residual else combo
