"""
Интерполяционные многочлены Лагранжа для характеристических функций конечных множеств.

fpoly_A^a(x) = ∏_{b ∈ A \\ {a}} (x − b)·(a − b)⁻¹ совпадает с χ_A^a на A.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Tuple

from .rational import all_distinct, to_rational


class LagrangeError(Exception):
    """Некорректная опорная таблица (повторы или цель вне носителя)."""


@dataclass(frozen=True)
class LagrangeTable:
    support: Tuple[Fraction, ...]
    target: Fraction
    # пары (b, (a − b)⁻¹) для b ∈ A \ {a}
    denominators: Tuple[Tuple[Fraction, Fraction], ...]

    @classmethod
    def build(cls, support: Iterable, target) -> "LagrangeTable":
        points = tuple(to_rational(b) for b in support)
        a = to_rational(target)
        if not all_distinct(points):
            raise LagrangeError(f"support points must be pairwise distinct: {points}")
        if a not in points:
            raise LagrangeError(f"target {a} is not in the support")
        denominators = tuple((b, 1 / (a - b)) for b in points if b != a)
        return cls(support=points, target=a, denominators=denominators)


def lagrange_eval(table: LagrangeTable, x) -> Fraction:
    result = Fraction(1)
    value = to_rational(x)
    for b, inverse in table.denominators:
        result *= (value - b) * inverse
    return result
