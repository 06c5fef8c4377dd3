"""
Арифметический бэкенд для формул.

Одни и те же формулы (внимание, активации, гаджеты) выполняются либо над точными
рациональными числами (ExactArith), либо над проводами схемы (circuitizer.wires.GateArith).
Бинарные +, −, × идут через операторы значений; n-арные суммы/произведения,
sign и внешние функции — через методы бэкенда.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache, reduce
from typing import Any, Callable, Iterable, Optional, Sequence, Union

from .lagrange import LagrangeTable
from .rational import lean_rational

ExtCall = Callable[[str, Sequence[Fraction]], Fraction]
Exact = Union[int, Fraction]


class ExactArith:
    """
    Бэкенд над точными числами.

    Целые значения держатся как int, нецелые как Fraction; сравнения и равенства
    у них общие, поэтому результат формулы тот же, что над одними Fraction.
    """

    def __init__(self, ext_call: Optional[ExtCall] = None) -> None:
        self._ext_call = ext_call

    def const(self, value) -> Exact:
        return lean_rational(Fraction(value))

    def sign(self, x: Exact) -> int:
        return 1 if x > 0 else (-1 if x < 0 else 0)

    def total(self, xs: Iterable[Exact]) -> Exact:
        return lean_rational(sum(xs, 0))

    def product(self, xs: Iterable[Exact]) -> Exact:
        return lean_rational(reduce(lambda a, b: a * b, xs, 1))

    def ext(self, name: str, args: Sequence[Exact]) -> Exact:
        if name == "sign":
            return self.sign(args[0])
        if self._ext_call is None:
            raise KeyError(f"no extension function available for {name!r}")
        return lean_rational(Fraction(self._ext_call(name, [Fraction(a) for a in args])))


def zero_via(ops: Any, x: Any) -> Any:
    """zero(x) = 1 − sign(x·x)."""
    return 1 - ops.sign(x * x)


def lagrange_via(ops: Any, table: LagrangeTable, x: Any) -> Any:
    """∏ (x − b)·(a − b)⁻¹ цепочкой бинарных умножений."""

    result = ops.const(1)
    for b, inverse in table.denominators:
        result = result * ((x - lean_rational(b)) * lean_rational(inverse))
    return result


def charfin_via(ops: Any, target, x: Any, mode: str = "zero", support: Sequence = ()) -> Any:
    """
    χ_target(x) в одной из двух реализаций.

    Args:
        mode: "zero" — zero(x + (−1)·target); "lagrange" — многочлен по носителю support
        support: конечное множество A (нужно только для "lagrange")
    """

    if mode == "lagrange":
        table = _cached_table(tuple(Fraction(b) for b in support), Fraction(target))
        return lagrange_via(ops, table, x)
    return zero_via(ops, x + (-1) * lean_rational(Fraction(target)))


@lru_cache(maxsize=256)
def _cached_table(support: tuple, target: Fraction) -> LagrangeTable:
    return LagrangeTable.build(support, target)
