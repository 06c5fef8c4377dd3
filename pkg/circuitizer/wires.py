"""
Построитель схем на проводах.

Wire — ссылка на гейт строящейся схемы; арифметика над проводами порождает гейты.
Константы кэшируются, но свёртки констант с проводами нет: структура схемы
не зависит от конкретных значений.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from circuit import (
    Circuit,
    CircuitError,
    Constant,
    Edge,
    Extension,
    GateLabel,
    Input,
    Output,
    Plus,
    Sign,
    Times,
)

logger = logging.getLogger(__name__)

Provenance = List[Tuple[int, int, str]]


class CompileError(CircuitError):
    """Конфигурацию нельзя скомпилировать в схему."""


@dataclass(frozen=True)
class Wire:
    idx: int
    builder: "CircuitBuilder" = field(compare=False, repr=False)

    # region arithmetic -----------------------------------------------------------
    def __add__(self, other: "Operand") -> "Wire":
        return self.builder.plus([self, other])

    def __radd__(self, other: "Operand") -> "Wire":
        return self.builder.plus([other, self])

    def __sub__(self, other: "Operand") -> "Wire":
        return self.builder.plus([self, self.builder.negate(other)])

    def __rsub__(self, other: "Operand") -> "Wire":
        return self.builder.plus([other, self.builder.negate(self)])

    def __mul__(self, other: "Operand") -> "Wire":
        return self.builder.times([self, other])

    def __rmul__(self, other: "Operand") -> "Wire":
        return self.builder.times([other, self])

    def __neg__(self) -> "Wire":
        return self.builder.negate(self)

    # endregion


Operand = Union[Wire, int, Fraction]


class CircuitBuilder:
    """Накопитель гейтов и рёбер; индексы выдаются подряд начиная с 1."""

    def __init__(self) -> None:
        self._labels: List[GateLabel] = []
        self._edges: List[Edge] = []
        self._consts: Dict[Fraction, Wire] = {}
        self._copies: Dict[int, List[Wire]] = defaultdict(list)
        self._sections: Provenance = []
        self._outputs = 0

    @property
    def size(self) -> int:
        return len(self._labels)

    def _emit(self, label: GateLabel, preds: Sequence[Wire] = ()) -> Wire:
        self._labels.append(label)
        idx = len(self._labels)
        self._edges += [Edge(src=w.idx, dst=idx, alpha=a) for a, w in enumerate(preds, 1)]
        return Wire(idx, self)

    def lift(self, value: Operand) -> Wire:
        if isinstance(value, Wire):
            if value.builder is not self:
                raise CompileError("wire belongs to a different circuit builder")
            return value
        if isinstance(value, Rational):
            return self.const(value)
        raise CompileError(f"cannot use {value!r} as a circuit operand")

    def _distinct(self, operands: Iterable[Operand]) -> List[Wire]:
        """Повторный предшественник заменяется копией (унарный плюс): кратных рёбер нет."""

        wires = [self.lift(x) for x in operands]
        seen: Counter = Counter()
        result: List[Wire] = []
        for w in wires:
            n = seen[w.idx]
            seen[w.idx] += 1
            if n == 0:
                result.append(w)
                continue
            copies = self._copies[w.idx]
            while len(copies) < n:
                copies.append(self._emit(Plus(), [w]))
            result.append(copies[n - 1])
        return result

    # region gates ----------------------------------------------------------------
    def input(self, k: int) -> Wire:
        return self._emit(Input(k))

    def const(self, value) -> Wire:
        value = Fraction(value)
        if value not in self._consts:
            self._consts[value] = self._emit(Constant(value))
        return self._consts[value]

    def plus(self, operands: Sequence[Operand]) -> Wire:
        if not operands:
            return self.const(0)
        return self._emit(Plus(), self._distinct(operands))

    def times(self, operands: Sequence[Operand]) -> Wire:
        if not operands:
            return self.const(1)
        return self._emit(Times(), self._distinct(operands))

    def negate(self, value: Operand) -> Wire:
        if not isinstance(value, Wire):
            return self.const(-Fraction(value))
        return self.times([self.const(-1), value])

    def sign(self, value: Operand) -> Wire:
        return self._emit(Sign(), [self.lift(value)])

    def ext(self, name: str, operands: Sequence[Operand]) -> Wire:
        return self._emit(Extension(name, len(operands)), self._distinct(operands))

    def output(self, value: Operand) -> Wire:
        self._outputs += 1
        return self._emit(Output(self._outputs), [self.lift(value)])

    # endregion

    @contextmanager
    def section(self, label: str) -> Iterator[None]:
        """Запоминает диапазон гейтов, созданных внутри блока."""

        first = self.size + 1
        yield
        if self.size >= first:
            self._sections.append((first, self.size, label))

    @property
    def provenance(self) -> Provenance:
        return list(self._sections)

    def finish(self, declared_class: Optional[str] = None) -> Circuit:
        """
        Готовая схема. Класс по умолчанию — semi_unbounded, если все × бинарные,
        иначе unbounded.
        """

        if declared_class is None:
            times_fan_in = Counter(e.dst for e in self._edges if isinstance(self._labels[e.dst - 1], Times))
            binary = all(times_fan_in[i + 1] == 2 for i, label in enumerate(self._labels) if isinstance(label, Times))
            declared_class = "semi_unbounded" if binary else "unbounded"
        c = Circuit(
            gates=tuple((i, label) for i, label in enumerate(self._labels, 1)),
            edges=tuple(sorted(self._edges, key=lambda e: (e.dst, e.alpha))),
            declared_class=declared_class,
        )
        logger.debug("Схема собрана: %d гейтов, класс %s", c.size, c.declared_class)
        return c


class GateArith:
    """Арифметический бэкенд над проводами: те же формулы, что и у ExactArith, порождают гейты."""

    def __init__(self, builder: CircuitBuilder) -> None:
        self.builder = builder

    def const(self, value) -> Wire:
        return self.builder.const(value)

    def sign(self, x: Operand) -> Wire:
        return self.builder.sign(x)

    def total(self, xs: Iterable[Operand]) -> Wire:
        return self.builder.plus(list(xs))

    def product(self, xs: Iterable[Operand]) -> Wire:
        return self.builder.times(list(xs))

    def ext(self, name: str, args: Sequence[Operand]) -> Wire:
        if name == "sign":
            return self.builder.sign(args[0])
        return self.builder.ext(name, list(args))
