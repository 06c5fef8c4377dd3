"""
Модель арифметической схемы C = (V, E, α, β).

Гейты нумеруются 1..|V| без пропусков; α — номер входящего ребра у его приёмника.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Tuple, Union

CIRCUIT_CLASSES: Tuple[str, ...] = ("bounded", "semi_unbounded", "unbounded")

CLASS_ALIASES: Dict[str, str] = {
    "bounded": "bounded",
    "semi": "semi_unbounded",
    "semi_unbounded": "semi_unbounded",
    "unbounded": "unbounded",
}


class CircuitError(Exception):
    """Ошибка построения или обхода схемы."""


@dataclass(frozen=True)
class Constant:
    value: Fraction


@dataclass(frozen=True)
class Input:
    k: int


@dataclass(frozen=True)
class Output:
    k: int


@dataclass(frozen=True)
class Plus:
    pass


@dataclass(frozen=True)
class Times:
    pass


@dataclass(frozen=True)
class Sign:
    pass


@dataclass(frozen=True)
class Extension:
    name: str
    arity: int


GateLabel = Union[Constant, Input, Output, Plus, Times, Sign, Extension]


def label_kind(label: GateLabel) -> str:
    """Короткое имя типа гейта: const, input, output, plus, times, sign, ext."""

    if isinstance(label, Constant):
        return "const"
    if isinstance(label, Input):
        return "input"
    if isinstance(label, Output):
        return "output"
    if isinstance(label, Plus):
        return "plus"
    if isinstance(label, Times):
        return "times"
    if isinstance(label, Sign):
        return "sign"
    if isinstance(label, Extension):
        return "ext"
    raise CircuitError(f"unknown gate label: {label!r}")


def normalize_class(name: str) -> str:
    try:
        return CLASS_ALIASES[name]
    except KeyError as exc:
        raise CircuitError(f"unknown circuit class {name!r}") from exc


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    alpha: int


@dataclass(frozen=True)
class Circuit:
    gates: Tuple[Tuple[int, GateLabel], ...]
    edges: Tuple[Edge, ...]
    declared_class: str = "unbounded"

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "declared_class", normalize_class(self.declared_class))

    # region derived views -------------------------------------------------
    @cached_property
    def labels(self) -> Dict[int, GateLabel]:
        return dict(self.gates)

    @cached_property
    def predecessors(self) -> Dict[int, Tuple[int, ...]]:
        """Предшественники каждого гейта в порядке возрастания α."""

        incoming: Dict[int, List[Edge]] = defaultdict(list)
        for edge in self.edges:
            incoming[edge.dst].append(edge)
        return {
            idx: tuple(e.src for e in sorted(incoming.get(idx, []), key=lambda e: e.alpha))
            for idx, _ in self.gates
        }

    @cached_property
    def successors(self) -> Dict[int, Tuple[int, ...]]:
        outgoing: Dict[int, List[int]] = defaultdict(list)
        for edge in self.edges:
            outgoing[edge.src].append(edge.dst)
        return {idx: tuple(sorted(outgoing.get(idx, []))) for idx, _ in self.gates}

    @cached_property
    def input_gates(self) -> Tuple[int, ...]:
        """Индексы входных гейтов в порядке меток in_1, in_2, …"""

        found = [(label.k, idx) for idx, label in self.gates if isinstance(label, Input)]
        return tuple(idx for _, idx in sorted(found))

    @cached_property
    def output_gates(self) -> Tuple[int, ...]:
        """Индексы выходных гейтов по возрастанию индекса (= по возрастанию k)."""

        return tuple(sorted(idx for idx, label in self.gates if isinstance(label, Output)))

    @cached_property
    def topological_order(self) -> Tuple[int, ...]:
        indegree = {idx: 0 for idx, _ in self.gates}
        for edge in self.edges:
            if edge.dst in indegree and edge.src in indegree:
                indegree[edge.dst] += 1
        ready = sorted(idx for idx, deg in indegree.items() if deg == 0)
        order: List[int] = []
        while ready:
            idx = ready.pop()
            order.append(idx)
            for succ in self.successors.get(idx, ()):
                if succ not in indegree:
                    continue
                indegree[succ] -= 1
                if indegree[succ] == 0:
                    ready.append(succ)
        if len(order) != len(indegree):
            stuck = sorted(idx for idx, deg in indegree.items() if deg > 0)
            raise CircuitError(f"circuit has a cycle through gates {stuck}")
        return tuple(order)

    # endregion ------------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.gates)

    @property
    def num_inputs(self) -> int:
        return len(self.input_gates)

    @property
    def num_outputs(self) -> int:
        return len(self.output_gates)

    def fan_in(self, idx: int) -> int:
        return len(self.predecessors.get(idx, ()))

    def kind_of(self, idx: int) -> str:
        return label_kind(self.labels[idx])


@dataclass(frozen=True)
class CircuitMetrics:
    size: int
    depth: int
    fan_in_max_plus: int = 0
    fan_in_max_times: int = 0
    gate_counts: Dict[str, int] = field(default_factory=dict, compare=False)
