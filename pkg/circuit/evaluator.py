"""
Точное вычисление схемы над Q и метрики size/depth/fan-in.
"""

from __future__ import annotations

import logging
from collections import Counter
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from numerics import lean_rational, to_rational

from .extensions import DEFAULT_EXTENSIONS, ExtensionRegistry, UnknownExtensionError
from .model import (
    Circuit,
    CircuitError,
    CircuitMetrics,
    Constant,
    Extension,
    Input,
    Output,
    Plus,
    Sign,
    Times,
    label_kind,
)

logger = logging.getLogger(__name__)


class EvaluationError(CircuitError):
    """Схему нельзя вычислить на данном входе."""


_CONST, _INPUT, _COPY, _PLUS, _TIMES, _SIGN, _EXT = range(7)


class EvaluationPlan:
    """
    Схема, развёрнутая в прямолинейную программу.

    В программу попадает только конус выходов: гейты, от которых есть путь до out_k.
    Шаги идут в топологическом порядке, аргументы шага — номера предыдущих шагов.
    Целые значения считаются как int, нецелые как Fraction.
    """

    def __init__(self, num_inputs: int, steps: Sequence[tuple], outputs: Sequence[int], registry: ExtensionRegistry):
        self.num_inputs = num_inputs
        self.steps = tuple(steps)
        self.outputs = tuple(outputs)
        self.registry = registry

    def __len__(self) -> int:
        return len(self.steps)

    def run(self, u: Sequence) -> List[Union[int, Fraction]]:
        """Значения выходов в порядке out_k."""

        if len(u) != self.num_inputs:
            raise EvaluationError(f"circuit has {self.num_inputs} inputs, got {len(u)} values")
        inputs = [lean_rational(to_rational(x)) for x in u]
        values: List[Union[int, Fraction]] = []
        append = values.append
        for op, payload, preds in self.steps:
            if op == _PLUS:
                acc = 0
                for p in preds:
                    acc += values[p]
                append(lean_rational(acc))
            elif op == _TIMES:
                acc = 1
                for p in preds:
                    acc *= values[p]
                append(lean_rational(acc))
            elif op == _COPY:
                append(values[preds[0]])
            elif op == _SIGN:
                x = values[preds[0]]
                append(1 if x > 0 else (-1 if x < 0 else 0))
            elif op == _INPUT:
                append(inputs[payload])
            elif op == _CONST:
                append(payload)
            else:
                args = [Fraction(values[p]) for p in preds]
                try:
                    append(lean_rational(self.registry.call(payload, args)))
                except UnknownExtensionError as exc:
                    raise EvaluationError(str(exc)) from exc
        return [values[slot] for slot in self.outputs]


def _step(c: Circuit, idx: int, preds: Tuple[int, ...], registry: ExtensionRegistry) -> tuple:
    label = c.labels[idx]
    if isinstance(label, Constant):
        return (_CONST, lean_rational(Fraction(label.value)), preds)
    if isinstance(label, Input):
        return (_INPUT, label.k - 1, preds)
    if isinstance(label, Output):
        if len(preds) != 1:
            raise EvaluationError(f"output gate {idx} has fan-in {len(preds)}")
        return (_COPY, None, preds)
    if isinstance(label, Plus):
        return (_PLUS, None, preds)
    if isinstance(label, Times):
        return (_TIMES, None, preds)
    if isinstance(label, Sign):
        if len(preds) != 1:
            raise EvaluationError(f"sign gate {idx} has fan-in {len(preds)}")
        return (_SIGN, None, preds)
    if isinstance(label, Extension):
        if label.name not in registry:
            raise EvaluationError(f"extension {label.name!r} is not registered")
        return (_EXT, label.name, preds)
    raise EvaluationError(f"gate {idx} has unknown label {label!r}")


def compile_plan(c: Circuit, registry: Optional[ExtensionRegistry] = None) -> EvaluationPlan:
    """Прямолинейная программа по конусу выходов схемы."""

    registry = registry or DEFAULT_EXTENSIONS
    try:
        order = c.topological_order
    except CircuitError as exc:
        raise EvaluationError(str(exc)) from exc

    needed = set(c.output_gates)
    stack = list(needed)
    while stack:
        for p in c.predecessors[stack.pop()]:
            if p not in needed:
                needed.add(p)
                stack.append(p)

    slots: Dict[int, int] = {}
    steps = []
    for idx in order:
        if idx not in needed:
            continue
        preds = tuple(slots[p] for p in c.predecessors[idx])
        slots[idx] = len(steps)
        steps.append(_step(c, idx, preds, registry))
    outputs = [slots[idx] for _, idx in sorted((c.labels[idx].k, idx) for idx in c.output_gates)]
    return EvaluationPlan(c.num_inputs, steps, outputs, registry)


def evaluate(c: Circuit, u: Sequence, registry: Optional[ExtensionRegistry] = None) -> Tuple[Fraction, ...]:
    """
    Вычисляет (f_{C,out_1}(u), …, f_{C,out_n}(u)).

    Выходы упорядочены по метке out_k.
    """

    return tuple(Fraction(v) for v in compile_plan(c, registry).run(u))


def evaluate_many(
    c: Circuit, inputs: Iterable[Sequence], registry: Optional[ExtensionRegistry] = None
) -> List[Tuple[Fraction, ...]]:
    """evaluate на серии входов; программа строится один раз."""

    plan = compile_plan(c, registry)
    return [tuple(Fraction(v) for v in plan.run(u)) for u in inputs]


def gate_depths(c: Circuit) -> Dict[int, int]:
    """Длина самого длинного пути от источника до каждого гейта (в рёбрах)."""

    depths: Dict[int, int] = {}
    for idx in c.topological_order:
        preds = c.predecessors[idx]
        depths[idx] = 1 + max(depths[p] for p in preds) if preds else 0
    return depths


def metrics(c: Circuit) -> CircuitMetrics:
    if c.size == 0:
        return CircuitMetrics(size=0, depth=0)
    depths = gate_depths(c)
    outputs = c.output_gates
    depth = max(depths[idx] for idx in outputs) if outputs else max(depths.values())

    plus_fan_in = [c.fan_in(idx) for idx, label in c.gates if isinstance(label, Plus)]
    times_fan_in = [c.fan_in(idx) for idx, label in c.gates if isinstance(label, Times)]
    counts = Counter(label_kind(label) for _, label in c.gates)
    result = CircuitMetrics(
        size=c.size,
        depth=depth,
        fan_in_max_plus=max(plus_fan_in, default=0),
        fan_in_max_times=max(times_fan_in, default=0),
        gate_counts=dict(sorted(counts.items())),
    )
    logger.debug("Метрики схемы: size=%d depth=%d", result.size, result.depth)
    return result
