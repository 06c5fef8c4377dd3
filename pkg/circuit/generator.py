"""
Генератор случайных корректных схем заданного класса (входные данные для тестов и fuzz).
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, Mapping, Optional, Tuple, Union

from .extensions import DEFAULT_EXTENSIONS, ExtensionRegistry
from .model import (
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
    normalize_class,
)
from .transforms import relabel, with_output_order

logger = logging.getLogger(__name__)


class InfeasibleSpecError(CircuitError):
    """Параметры генератора не допускают ни одной схемы."""


@dataclass(frozen=True)
class RandomCircuitSpec:
    circuit_class: str = "unbounded"
    max_depth: int = 3
    max_gates: int = 20
    extension_whitelist: Tuple[str, ...] = ()
    seed: int = 0
    max_inputs: int = 4
    max_outputs: int = 2
    max_fan_in: int = 4
    value_bound: int = 9

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "RandomCircuitSpec":
        data = dict(raw)
        if "class" in data:
            data["circuit_class"] = data.pop("class")
        if "extension_whitelist" in data:
            data["extension_whitelist"] = tuple(data["extension_whitelist"])
        return cls(**data)


def random_rational(rng: random.Random, bound: int = 9) -> Fraction:
    """Числитель и знаменатель из [−bound, bound] (знаменатель ненулевой)."""

    numerator = rng.randint(-bound, bound)
    denominator = rng.choice([d for d in range(-bound, bound + 1) if d != 0])
    return Fraction(numerator, denominator)


def _check_feasible(spec: RandomCircuitSpec, registry: ExtensionRegistry) -> None:
    if spec.max_depth < 1:
        raise InfeasibleSpecError(f"max_depth must be >= 1, got {spec.max_depth}")
    if spec.max_gates < 2:
        raise InfeasibleSpecError(f"max_gates must be >= 2, got {spec.max_gates}")
    if spec.max_inputs < 1 or spec.max_outputs < 1:
        raise InfeasibleSpecError("at least one input and one output are required")
    for name in spec.extension_whitelist:
        if name != "sign" and name not in registry:
            raise InfeasibleSpecError(f"extension {name!r} is not registered")


def _arithmetic_fan_in(rng: random.Random, circuit_class: str, kind: str, available: int, cap: int) -> int:
    """Fan-in по дисциплине класса; 0 если кандидатов не хватает."""

    if circuit_class == "bounded":
        return 2 if available >= 2 else 0
    if circuit_class == "semi_unbounded" and kind == "times":
        return 2 if available >= 2 else 0
    upper = min(cap, available)
    return rng.randint(1, upper) if upper >= 1 else 0


def random_circuit(
    spec: Union[RandomCircuitSpec, Mapping[str, Any]],
    registry: Optional[ExtensionRegistry] = None,
) -> Circuit:
    """
    Случайная корректная схема класса spec.circuit_class с глубиной ≤ max_depth.

    Детерминирована по seed. Индексы гейтов перемешаны, поэтому порядок номеров
    не совпадает с топологическим.
    """

    if not isinstance(spec, RandomCircuitSpec):
        spec = RandomCircuitSpec.from_dict(spec)
    registry = registry or DEFAULT_EXTENSIONS
    circuit_class = normalize_class(spec.circuit_class)
    _check_feasible(spec, registry)
    rng = random.Random(spec.seed)

    num_inputs = rng.randint(1, min(spec.max_inputs, spec.max_gates - 1))
    budget = spec.max_gates - num_inputs
    num_outputs = rng.randint(1, min(spec.max_outputs, budget))
    budget -= num_outputs
    num_consts = rng.randint(0, min(1, budget))
    budget -= num_consts
    num_internal = rng.randint(0, budget) if spec.max_depth > 1 else 0

    labels: List[GateLabel] = [Input(k) for k in range(1, num_inputs + 1)]
    labels += [Constant(random_rational(rng, spec.value_bound)) for _ in range(num_consts)]
    depth: List[int] = [0] * len(labels)
    edges: List[Edge] = []

    kinds = ["plus", "times"] + list(spec.extension_whitelist)
    for _ in range(num_internal):
        # внутренние гейты не глубже max_depth − 1: ребро в output добавляет ещё один слой
        pool = [i for i, d in enumerate(depth) if d <= spec.max_depth - 2]
        kind = rng.choice(kinds)
        if kind in ("plus", "times"):
            fan_in = _arithmetic_fan_in(rng, circuit_class, kind, len(pool), spec.max_fan_in)
            label: GateLabel = Plus() if kind == "plus" else Times()
        elif kind == "sign":
            fan_in, label = 1, Sign()
        else:
            arity = registry.arity(kind)
            fan_in, label = arity, Extension(kind, arity)
        if fan_in == 0 or fan_in > len(pool):
            continue
        preds = rng.sample(pool, fan_in)
        new = len(labels)
        labels.append(label)
        depth.append(1 + max(depth[p] for p in preds))
        edges += [Edge(src=p + 1, dst=new + 1, alpha=a) for a, p in enumerate(preds, 1)]

    # выходы предпочтительно берут самые глубокие гейты
    candidates = sorted(range(len(labels)), key=lambda i: (-depth[i], rng.random()))
    for k in range(1, num_outputs + 1):
        src = candidates[(k - 1) % len(candidates)]
        new = len(labels)
        labels.append(Output(k))
        edges.append(Edge(src=src + 1, dst=new + 1, alpha=1))

    c = Circuit(
        gates=tuple((i + 1, label) for i, label in enumerate(labels)),
        edges=tuple(edges),
        declared_class=circuit_class,
    )
    order = list(range(1, c.size + 1))
    rng.shuffle(order)
    shuffled = with_output_order(relabel(c, dict(zip(range(1, c.size + 1), order))))
    logger.debug("Сгенерирована схема: seed=%d size=%d class=%s", spec.seed, shuffled.size, circuit_class)
    return shuffled


def random_inputs(rng: random.Random, count: int, bound: int = 9) -> List[Fraction]:
    return [random_rational(rng, bound) for _ in range(count)]
