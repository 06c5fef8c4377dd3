"""
Моделирование схемы трансформером: проверка допустимости, кодирование, исполнение, чтение выходов.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from circuit import (
    Circuit,
    Extension,
    ExtensionRegistry,
    DEFAULT_EXTENSIONS,
    Plus,
    Times,
    label_kind,
    metrics,
    parse_circuit,
    validate,
)
from encoding import BIN, S, EncodedSequence, TypeConstants, decode_outputs, encode
from engine import ExecutionTrace, run

from .builders import ConstructionError, ConstructionKind, build

logger = logging.getLogger(__name__)

# класс fan-in, в котором конструкция моделирует схемы
KIND_CLASSES: Dict[str, str] = {
    "generalized": "unbounded",
    "avg_fac": "unbounded",
    "avg_fsac": "semi_unbounded",
    "hard_fnc": "bounded",
    "avg_ext": "semi_unbounded",
    "avg_sign": "semi_unbounded",
}

_ARITHMETIC = {"const", "input", "output", "plus", "times"}


class AdmissibilityError(ConstructionError):
    """Схема не подходит конструкции: класс, типы гейтов или глубина."""

    def __init__(self, message: str, problems: Sequence[str] = ()) -> None:
        super().__init__(message)
        self.problems = list(problems)


def admissibility_problems(kind: ConstructionKind, c: Circuit, registry: Optional[ExtensionRegistry] = None) -> List[str]:
    """Пустой список, если схему можно моделировать конструкцией kind."""

    problems: List[str] = []
    checked_class = KIND_CLASSES[kind.kind]
    report = validate(c, checked_class, registry)
    problems += [str(v) for v in report.errors]

    allowed = set(_ARITHMETIC)
    if kind.kind == "avg_sign":
        allowed.add("sign")
    if kind.kind == "avg_ext" and "sign" in kind.basis:
        allowed.add("sign")
    ext_allowed = set(kind.basis) if kind.kind == "avg_ext" else set()

    for idx, label in c.gates:
        gate_kind = label_kind(label)
        if isinstance(label, Extension):
            if label.name not in ext_allowed:
                problems.append(f"gate {idx}: extension {label.name!r} is outside the basis of {kind.label}")
        elif gate_kind not in allowed:
            problems.append(f"gate {idx}: {gate_kind} gates are not simulated by {kind.label}")
        if isinstance(label, (Plus, Times)) and c.fan_in(idx) == 0:
            problems.append(f"gate {idx}: {gate_kind} with fan-in 0 has no vector in the encoding")
        if kind.kind == "hard_fnc" and isinstance(label, (Plus, Times)) and c.fan_in(idx) != 2:
            problems.append(f"gate {idx}: {gate_kind} needs fan-in exactly 2 for {kind.label}")

    if report.is_valid:
        depth = metrics(c).depth
        if depth > kind.depth:
            problems.append(f"circuit depth {depth} exceeds the depth bound K={kind.depth}")
    return problems


def check_admissible(kind: ConstructionKind, c: Circuit, registry: Optional[ExtensionRegistry] = None) -> None:
    problems = admissibility_problems(kind, c, registry)
    if problems:
        raise AdmissibilityError(
            f"circuit is not admissible for {kind.label}:\n" + "\n".join(f"  - {p}" for p in problems), problems
        )


def _ordered_outputs(c: Circuit, by_position: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
    """Значения в порядке возрастания индексов гейтов → порядок меток out_k."""

    gates = sorted(c.output_gates)
    by_gate = dict(zip(gates, by_position))
    return tuple(by_gate[idx] for _, idx in sorted((c.labels[idx].k, idx) for idx in gates))


def simulate(
    kind: ConstructionKind,
    c: Circuit,
    u: Sequence,
    registry: Optional[ExtensionRegistry] = None,
    trace_mode: Optional[str] = None,
) -> Tuple[Tuple[Fraction, ...], ExecutionTrace]:
    """
    Выходы схемы, вычисленные трансформером build(kind).

    Raises:
        AdmissibilityError: до запуска, если схема не подходит конструкции
    """

    registry = registry or DEFAULT_EXTENSIONS
    check_admissible(kind, c, registry)
    seq = encode(c, u, TypeConstants.for_registry(registry))
    outputs, trace = simulate_sequence(kind, seq, c.num_outputs, registry, trace_mode)
    return _ordered_outputs(c, outputs), trace


def simulate_sequence(
    kind: ConstructionKind,
    seq: EncodedSequence,
    n_outputs: int,
    registry: Optional[ExtensionRegistry] = None,
    trace_mode: Optional[str] = None,
) -> Tuple[Tuple[Fraction, ...], ExecutionTrace]:
    """Исполняет конструкцию на готовой (возможно переставленной) кодировке; выходы по возрастанию s."""

    registry = registry or DEFAULT_EXTENSIONS
    cfg = build(kind, registry)
    final, trace = run(cfg, seq, trace_mode=trace_mode, registry=registry)
    outputs = decode_outputs(n_outputs, final, TypeConstants.for_registry(registry))
    logger.debug("Моделирование %s: %d векторов, выходы %s", kind.label, len(seq), outputs)
    return outputs, trace


@dataclass(frozen=True)
class SignReadout:
    """Сводка голов чтения знака для одного sign-гейта."""

    value: Fraction
    u_plus_s: Fraction
    u_minus_s: Fraction
    u_bin: Fraction
    zero: Fraction
    sign: Fraction
    outputs: Tuple[Fraction, ...] = field(default=(), compare=False)


def sign_readout(v, charfin: str = "zero") -> SignReadout:
    """
    Прогоняет схему out ← sign(const v) через конструкцию sign (K = 2)
    и читает головы знака второго слоя на ребре, входящем в sign-гейт.
    """

    value = Fraction(v)
    c = parse_circuit(f"class semi\ngate 1 const {value}\ngate 2 sign 1\ngate 3 output 2\n")
    kind = ConstructionKind("avg_sign", 2, charfin=charfin)
    outputs, trace = simulate(kind, c, [], trace_mode="full")

    # кодировка: вектор константы, ребро 1→2, ребро 2→3
    position = 1
    layer = trace.layer(2)
    u_plus, u_minus, u_sign = (layer.pooled[h][position] for h in (3, 4, 5))
    zero = 4 * (u_plus[S] - 1) * (u_minus[S] - 1)
    sign = (1 - zero) * (2 * u_sign[BIN] - 1)
    return SignReadout(value, u_plus[S], u_minus[S], u_sign[BIN], zero, sign, outputs)
