"""
Проверка структуры схемы: DAG, нумерация α, условия на типы гейтов и дисциплина fan-in.

Нарушения — это данные: validate() ничего не бросает, а собирает ошибки и предупреждения.
Правила fan-in по классам читаются из schemas/fan_in_classes.json.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from utils.schema_utils import diff_keys, load_schema, schema_path

from .extensions import ExtensionRegistry
from .model import CIRCUIT_CLASSES, Circuit, CircuitError, Extension, Input, Output, label_kind, normalize_class

logger = logging.getLogger(__name__)

FAN_IN_SCHEMA = schema_path(__file__, "fan_in_classes.json")


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.message}"


@dataclass
class ValidationReport:
    checked_class: str
    errors: List[Violation] = field(default_factory=list)
    warnings: List[Violation] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return not self.errors

    def rules(self) -> set:
        return {v.rule for v in self.errors}

    def summary(self) -> str:
        if self.is_valid and not self.warnings:
            return f"✅ Схема корректна (класс {self.checked_class})"
        lines = [str(v) for v in self.errors] + [f"⚠️ {v}" for v in self.warnings]
        return "\n".join(lines)

    def as_tuple(self) -> Tuple[bool, str]:
        return self.is_valid, self.summary()


def load_fan_in_rules() -> Dict:
    rules = load_schema(FAN_IN_SCHEMA)
    missing = diff_keys({name: None for name in CIRCUIT_CLASSES}, rules["classes"])["removed"]
    if missing:
        raise CircuitError(f"fan-in schema lacks classes: {missing}")
    return rules


def _check_indices(c: Circuit, report: ValidationReport) -> None:
    indices = [idx for idx, _ in c.gates]
    duplicates = sorted(idx for idx, count in Counter(indices).items() if count > 1)
    if duplicates:
        report.errors.append(Violation("gate index contiguity", f"duplicate gate indices {duplicates}"))
    if sorted(set(indices)) != list(range(1, len(set(indices)) + 1)):
        report.errors.append(
            Violation("gate index contiguity", f"gate indices must be 1..{len(indices)}, got gaps")
        )


def _check_edges(c: Circuit, report: ValidationReport) -> bool:
    known = set(c.labels)
    ok = True
    for edge in c.edges:
        if edge.src not in known or edge.dst not in known:
            report.errors.append(
                Violation("dangling edge", f"edge {edge.src}->{edge.dst} references a missing gate")
            )
            ok = False
    pairs = Counter((e.src, e.dst) for e in c.edges)
    for (src, dst), count in sorted(pairs.items()):
        if count > 1:
            report.errors.append(Violation("duplicate edge", f"edge {src}->{dst} listed {count} times"))
    return ok


def _check_acyclic(c: Circuit, report: ValidationReport) -> None:
    try:
        _ = c.topological_order
    except CircuitError as exc:
        report.errors.append(Violation("acyclic", str(exc)))


def _check_alpha(c: Circuit, report: ValidationReport) -> None:
    alphas: Dict[int, List[int]] = defaultdict(list)
    for edge in c.edges:
        alphas[edge.dst].append(edge.alpha)
    for dst, values in sorted(alphas.items()):
        if sorted(values) != list(range(1, len(values) + 1)):
            report.errors.append(
                Violation("alpha contiguity", f"gate {dst} has incoming alpha values {sorted(values)}")
            )


def _check_labels(c: Circuit, report: ValidationReport) -> None:
    inputs = sorted(label.k for _, label in c.gates if isinstance(label, Input))
    if inputs != list(range(1, len(inputs) + 1)):
        report.errors.append(Violation("input labels", f"input labels must be in_1..in_m once, got {inputs}"))
    outputs = [(idx, label.k) for idx, label in c.gates if isinstance(label, Output)]
    ks = sorted(k for _, k in outputs)
    if ks != list(range(1, len(ks) + 1)):
        report.errors.append(Violation("output labels", f"output labels must be out_1..out_n once, got {ks}"))
    by_index = [k for _, k in sorted(outputs)]
    if by_index != sorted(by_index):
        report.errors.append(
            Violation("output order", "output gate indices must be ascending in their label k")
        )


def _check_fan_in(
    c: Circuit, checked_class: str, report: ValidationReport, registry: Optional[ExtensionRegistry]
) -> None:
    rules = load_fan_in_rules()
    class_rules = rules["classes"][checked_class]
    fixed = rules["fixed_fan_in"]
    zero_fan_out = set(rules["zero_fan_out"])
    empty_value = rules["empty_value"]

    for idx, label in c.gates:
        kind = label_kind(label)
        fan_in = c.fan_in(idx)
        if kind in fixed and fan_in != fixed[kind]:
            rule = {"const": "source fan-in", "input": "source fan-in", "output": "output fan-in"}.get(
                kind, f"{kind} fan-in"
            )
            report.errors.append(Violation(rule, f"gate {idx} ({kind}) has fan-in {fan_in}, expected {fixed[kind]}"))
        if kind in zero_fan_out and c.successors.get(idx):
            report.errors.append(Violation("output fan-out", f"output gate {idx} has successors"))
        if kind in class_rules:
            bounds = class_rules[kind]
            low, high = bounds["min"], bounds["max"]
            if fan_in < low or (high is not None and fan_in > high):
                report.errors.append(
                    Violation(
                        "fan-in discipline",
                        f"gate {idx} ({kind}) has fan-in {fan_in}, class {checked_class} allows "
                        f"{low}..{'∞' if high is None else high}",
                    )
                )
        if kind in empty_value and fan_in == 0:
            report.warnings.append(
                Violation(
                    "empty arithmetic gate",
                    f"gate {idx} ({kind}) has fan-in 0 and evaluates to {empty_value[kind]}; it has no sequence encoding",
                )
            )
        if isinstance(label, Extension):
            if fan_in != label.arity:
                report.errors.append(
                    Violation("extension arity", f"gate {idx} ({label.name}) has fan-in {fan_in}, arity {label.arity}")
                )
            if registry is not None and label.name not in registry:
                report.warnings.append(Violation("extension registry", f"extension {label.name!r} is not registered"))


def validate(
    c: Circuit, as_class: Optional[str] = None, registry: Optional[ExtensionRegistry] = None
) -> ValidationReport:
    """
    Проверяет все инварианты схемы.

    Args:
        c: схема
        as_class: класс для проверки fan-in (по умолчанию объявленный в схеме)
        registry: реестр расширений для предупреждений о незарегистрированных функциях

    Returns:
        ValidationReport: пустой список ошибок, если схема корректна
    """

    checked_class = normalize_class(as_class) if as_class else c.declared_class
    report = ValidationReport(checked_class=checked_class)
    _check_indices(c, report)
    if _check_edges(c, report):
        _check_acyclic(c, report)
    _check_alpha(c, report)
    _check_labels(c, report)
    _check_fan_in(c, checked_class, report, registry)
    if report.errors:
        logger.debug("Схема не прошла проверку: %d нарушений", len(report.errors))
    return report
