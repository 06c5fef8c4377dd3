"""
Константы типов гейтов и раскладка компонент закодированных векторов.

Аналог header_config: имена компонент и типов задаются в одном месте,
всё остальное обращается к ним по имени.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Tuple

from circuit import DEFAULT_EXTENSIONS, Constant, ExtensionRegistry, Extension, GateLabel, Input, Output, Plus, Sign, Times

# Номера компонент вектора: (s, p, i, t, v) + (one, ssq, isq, bin) из входных эмбеддингов
S, P, I, T, V, ONE, SSQ, ISQ, BIN = range(9)

COMPONENT_NAMES: Tuple[str, ...] = ("s", "p", "i", "t", "v", "one", "ssq", "isq", "bin")

SUPPORTED_DIMS: Tuple[int, ...] = (5, 7, 8, 9)

BASE_TYPES: Tuple[Tuple[str, int], ...] = (
    ("const", 1),
    ("input", 2),
    ("output", 3),
    ("plus", 4),
    ("times", 5),
    ("sign", 6),
)

# Множество T для конструкций без расширений
CORE_TYPE_NAMES: Tuple[str, ...] = ("const", "input", "output", "plus", "times")


class EncodingError(Exception):
    """Ошибка кодирования/декодирования последовательности."""


@dataclass(frozen=True)
class TypeConstants:
    extensions: Tuple[str, ...] = ()
    values: Dict[str, Fraction] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        table = {name: Fraction(value) for name, value in BASE_TYPES}
        for offset, name in enumerate(self.extensions):
            if name in table:
                raise EncodingError(f"extension {name!r} clashes with a gate type name")
            table[name] = Fraction(len(BASE_TYPES) + 1 + offset)
        object.__setattr__(self, "values", table)

    @classmethod
    def for_registry(cls, registry: ExtensionRegistry) -> "TypeConstants":
        """t_b = 7, 8, … в порядке регистрации расширений."""
        return cls(extensions=registry.names())

    def __getitem__(self, name: str) -> Fraction:
        try:
            return self.values[name]
        except KeyError as exc:
            raise EncodingError(f"no type constant for {name!r}") from exc

    def __contains__(self, name: str) -> bool:
        return name in self.values

    def of_label(self, label: GateLabel) -> Fraction:
        if isinstance(label, Constant):
            return self["const"]
        if isinstance(label, Input):
            return self["input"]
        if isinstance(label, Output):
            return self["output"]
        if isinstance(label, Plus):
            return self["plus"]
        if isinstance(label, Times):
            return self["times"]
        if isinstance(label, Sign):
            return self["sign"]
        if isinstance(label, Extension):
            return self[label.name]
        raise EncodingError(f"cannot encode gate label {label!r}")

    def support(self, names: Iterable[str]) -> Tuple[Fraction, ...]:
        """Значения констант для набора имён типов (носитель χ_T)."""
        return tuple(self[name] for name in names)

    def name_of(self, value: Fraction) -> str:
        for name, known in self.values.items():
            if known == value:
                return name
        raise EncodingError(f"unknown type constant {value}")


DEFAULT_TYPES = TypeConstants.for_registry(DEFAULT_EXTENSIONS)
