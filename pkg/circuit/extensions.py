"""
Реестр функций расширенного базиса B: f : Q^k → Q с объявленной арностью.

Порядок регистрации задаёт константы типов t_b (7, 8, …) в кодировании.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Sequence, Tuple

from numerics import relu

from .model import CircuitError

logger = logging.getLogger(__name__)

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

# sign: отдельный тип гейта, не расширение
RESERVED_NAMES = frozenset({"sign", "plus", "times", "input", "output", "const"})


class UnknownExtensionError(CircuitError):
    """Функция расширения не зарегистрирована."""


@dataclass(frozen=True)
class ExtensionFunction:
    name: str
    arity: int
    fn: Callable[..., Fraction]


class ExtensionRegistry:
    """Упорядоченный реестр чистых функций расширения."""

    def __init__(self) -> None:
        self._functions: Dict[str, ExtensionFunction] = {}

    def register(self, name: str, arity: int, fn: Callable[..., Fraction]) -> ExtensionFunction:
        if not _NAME_RE.match(name) or name in RESERVED_NAMES:
            raise CircuitError(f"invalid extension name {name!r}")
        if arity < 1:
            raise CircuitError(f"extension {name!r} must have arity >= 1")
        if name in self._functions:
            raise CircuitError(f"extension {name!r} is already registered")
        entry = ExtensionFunction(name=name, arity=arity, fn=fn)
        self._functions[name] = entry
        logger.debug("Зарегистрировано расширение %s/%d", name, arity)
        return entry

    def get(self, name: str) -> ExtensionFunction:
        try:
            return self._functions[name]
        except KeyError as exc:
            raise UnknownExtensionError(f"extension {name!r} is not registered") from exc

    def __contains__(self, name: str) -> bool:
        return name in self._functions

    def names(self) -> Tuple[str, ...]:
        return tuple(self._functions)

    def arity(self, name: str) -> int:
        if name == "sign":
            return 1
        return self.get(name).arity

    def call(self, name: str, args: Sequence[Fraction]) -> Fraction:
        entry = self.get(name)
        if len(args) != entry.arity:
            raise CircuitError(f"extension {name!r} expects {entry.arity} arguments, got {len(args)}")
        return Fraction(entry.fn(*args))


def default_registry() -> ExtensionRegistry:
    registry = ExtensionRegistry()
    registry.register("relu", 1, relu)
    registry.register("max2", 2, lambda a, b: max(a, b))
    registry.register("fma", 3, lambda a, b, c: a * b + c)
    return registry


DEFAULT_EXTENSIONS = default_registry()
