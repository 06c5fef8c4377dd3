"""
Библиотека гаджетов: сравнения, argmax, преобразования скоров и χ на гейтах {+, ×, sign}.

Глубина каждого гаджета не зависит от n, размер полиномиален по n.
Все гаджеты записаны над арифметическим бэкендом, поэтому их можно и вычислить
точно (ExactArith), и вывести гейтами (GateArith).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from circuit import (
    Circuit,
    Constant,
    DEFAULT_EXTENSIONS,
    Extension,
    ExtensionRegistry,
    Input,
    Output,
    Plus,
    Sign,
    Times,
    evaluate,
    metrics,
)
from numerics import LagrangeTable, charfin_via, lagrange_via, zero_via

from .wires import CircuitBuilder, CompileError, GateArith

logger = logging.getLogger(__name__)


class GadgetError(CompileError):
    """Неизвестный гаджет или неподходящие аргументы."""


# region gadget formulas ------------------------------------------------------------
def eq(ops: Any, x: Any, y: Any) -> Any:
    """1, если x = y, иначе 0."""
    d = x - y
    return 1 - ops.sign(d * d)


def gt(ops: Any, x: Any, y: Any) -> Any:
    """1, если x > y, иначе 0."""
    s = ops.sign(x - y)
    return (s * s + s) * Fraction(1, 2)


def is_max(ops: Any, a: Sequence[Any]) -> List[Any]:
    return [1 - ops.sign(ops.total([gt(ops, a_j, a_i) for a_j in a])) for a_i in a]


def card(ops: Any, flags: Sequence[Any]) -> Any:
    return ops.total(flags)


def recip_table(ops: Any, k: Any, n: int) -> Any:
    """1/k для k ∈ {1..n} табличной интерполяцией Σ_j (1/j)·eq(k, j)."""
    return ops.total([Fraction(1, j) * eq(ops, k, j) for j in range(1, n + 1)])


def avg_weights(ops: Any, a: Sequence[Any]) -> List[Any]:
    flags = is_max(ops, a)
    share = recip_table(ops, card(ops, flags), len(a))
    return [f * share for f in flags]


def hardleft_weights(ops: Any, a: Sequence[Any]) -> List[Any]:
    flags = is_max(ops, a)
    return [flags[i] * eq(ops, 1, ops.total(flags[: i + 1])) for i in range(len(a))]


def hardright_weights(ops: Any, a: Sequence[Any]) -> List[Any]:
    flags = is_max(ops, a)
    return [flags[i] * eq(ops, 1, ops.total(flags[i:])) for i in range(len(a))]


def relu(ops: Any, x: Any) -> Any:
    s = ops.sign(x)
    return x * (s + 1) * Fraction(1, 2)


def transform_weights(ops: Any, name: str, a: Sequence[Any]) -> List[Any]:
    """Веса f(a) для f ∈ {id, avg, hardleft, hardright}."""

    if name == "id":
        return list(a)
    if name == "avg":
        return avg_weights(ops, a)
    if name == "hardleft":
        return hardleft_weights(ops, a)
    if name == "hardright":
        return hardright_weights(ops, a)
    raise GadgetError(f"no gadget for score transform {name!r}")


# endregion


@dataclass(frozen=True)
class GadgetSpec:
    inputs: Callable[[int], int]
    build: Callable[[Any, Sequence[Any], int, Any], List[Any]]


def _lagrange(ops: Any, xs: Sequence[Any], n: int, param: Any) -> List[Any]:
    support, target = param
    table = LagrangeTable.build(support, target)
    return [lagrange_via(ops, table, xs[0])]


GADGETS: Dict[str, GadgetSpec] = {
    "eq": GadgetSpec(lambda n: 2, lambda ops, xs, n, p: [eq(ops, xs[0], xs[1])]),
    "gt": GadgetSpec(lambda n: 2, lambda ops, xs, n, p: [gt(ops, xs[0], xs[1])]),
    "is_max": GadgetSpec(lambda n: n, lambda ops, xs, n, p: is_max(ops, xs)),
    "card": GadgetSpec(lambda n: n, lambda ops, xs, n, p: [card(ops, is_max(ops, xs))]),
    "recip_table": GadgetSpec(lambda n: 1, lambda ops, xs, n, p: [recip_table(ops, xs[0], n)]),
    "avg": GadgetSpec(lambda n: n, lambda ops, xs, n, p: avg_weights(ops, xs)),
    "hardleft": GadgetSpec(lambda n: n, lambda ops, xs, n, p: hardleft_weights(ops, xs)),
    "hardright": GadgetSpec(lambda n: n, lambda ops, xs, n, p: hardright_weights(ops, xs)),
    "relu": GadgetSpec(lambda n: 1, lambda ops, xs, n, p: [relu(ops, xs[0])]),
    "zero": GadgetSpec(lambda n: 1, lambda ops, xs, n, p: [zero_via(ops, xs[0])]),
    "charfin": GadgetSpec(lambda n: 1, lambda ops, xs, n, p: [charfin_via(ops, Fraction(p or 0), xs[0])]),
    "lagrange": GadgetSpec(lambda n: 1, _lagrange),
}


@dataclass(frozen=True)
class GadgetCircuit:
    """
    Гаджет как самостоятельная схема: входы — порты ports_in, выходы — ports_out.

    Порты — это её Input/Output-гейты; splice встраивает тело в чужой построитель.
    """

    name: str
    ports_in: Tuple[str, ...]
    ports_out: Tuple[str, ...]
    body: Circuit

    @property
    def depth(self) -> int:
        return metrics(self.body).depth

    @property
    def size(self) -> int:
        return self.body.size

    @classmethod
    def trace(cls, name: str, n: int = 1, param: Any = None) -> "GadgetCircuit":
        """
        Строит гаджет name для n аргументов (для recip_table n — размер таблицы).

        Args:
            param: цель χ для charfin; (носитель, цель) для lagrange
        """

        if name not in GADGETS:
            raise GadgetError(f"unknown gadget {name!r}; known: {', '.join(sorted(GADGETS))}")
        if n < 1:
            raise GadgetError(f"gadget size must be >= 1, got {n}")
        if name == "lagrange" and param is None:
            raise GadgetError("lagrange gadget needs (support, target)")
        spec = GADGETS[name]
        builder = CircuitBuilder()
        ops = GateArith(builder)
        wires = [builder.input(k) for k in range(1, spec.inputs(n) + 1)]
        outs = spec.build(ops, wires, n, param)
        for w in outs:
            builder.output(w)
        body = builder.finish()
        return cls(
            name=name,
            ports_in=tuple(f"x{k}" for k in range(1, len(wires) + 1)),
            ports_out=tuple(f"y{k}" for k in range(1, len(outs) + 1)),
            body=body,
        )


def splice(builder: CircuitBuilder, c: Circuit, args: Sequence[Any]) -> List[Any]:
    """
    Встраивает схему c в builder: Input k ← args[k−1]; возвращает провода выходов по порядку out_k.
    """

    if len(args) != c.num_inputs:
        raise CompileError(f"circuit expects {c.num_inputs} inputs, got {len(args)}")
    wires: Dict[int, Any] = {}
    outputs: Dict[int, Any] = {}
    for idx in c.topological_order:
        label = c.labels[idx]
        preds = [wires[p] for p in c.predecessors[idx]]
        if isinstance(label, Input):
            wires[idx] = builder.lift(args[label.k - 1])
        elif isinstance(label, Constant):
            wires[idx] = builder.const(label.value)
        elif isinstance(label, Output):
            wires[idx] = preds[0]
            outputs[label.k] = preds[0]
        elif isinstance(label, Plus):
            wires[idx] = builder.plus(preds)
        elif isinstance(label, Times):
            wires[idx] = builder.times(preds)
        elif isinstance(label, Sign):
            wires[idx] = builder.sign(preds[0])
        elif isinstance(label, Extension):
            wires[idx] = builder.ext(label.name, preds)
        else:
            raise CompileError(f"cannot splice gate {idx} ({label!r})")
    return [outputs[k] for k in sorted(outputs)]


def gadget_eval(
    name: str, args: Sequence, param: Any = None, n: Optional[int] = None, registry: Optional[ExtensionRegistry] = None
) -> Tuple[Fraction, ...]:
    """Все выходы гаджета, вычисленные через его схему."""

    size = n if n is not None else len(args)
    gadget = GadgetCircuit.trace(name, size, param)
    if len(args) != gadget.body.num_inputs:
        raise GadgetError(f"gadget {name} takes {gadget.body.num_inputs} arguments, got {len(args)}")
    return evaluate(gadget.body, [Fraction(a) for a in args], registry or DEFAULT_EXTENSIONS)


def gadget_eval_check(
    name: str, args: Sequence, component: int = 1, param: Any = None, n: Optional[int] = None
) -> Fraction:
    """
    Выход номер component (с 1) гаджета name на аргументах args.

    Examples:
        gadget_eval_check("eq", (3, 3)) == 1
        gadget_eval_check("avg", (3, 1, 3), component=1) == 1/2
        gadget_eval_check("recip_table", (3,), n=4) == 1/3
    """

    values = gadget_eval(name, args, param, n)
    if not 1 <= component <= len(values):
        raise GadgetError(f"gadget {name} has {len(values)} outputs, no output {component}")
    return values[component - 1]
