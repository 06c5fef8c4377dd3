"""
Текстовый формат схем (UTF-8, построчный, комментарии через #).

    class bounded|semi|unbounded
    gate <idx> input <k>
    gate <idx> const <rational>
    gate <idx> output <from-idx>
    gate <idx> plus <from-idx>…
    gate <idx> times <from-idx>…
    gate <idx> sign <from-idx>
    gate <idx> ext <name> <from-idx>…

Номер α входящего ребра — позиция предшественника в строке (слева направо).
Метка out_k назначается выходным гейтам по возрастанию индекса.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from numerics import RationalParseError, format_rational, parse_rational

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

logger = logging.getLogger(__name__)

# (first gate, last gate, описание): комментарии о происхождении диапазонов гейтов
Provenance = Sequence[Tuple[int, int, str]]

_CLASS_NAMES = {"bounded": "bounded", "semi_unbounded": "semi", "unbounded": "unbounded"}


class CircuitFormatError(CircuitError):
    """Синтаксическая ошибка в файле схемы."""


def _int(token: str, line_no: int) -> int:
    try:
        value = int(token)
    except ValueError as exc:
        raise CircuitFormatError(f"line {line_no}: expected a gate index, got {token!r}") from exc
    if value < 1:
        raise CircuitFormatError(f"line {line_no}: indices are positive, got {value}")
    return value


def parse_circuit(text: str) -> Circuit:
    declared = "unbounded"
    labels: Dict[int, GateLabel] = {}
    edges: List[Edge] = []
    output_idx: List[int] = []

    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "class":
            if len(parts) != 2:
                raise CircuitFormatError(f"line {line_no}: expected `class <name>`")
            try:
                declared = normalize_class(parts[1])
            except CircuitError as exc:
                raise CircuitFormatError(f"line {line_no}: {exc}") from exc
            continue
        if head != "gate" or len(parts) < 3:
            raise CircuitFormatError(f"line {line_no}: cannot parse {raw.strip()!r}")

        idx = _int(parts[1], line_no)
        if idx in labels:
            raise CircuitFormatError(f"line {line_no}: gate {idx} defined twice")
        kind, args = parts[2], parts[3:]

        if kind == "input":
            if len(args) != 1:
                raise CircuitFormatError(f"line {line_no}: `input` takes one label index")
            labels[idx] = Input(_int(args[0], line_no))
            continue
        if kind == "const":
            if len(args) != 1:
                raise CircuitFormatError(f"line {line_no}: `const` takes one rational")
            try:
                labels[idx] = Constant(parse_rational(args[0]))
            except RationalParseError as exc:
                raise CircuitFormatError(f"line {line_no}: {exc}") from exc
            continue

        if kind == "ext":
            if not args:
                raise CircuitFormatError(f"line {line_no}: `ext` needs a function name")
            name, args = args[0], args[1:]
            labels[idx] = Extension(name, len(args))
        elif kind == "output":
            labels[idx] = Output(0)
            output_idx.append(idx)
        elif kind == "plus":
            labels[idx] = Plus()
        elif kind == "times":
            labels[idx] = Times()
        elif kind == "sign":
            labels[idx] = Sign()
        else:
            raise CircuitFormatError(f"line {line_no}: unknown gate kind {kind!r}")

        for alpha, token in enumerate(args, 1):
            edges.append(Edge(src=_int(token, line_no), dst=idx, alpha=alpha))

    for k, idx in enumerate(sorted(output_idx), 1):
        labels[idx] = Output(k)

    gates = tuple(sorted(labels.items()))
    edges.sort(key=lambda e: (e.dst, e.alpha))
    return Circuit(gates=gates, edges=tuple(edges), declared_class=declared)


def load_circuit(path: str) -> Circuit:
    return parse_circuit(Path(path).read_text(encoding="utf-8"))


def _gate_line(c: Circuit, idx: int, label: GateLabel) -> str:
    preds = " ".join(str(p) for p in c.predecessors[idx])
    if isinstance(label, Input):
        return f"gate {idx} input {label.k}"
    if isinstance(label, Constant):
        return f"gate {idx} const {format_rational(label.value)}"
    if isinstance(label, Output):
        return f"gate {idx} output {preds}"
    if isinstance(label, Plus):
        return f"gate {idx} plus {preds}".rstrip()
    if isinstance(label, Times):
        return f"gate {idx} times {preds}".rstrip()
    if isinstance(label, Sign):
        return f"gate {idx} sign {preds}"
    if isinstance(label, Extension):
        return f"gate {idx} ext {label.name} {preds}".rstrip()
    raise CircuitFormatError(f"gate {idx}: cannot serialize {label!r}")


def dump_circuit(c: Circuit, provenance: Optional[Provenance] = None) -> str:
    """
    Сериализует схему. Строки гейтов идут по возрастанию индекса,
    перед первым гейтом каждого диапазона provenance выводится комментарий.
    """

    starts: Dict[int, List[str]] = {}
    for first, last, label in provenance or ():
        starts.setdefault(first, []).append(f"# gates {first}..{last}: {label}")

    lines = [f"class {_CLASS_NAMES[c.declared_class]}"]
    for idx, label in sorted(c.gates, key=lambda item: item[0]):
        lines.extend(starts.get(idx, ()))
        lines.append(_gate_line(c, idx, label))
    return "\n".join(lines) + "\n"


def save_circuit(path: str, c: Circuit, provenance: Optional[Provenance] = None) -> None:
    Path(path).write_text(dump_circuit(c, provenance), encoding="utf-8")
    logger.info("Схема записана: %s (%d гейтов)", path, c.size)


def parse_inputs(text: str) -> List[Fraction]:
    """Входной вектор `r1,r2,…` (как флаг --input)."""

    try:
        return [parse_rational(part) for part in text.split(",") if part.strip()]
    except RationalParseError as exc:
        raise CircuitFormatError(str(exc)) from exc


def format_values(values: Iterable[Fraction]) -> str:
    return "\n".join(format_rational(v) for v in values)
