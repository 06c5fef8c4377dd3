"""
Текстовый формат конфигурации трансформера.

    dim 8
    embed embed8                     # identity | embed7 | embed8 | embed9 | circuit <path>
    charfin zero                     # zero | lagrange
    types const,input,output,plus,times
    pos 1 3 0,0,0,0,0,0,0,1          # (i, n) → вектор, необязательно
    layer
    head att_E_dp WS/avg
    head dpa A=1,0;0,1 B=1,0;0,1 WS/id
    head circuit score.circ WP/avg
    act act_E_semi                   # встроенная активация или circuit <path>

Пути к схемам отсчитываются от каталога файла конфигурации.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from circuit import CircuitError, dump_circuit, load_circuit
from numerics import RationalParseError, format_rational, parse_rational

from .specs import (
    BuiltinActivation,
    BuiltinAttention,
    DotProduct,
    EngineError,
    HeadSpec,
    HostCircuit,
    LayerSpec,
    PoolingSpec,
    TransformerConfig,
)

logger = logging.getLogger(__name__)


class ConfigFormatError(EngineError):
    """Синтаксическая ошибка в файле конфигурации трансформера."""


def _matrix(text: str, line_no: int):
    try:
        return tuple(tuple(parse_rational(x) for x in row.split(",")) for row in text.split(";"))
    except RationalParseError as exc:
        raise ConfigFormatError(f"line {line_no}: {exc}") from exc


def _host(path: str, base: Optional[Path], line_no: int) -> HostCircuit:
    full = (base / path) if base is not None else Path(path)
    try:
        return HostCircuit(circuit=load_circuit(str(full)), path=path)
    except (OSError, CircuitError) as exc:
        raise ConfigFormatError(f"line {line_no}: cannot load circuit {path!r}: {exc}") from exc


def _attention(parts: List[str], base: Optional[Path], line_no: int):
    if parts[0] == "dpa":
        fields = dict(part.split("=", 1) for part in parts[1:] if "=" in part)
        if set(fields) != {"A", "B"} or len(parts) != 3:
            raise ConfigFormatError(f"line {line_no}: expected `dpa A=<rows> B=<rows>`")
        return DotProduct(A=_matrix(fields["A"], line_no), B=_matrix(fields["B"], line_no))
    if parts[0] == "circuit":
        if len(parts) != 2:
            raise ConfigFormatError(f"line {line_no}: expected `circuit <path>`")
        return _host(parts[1], base, line_no)
    if len(parts) != 1:
        raise ConfigFormatError(f"line {line_no}: cannot parse attention {' '.join(parts)!r}")
    return BuiltinAttention.parse(parts[0])


def parse_config(text: str, base_dir: Optional[str] = None) -> TransformerConfig:
    base = Path(base_dir) if base_dir is not None else None
    header: Dict[str, object] = {}
    positional: List[Tuple[Tuple[int, int], Tuple]] = []
    layers: List[LayerSpec] = []
    heads: Optional[List[HeadSpec]] = None

    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        try:
            if key == "dim":
                if len(rest) != 1 or not rest[0].isdigit():
                    raise ConfigFormatError(f"line {line_no}: expected `dim <d>`")
                header["dim"] = int(rest[0])
            elif key == "embed":
                if rest[:1] == ["circuit"] and len(rest) == 2:
                    header["input_embedding"] = _host(rest[1], base, line_no)
                elif len(rest) == 1:
                    header["input_embedding"] = rest[0]
                else:
                    raise ConfigFormatError(f"line {line_no}: expected `embed <name>`")
            elif key == "charfin":
                header["charfin"] = rest[0] if len(rest) == 1 else ""
            elif key == "types":
                header["gate_types"] = tuple(name.strip() for name in "".join(rest).split(",") if name.strip())
            elif key == "pos":
                if len(rest) != 3 or not (rest[0].isdigit() and rest[1].isdigit()):
                    raise ConfigFormatError(f"line {line_no}: expected `pos <i> <n> <r,…>`")
                vec = tuple(parse_rational(x) for x in rest[2].split(","))
                positional.append(((int(rest[0]), int(rest[1])), vec))
            elif key == "layer":
                if heads is not None:
                    raise ConfigFormatError(f"line {line_no}: previous layer has no `act` line")
                heads = []
            elif key == "head":
                if heads is None:
                    raise ConfigFormatError(f"line {line_no}: `head` outside of a layer")
                if len(rest) < 2:
                    raise ConfigFormatError(f"line {line_no}: expected `head <attention> <pooling>`")
                heads.append(HeadSpec(_attention(rest[:-1], base, line_no), PoolingSpec.parse(rest[-1])))
            elif key == "act":
                if heads is None:
                    raise ConfigFormatError(f"line {line_no}: `act` outside of a layer")
                if rest[:1] == ["circuit"] and len(rest) == 2:
                    activation = _host(rest[1], base, line_no)
                elif len(rest) == 1:
                    activation = BuiltinActivation.parse(rest[0])
                else:
                    raise ConfigFormatError(f"line {line_no}: expected `act <activation>`")
                layers.append(LayerSpec(heads=tuple(heads), activation=activation))
                heads = None
            else:
                raise ConfigFormatError(f"line {line_no}: unknown key {key!r}")
        except ConfigFormatError:
            raise
        except (EngineError, RationalParseError) as exc:
            raise ConfigFormatError(f"line {line_no}: {exc}") from exc

    if heads is not None:
        raise ConfigFormatError("last layer has no `act` line")
    if "dim" not in header:
        raise ConfigFormatError("missing `dim <d>` line")
    try:
        return TransformerConfig(layers=tuple(layers), positional=tuple(positional), **header)
    except EngineError as exc:
        raise ConfigFormatError(str(exc)) from exc


def load_config(path: str) -> TransformerConfig:
    p = Path(path)
    return parse_config(p.read_text(encoding="utf-8"), base_dir=str(p.parent))


def _rows(matrix) -> str:
    return ";".join(",".join(format_rational(x) for x in row) for row in matrix)


def _host_ref(spec: HostCircuit, kind: str, circuits: Dict[str, str]) -> str:
    path = spec.path or f"{kind}_{len(circuits) + 1}.circ"
    circuits[path] = dump_circuit(spec.circuit)
    return f"circuit {path}"


def dump_config(cfg: TransformerConfig) -> Tuple[str, Dict[str, str]]:
    """
    Сериализует конфигурацию.

    Returns:
        (текст конфигурации, {относительный путь: текст схемы}) — схемы HostCircuit,
        которые нужно положить рядом с файлом конфигурации
    """

    circuits: Dict[str, str] = {}
    embedding = cfg.input_embedding
    lines = [
        f"dim {cfg.dim}",
        f"embed {_host_ref(embedding, 'embed', circuits) if isinstance(embedding, HostCircuit) else embedding}",
        f"charfin {cfg.charfin}",
        f"types {','.join(cfg.gate_types)}",
    ]
    for (i, n), vec in cfg.positional:
        lines.append(f"pos {i} {n} {','.join(format_rational(x) for x in vec)}")

    for layer in cfg.layers:
        lines.append("layer")
        for head in layer.heads:
            att = head.attention
            if isinstance(att, DotProduct):
                text = f"dpa A={_rows(att.A)} B={_rows(att.B)}"
            elif isinstance(att, HostCircuit):
                text = _host_ref(att, "attention", circuits)
            else:
                text = att.label
            lines.append(f"head {text} {head.pooling.label}")
        act = layer.activation
        lines.append(f"act {_host_ref(act, 'activation', circuits) if isinstance(act, HostCircuit) else act.label}")
    return "\n".join(lines) + "\n", circuits


def save_config(path: str, cfg: TransformerConfig) -> None:
    text, circuits = dump_config(cfg)
    target = Path(path)
    target.write_text(text, encoding="utf-8")
    for rel, body in circuits.items():
        (target.parent / rel).write_text(body, encoding="utf-8")
    logger.info("Конфигурация записана: %s (%d слоёв, dim %d)", path, len(cfg.layers), cfg.dim)
