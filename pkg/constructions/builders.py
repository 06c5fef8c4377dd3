"""
Конструкции трансформеров, моделирующих схемы глубины ≤ K.

Каждая конструкция — двухслойный блок (слой рёбер E, затем слой значений V),
повторённый K раз. Имена для CLI: gen, fac, fsac, fnc, ext:<имена>, sign.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from circuit import DEFAULT_EXTENSIONS, ExtensionRegistry
from encoding import CORE_TYPE_NAMES
from engine import (
    BuiltinActivation,
    BuiltinAttention,
    EngineError,
    HeadSpec,
    LayerSpec,
    PoolingSpec,
    TransformerConfig,
    basis_arity,
)

logger = logging.getLogger(__name__)

KINDS: Tuple[str, ...] = ("generalized", "avg_fac", "avg_fsac", "hard_fnc", "avg_ext", "avg_sign")

CLI_NAMES: Dict[str, str] = {
    "gen": "generalized",
    "fac": "avg_fac",
    "fsac": "avg_fsac",
    "fnc": "hard_fnc",
    "ext": "avg_ext",
    "sign": "avg_sign",
}

FNC_POOLS: Tuple[str, ...] = ("hardleft", "hardright", "avg")


class ConstructionError(Exception):
    """Конструкцию нельзя построить с такими параметрами."""


@dataclass(frozen=True)
class ConstructionKind:
    kind: str
    depth: int
    basis: Tuple[str, ...] = ()
    pool: str = "hardleft"
    charfin: str = "zero"

    def __post_init__(self) -> None:
        object.__setattr__(self, "basis", tuple(self.basis))
        if self.kind not in KINDS:
            raise ConstructionError(f"unknown construction kind {self.kind!r}")
        if self.depth < 1:
            raise ConstructionError(f"depth bound K must be >= 1, got {self.depth}")
        if self.basis and self.kind != "avg_ext":
            raise ConstructionError(f"{self.kind} takes no extension basis")
        if self.kind == "avg_ext" and not self.basis:
            raise ConstructionError("avg_ext needs a non-empty basis")
        if self.pool not in FNC_POOLS:
            raise ConstructionError(f"pool must be one of {FNC_POOLS}, got {self.pool!r}")
        if self.charfin not in ("zero", "lagrange"):
            raise ConstructionError(f"charfin must be zero or lagrange, got {self.charfin!r}")

    @property
    def label(self) -> str:
        short = {full: short for short, full in CLI_NAMES.items()}[self.kind]
        if self.kind == "avg_ext":
            short += ":" + ",".join(self.basis)
        return f"{short} K={self.depth}"

    @property
    def gate_types(self) -> Tuple[str, ...]:
        """Множество T (или T′), которое различают активации."""

        if self.kind == "avg_sign":
            return CORE_TYPE_NAMES + ("sign",)
        if self.kind == "avg_ext":
            return CORE_TYPE_NAMES + self.basis
        return CORE_TYPE_NAMES


def parse_kind(text: str, depth: int, pool: str = "hardleft", charfin: str = "zero") -> ConstructionKind:
    """`fac` → avg_fac, `ext:relu,sign` → avg_ext с базисом (relu, sign)."""

    name, _, rest = text.partition(":")
    if name not in CLI_NAMES:
        raise ConstructionError(f"unknown construction {text!r}; expected one of {', '.join(CLI_NAMES)}")
    basis = tuple(b.strip() for b in rest.split(",") if b.strip())
    if rest and name != "ext":
        raise ConstructionError(f"{name} takes no basis")
    return ConstructionKind(CLI_NAMES[name], depth, basis, pool, charfin)


def _head(attention: str, pooling: str) -> HeadSpec:
    return HeadSpec(BuiltinAttention.parse(attention), PoolingSpec.parse(pooling))


def _unused(count: int, pooling: str) -> List[HeadSpec]:
    # значения неиспользуемых голов активации игнорируют
    return [_head("att_E_dp", pooling) for _ in range(count)]


def _block(kind: ConstructionKind, registry: ExtensionRegistry) -> Tuple[int, str, LayerSpec, LayerSpec]:
    """(dim, embedding, слой E, слой V) одного блока."""

    if kind.kind == "generalized":
        edge = LayerSpec(
            heads=(_head("att_E_eq", "WS/id"), _head("att_E_eq", "WS/id")),
            activation=BuiltinActivation("act_E_gen"),
        )
        value = LayerSpec(
            heads=(_head("att_V_eq", "WS/id"), _head("att_V_eq", "WP/id")),
            activation=BuiltinActivation("act_V_gen"),
        )
        return 5, "identity", edge, value

    if kind.kind == "avg_fac":
        edge = LayerSpec(
            heads=(_head("att_E_dp", "WS/avg"), _head("att_V_dp", "WS/avg")),
            activation=BuiltinActivation("act_E_avg"),
        )
        value = LayerSpec(
            heads=(_head("att_V_dp", "WS/avg"), _head("att_V_dp", "WP/avg")),
            activation=BuiltinActivation("act_V_avg"),
        )
        return 7, "embed7", edge, value

    if kind.kind == "avg_fsac":
        edge = LayerSpec(
            heads=tuple([_head("att_E_dp", "WS/avg"), _head("att_V_dp", "WS/avg")] + _unused(1, "WS/avg")),
            activation=BuiltinActivation("act_E_semi"),
        )
        value = LayerSpec(
            heads=(_head("att_V_dp", "WS/avg"), _head("att_B(1)", "WS/avg"), _head("att_B(2)", "WS/avg")),
            activation=BuiltinActivation("act_V_semi"),
        )
        return 8, "embed8", edge, value

    if kind.kind == "hard_fnc":
        pooling = f"WS/{kind.pool}"
        edge = LayerSpec(
            heads=tuple([_head("att_E_dp", pooling)] + _unused(1, pooling)),
            activation=BuiltinActivation("act_E_fnc"),
        )
        value = LayerSpec(
            heads=(_head("att_B(1)", pooling), _head("att_B(2)", pooling)),
            activation=BuiltinActivation("act_V_fnc"),
        )
        return 8, "embed8", edge, value

    if kind.kind == "avg_ext":
        for name in kind.basis:
            if name != "sign" and name not in registry:
                raise ConstructionError(f"extension {name!r} is not registered")
        m = max([2] + [basis_arity(registry, name) for name in kind.basis])
        edge = LayerSpec(
            heads=tuple([_head("att_E_dp", "WS/avg"), _head("att_V_dp", "WS/avg")] + _unused(m - 1, "WS/avg")),
            activation=BuiltinActivation("act_E_semi"),
        )
        value = LayerSpec(
            heads=tuple([_head("att_V_dp", "WS/avg")] + [_head(f"att_B({n})", "WS/avg") for n in range(1, m + 1)]),
            activation=BuiltinActivation("act_V_ext", kind.basis),
        )
        return 8, "embed8", edge, value

    edge = LayerSpec(
        heads=tuple([_head("att_E_dp", "WS/avg"), _head("att_V_dp", "WS/avg")] + _unused(4, "WS/avg")),
        activation=BuiltinActivation("act_E_semi"),
    )
    value = LayerSpec(
        heads=(
            _head("att_V_dp", "WS/avg"),
            _head("att_B(1)", "WS/avg"),
            _head("att_B(2)", "WS/avg"),
            _head("att_z_plus", "WS/avg"),
            _head("att_z_minus", "WS/avg"),
            _head("att_sign", "WS/avg"),
        ),
        activation=BuiltinActivation("act_V_sign"),
    )
    return 9, "embed9", edge, value


def build(kind: ConstructionKind, registry: Optional[ExtensionRegistry] = None) -> TransformerConfig:
    """
    Трансформер из 2K слоёв для заданной конструкции.

    Raises:
        ConstructionError: незарегистрированное расширение в базисе
    """

    registry = registry or DEFAULT_EXTENSIONS
    dim, embedding, edge, value = _block(kind, registry)
    try:
        cfg = TransformerConfig(
            dim=dim,
            layers=(edge, value) * kind.depth,
            input_embedding=embedding,
            charfin=kind.charfin,
            gate_types=kind.gate_types,
        )
    except EngineError as exc:
        raise ConstructionError(str(exc)) from exc
    logger.info("Построена конструкция %s: dim %d, %d слоёв", kind.label, dim, len(cfg.layers))
    return cfg
