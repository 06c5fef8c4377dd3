"""
Описание обобщённого трансформера: внимание, пулинг, активации, слои, эмбеддинги.

Все спецификации неизменяемые; строковые имена совпадают с синтаксисом файла конфигурации.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

from circuit import Circuit

Matrix = Tuple[Tuple[Fraction, ...], ...]

POOL_FAMILIES: Tuple[str, ...] = ("WS", "WP")
SCORE_TRANSFORMS: Tuple[str, ...] = ("id", "avg", "hardleft", "hardright")
EMBEDDINGS: Dict[str, int] = {"identity": 0, "embed7": 7, "embed8": 8, "embed9": 9}

ATTENTION_BUILTINS: Tuple[str, ...] = (
    "att_E_eq",
    "att_V_eq",
    "att_E_dp",
    "att_V_dp",
    "att_B",
    "att_z_plus",
    "att_z_minus",
    "att_sign",
)

ACTIVATION_BUILTINS: Tuple[str, ...] = (
    "act_E_gen",
    "act_V_gen",
    "act_E_avg",
    "act_V_avg",
    "act_E_semi",
    "act_V_semi",
    "act_E_fnc",
    "act_V_fnc",
    "act_V_ext",
    "act_V_sign",
    "act_first",
)

_CALL_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\(([^()]*)\))?$")


class EngineError(Exception):
    """Конфигурация трансформера некорректна или не подходит ко входу."""


def split_call(text: str) -> Tuple[str, Tuple[str, ...]]:
    """`att_B(2)` → ("att_B", ("2",)); `act_V_ext(relu,sign)` → ("act_V_ext", ("relu", "sign"))."""

    match = _CALL_RE.match(text.strip())
    if match is None:
        raise EngineError(f"cannot parse builtin name {text!r}")
    name, args = match.groups()
    return name, tuple(a.strip() for a in args.split(",")) if args else ()


# region attention ---------------------------------------------------------------
@dataclass(frozen=True)
class DotProduct:
    """Скор (A·x)·(B·y) с квадратными матрицами A, B."""

    A: Matrix
    B: Matrix

    def __post_init__(self) -> None:
        a = tuple(tuple(Fraction(v) for v in row) for row in self.A)
        b = tuple(tuple(Fraction(v) for v in row) for row in self.B)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        d = len(a)
        if len(b) != d or any(len(row) != d for row in a + b):
            raise EngineError("DotProduct matrices must be square of the same size")

    @property
    def dim(self) -> int:
        return len(self.A)

    @property
    def label(self) -> str:
        return "dpa"


@dataclass(frozen=True)
class BuiltinAttention:
    name: str
    param: Optional[int] = None

    def __post_init__(self) -> None:
        if self.name not in ATTENTION_BUILTINS:
            raise EngineError(f"unknown attention builtin {self.name!r}")
        if (self.name == "att_B") != (self.param is not None):
            raise EngineError("att_B takes exactly one positive integer parameter")
        if self.param is not None and self.param < 1:
            raise EngineError(f"att_B parameter must be >= 1, got {self.param}")

    @classmethod
    def parse(cls, text: str) -> "BuiltinAttention":
        name, args = split_call(text)
        if name == "att_B":
            if len(args) != 1 or not args[0].isdigit():
                raise EngineError(f"bad att_B parameter in {text!r}")
            return cls(name, int(args[0]))
        if args:
            raise EngineError(f"{name} takes no parameters")
        return cls(name)

    @property
    def label(self) -> str:
        return f"{self.name}({self.param})" if self.param is not None else self.name


@dataclass(frozen=True)
class HostCircuit:
    """
    Функция, заданная самостоятельной схемой (входы → выходы).

    Для внимания: 2d входов и 1 выход; для активации: (H+1)·d входов и d выходов;
    для входного эмбеддинга: d_in входов и d выходов.
    """

    circuit: Circuit
    path: str = ""

    @property
    def label(self) -> str:
        return f"circuit {self.path}" if self.path else "circuit"


AttentionSpec = Union[DotProduct, BuiltinAttention, HostCircuit]
# endregion


@dataclass(frozen=True)
class PoolingSpec:
    family: str = "WS"
    transform: str = "id"

    def __post_init__(self) -> None:
        if self.family not in POOL_FAMILIES:
            raise EngineError(f"unknown pooling family {self.family!r}")
        if self.transform not in SCORE_TRANSFORMS:
            raise EngineError(f"unknown score transform {self.transform!r}")

    @classmethod
    def parse(cls, text: str) -> "PoolingSpec":
        family, _, transform = text.partition("/")
        return cls(family, transform or "id")

    @property
    def label(self) -> str:
        return f"{self.family}/{self.transform}"


@dataclass(frozen=True)
class BuiltinActivation:
    name: str
    basis: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.name not in ACTIVATION_BUILTINS:
            raise EngineError(f"unknown activation builtin {self.name!r}")
        if self.basis and self.name != "act_V_ext":
            raise EngineError(f"{self.name} takes no basis")

    @classmethod
    def parse(cls, text: str) -> "BuiltinActivation":
        name, args = split_call(text)
        return cls(name, args)

    @property
    def label(self) -> str:
        return f"{self.name}({','.join(self.basis)})" if self.name == "act_V_ext" else self.name


ActivationSpec = Union[BuiltinActivation, HostCircuit]
EmbeddingSpec = Union[str, HostCircuit]


@dataclass(frozen=True)
class HeadSpec:
    attention: AttentionSpec
    pooling: PoolingSpec = PoolingSpec()


@dataclass(frozen=True)
class LayerSpec:
    heads: Tuple[HeadSpec, ...]
    activation: ActivationSpec

    def __post_init__(self) -> None:
        object.__setattr__(self, "heads", tuple(self.heads))
        if not self.heads:
            raise EngineError("a layer needs at least one attention head")


@dataclass(frozen=True)
class TransformerConfig:
    dim: int
    layers: Tuple[LayerSpec, ...]
    input_embedding: EmbeddingSpec = "identity"
    # (i, n) → вектор размерности dim; при пустой таблице позиционный эмбеддинг нулевой
    positional: Tuple[Tuple[Tuple[int, int], Tuple[Fraction, ...]], ...] = ()
    charfin: str = "zero"
    gate_types: Tuple[str, ...] = ("const", "input", "output", "plus", "times")

    def __post_init__(self) -> None:
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.dim < 1:
            raise EngineError(f"dimension must be positive, got {self.dim}")
        if self.charfin not in ("zero", "lagrange"):
            raise EngineError(f"charfin must be zero or lagrange, got {self.charfin!r}")
        if isinstance(self.input_embedding, str):
            if self.input_embedding not in EMBEDDINGS:
                raise EngineError(f"unknown input embedding {self.input_embedding!r}")
            target = EMBEDDINGS[self.input_embedding]
            if target and target != self.dim:
                raise EngineError(f"{self.input_embedding} produces dim {target}, config has dim {self.dim}")
        for (_, _), vec in self.positional:
            if len(vec) != self.dim:
                raise EngineError("positional embedding vectors must have the config dimension")
        for layer in self.layers:
            for head in layer.heads:
                if isinstance(head.attention, DotProduct) and head.attention.dim != self.dim:
                    raise EngineError(f"DotProduct of size {head.attention.dim} in a dim-{self.dim} config")

    @property
    def input_dim(self) -> int:
        """Размерность входных векторов (до эмбеддинга)."""

        if isinstance(self.input_embedding, HostCircuit):
            return self.input_embedding.circuit.num_inputs
        return 5 if self.input_embedding != "identity" else self.dim

    def positional_table(self) -> Dict[Tuple[int, int], Tuple[Fraction, ...]]:
        return {key: tuple(Fraction(v) for v in vec) for key, vec in self.positional}
