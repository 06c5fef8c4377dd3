"""
Встроенные функции внимания и активации.

Формулы записаны над арифметическим бэкендом (numerics.ExactArith или провода схемы),
поэтому одно и то же определение и исполняется движком, и компилируется в схему.
Скалярные внимания с точечным произведением дополнительно имеют явную
DPA-реализацию (матрицы A, B), которой пользуется исполнитель.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

from circuit import DEFAULT_EXTENSIONS, ExtensionRegistry
from encoding import BIN, I, ISQ, ONE, P, S, SSQ, T, V, TypeConstants
from numerics import charfin_via, zero_via

from .specs import BuiltinActivation, BuiltinAttention, DotProduct, EngineError, HostCircuit

logger = logging.getLogger(__name__)

# минимальная размерность, на которой определено встроенное внимание
ATTENTION_MIN_DIM: Dict[str, int] = {
    "att_E_eq": 5,
    "att_V_eq": 5,
    "att_E_dp": 7,
    "att_V_dp": 7,
    "att_B": 8,
    "att_z_plus": 8,
    "att_z_minus": 8,
    "att_sign": 9,
}

# число аргументов активации (H + 1) и минимальная размерность
ACTIVATION_MIN_INPUTS: Dict[str, int] = {
    "act_first": 1,
    "act_E_gen": 2,
    "act_V_gen": 3,
    "act_E_avg": 3,
    "act_V_avg": 3,
    "act_E_semi": 3,
    "act_V_semi": 4,
    "act_E_fnc": 2,
    "act_V_fnc": 3,
    "act_V_ext": 2,
    "act_V_sign": 7,
}

ACTIVATION_MIN_DIM: Dict[str, int] = {"act_first": 1, "act_V_sign": 9}

SOURCE_TYPES = ("const", "input")


@dataclass(frozen=True)
class FormulaContext:
    """Всё, что нужно активациям помимо входов: константы типов, носитель T, вид χ, реестр."""

    types: TypeConstants
    gate_types: Tuple[str, ...]
    charfin: str = "zero"
    registry: ExtensionRegistry = DEFAULT_EXTENSIONS

    @classmethod
    def for_config(cls, cfg, registry: Optional[ExtensionRegistry] = None) -> "FormulaContext":
        registry = registry or DEFAULT_EXTENSIONS
        return cls(
            types=TypeConstants.for_registry(registry),
            gate_types=tuple(cfg.gate_types),
            charfin=cfg.charfin,
            registry=registry,
        )

    @cached_property
    def support(self) -> Tuple[Fraction, ...]:
        return self.types.support(self.gate_types)

    def chi(self, ops: Any, names: Sequence[str], t: Any) -> Optional[Any]:
        """Σ χ_T^{t_name}(t) по именам, входящим в T; None если ни одного."""

        terms = [
            charfin_via(ops, self.types[name], t, self.charfin, self.support)
            for name in names
            if name in self.gate_types
        ]
        if not terms:
            return None
        return terms[0] if len(terms) == 1 else ops.total(terms)

    def arity(self, name: str) -> int:
        return basis_arity(self.registry, name)


# region attention ----------------------------------------------------------------
def _rows(dim: int, terms: Sequence[Tuple[Dict[int, Fraction], Dict[int, Fraction]]]) -> DotProduct:
    """Матрицы A, B по списку слагаемых (a·x)(b·y); строка r — r-е слагаемое."""

    a = [[Fraction(0)] * dim for _ in range(dim)]
    b = [[Fraction(0)] * dim for _ in range(dim)]
    for r, (a_row, b_row) in enumerate(terms):
        for comp, coef in a_row.items():
            a[r][comp] = Fraction(coef)
        for comp, coef in b_row.items():
            b[r][comp] = Fraction(coef)
    return DotProduct(A=tuple(map(tuple, a)), B=tuple(map(tuple, b)))


def check_attention_dim(spec: BuiltinAttention, dim: int) -> None:
    need = ATTENTION_MIN_DIM[spec.name]
    if dim < need:
        raise EngineError(f"{spec.label} needs dimension >= {need}, got {dim}")


def check_attention(spec: Any, dim: int) -> None:
    """Проверки головы, не зависящие от входа: размерность встроенного внимания, арность схемы."""

    if isinstance(spec, BuiltinAttention):
        check_attention_dim(spec, dim)
    elif isinstance(spec, HostCircuit):
        if spec.circuit.num_inputs != 2 * dim or spec.circuit.num_outputs != 1:
            raise EngineError(f"attention circuit must map {2 * dim} inputs to 1 output")


@lru_cache(maxsize=None)
def dot_product_realization(spec: BuiltinAttention, dim: int) -> Optional[DotProduct]:
    """
    Эквивалентное DPA для скалярных встроенных вниманий; None для eq-вниманий,
    которые выражаются через zero.
    """

    check_attention_dim(spec, dim)
    name = spec.name
    if name == "att_E_dp":
        return _rows(dim, [({P: 2}, {S: 1}), ({ONE: 1}, {SSQ: -1})])
    if name == "att_V_dp":
        return _rows(dim, [({S: 2}, {S: 1}), ({ONE: 1}, {SSQ: -1})])
    if name == "att_B":
        n = spec.param
        return _rows(dim, [({S: 2}, {S: 1}), ({ONE: 1}, {SSQ: -1, I: 2 * n, ISQ: -1})])
    if name in ("att_z_plus", "att_z_minus"):
        direction = 1 if name == "att_z_plus" else -1
        return _rows(dim, [({V: direction}, {S: 1}), ({ONE: 1}, {S: 3, SSQ: -1, I: 1, ISQ: -1})])
    if name == "att_sign":
        return _rows(dim, [({V: 1}, {BIN: 1})])
    return None


@dataclass(frozen=True)
class EqualityScore:
    """
    Скор eq-внимания: 1, если x[query] = y[key] и (при заданном key_flag) y[key_flag] ∈ {0, 1}, иначе 0.
    """

    query: int
    key: int
    key_flag: Optional[int] = None

    def key_of(self, y: Sequence[Any]) -> Optional[Any]:
        """Значение ключа позиции; None, если позиция не совпадает ни с одним запросом."""

        if self.key_flag is not None and y[self.key_flag] not in (0, 1):
            return None
        return y[self.key]


def equality_realization(spec: BuiltinAttention, dim: int) -> Optional[EqualityScore]:
    """Запись att_E_eq / att_V_eq сравнением компонент; None для остальных вниманий."""

    check_attention_dim(spec, dim)
    if spec.name == "att_E_eq":
        return EqualityScore(query=P, key=S, key_flag=I)
    if spec.name == "att_V_eq":
        return EqualityScore(query=S, key=S)
    return None


def attention_formula(ops: Any, spec: BuiltinAttention, x: Sequence[Any], y: Sequence[Any]) -> Any:
    """Скор встроенного внимания в исходной записи (квадраты разностей, zero)."""

    name = spec.name
    if name == "att_E_eq":
        # совпадение с вектором-узлом предшественника или с его первым входящим ребром
        return zero_via(ops, x[P] - y[S]) * zero_via(ops, y[I] * y[I] - y[I])
    if name == "att_V_eq":
        return zero_via(ops, x[S] - y[S])
    if name == "att_E_dp":
        return x[P] * x[P] - (y[S] - x[P]) * (y[S] - x[P])
    if name == "att_V_dp":
        return x[S] * x[S] - (y[S] - x[S]) * (y[S] - x[S])
    if name == "att_B":
        n = spec.param
        return x[S] * x[S] - (y[S] - x[S]) * (y[S] - x[S]) + (n * n - (y[I] - n) * (y[I] - n))
    if name in ("att_z_plus", "att_z_minus"):
        direction = 1 if name == "att_z_plus" else -1
        s_term = Fraction(9, 4) - (y[S] - Fraction(3, 2)) * (y[S] - Fraction(3, 2))
        i_term = Fraction(1, 4) - (y[I] - Fraction(1, 2)) * (y[I] - Fraction(1, 2))
        return (x[V] * y[S]) * direction + s_term + i_term
    if name == "att_sign":
        return x[V] * y[BIN]
    raise EngineError(f"no formula for {spec.label}")


# endregion


# region activation ---------------------------------------------------------------
def _with_value(x: Sequence[Any], value: Any) -> List[Any]:
    out = list(x)
    out[V] = value
    return out


def _combine(ops: Any, terms: Sequence[Tuple[Optional[Any], Any]]) -> Any:
    """Σ χ·значение по слагаемым, у которых χ определён."""

    parts = [chi * value for chi, value in terms if chi is not None]
    if not parts:
        return ops.const(0)
    return parts[0] if len(parts) == 1 else ops.total(parts)


def _extension_types(ctx: FormulaContext) -> List[str]:
    core = {"const", "input", "output", "plus", "times", "sign"}
    return [name for name in ctx.gate_types if name not in core]


def _activation_inputs(spec: BuiltinActivation, registry: ExtensionRegistry) -> int:
    if spec.name == "act_V_ext":
        return 2 + ext_arities(spec, registry)
    return ACTIVATION_MIN_INPUTS[spec.name]


def check_activation(spec: BuiltinActivation, n_inputs: int, dim: int, registry: ExtensionRegistry) -> None:
    need = _activation_inputs(spec, registry)
    if n_inputs < need:
        raise EngineError(f"{spec.label} needs at least {need} inputs, got {n_inputs}")
    min_dim = ACTIVATION_MIN_DIM.get(spec.name, 5)
    if dim < min_dim:
        raise EngineError(f"{spec.label} needs dimension >= {min_dim}, got {dim}")


def activation_reads(spec: Any, n_heads: int, registry: ExtensionRegistry) -> int:
    """
    Сколько первых голов слоя читает активация.

    Встроенные активации читают фиксированный префикс; остальные головы на выход слоя
    не влияют. Активация-схема читает все головы.
    """

    if not isinstance(spec, BuiltinActivation):
        return n_heads
    return min(n_heads, _activation_inputs(spec, registry) - 1)


def activation_formula(
    ops: Any, spec: BuiltinActivation, inputs: Sequence[Sequence[Any]], ctx: FormulaContext
) -> List[Any]:
    """
    Выход активации: все компоненты первого аргумента, кроме v, который задаётся формулой.

    Args:
        ops: арифметический бэкенд
        spec: встроенная активация
        inputs: (x, выходы голов 1..H)
        ctx: константы типов и вид χ
    """

    name = spec.name
    x = inputs[0]
    if name == "act_first":
        return list(x)

    t = x[T]
    chi_src = ctx.chi(ops, SOURCE_TYPES, t)

    if name == "act_E_gen":
        y = inputs[1]
        value = _combine(ops, [(chi_src, x[V]), (ctx.chi(ops, ("output", "plus", "times"), t), y[V])])
    elif name == "act_E_avg":
        y, z = inputs[1], inputs[2]
        count = z[I] * 2 - 1
        value = _combine(ops, [(chi_src, x[V]), (ctx.chi(ops, ("output", "plus", "times"), t), count * y[V])])
    elif name == "act_E_semi":
        y, z = inputs[1], inputs[2]
        count = z[I] * 2 - 1
        unscaled = ["times", "sign"] + _extension_types(ctx)
        value = _combine(
            ops,
            [
                (chi_src, x[V]),
                (ctx.chi(ops, ("output", "plus"), t), count * y[V]),
                (ctx.chi(ops, unscaled, t), y[V]),
            ],
        )
    elif name == "act_E_fnc":
        y = inputs[1]
        value = _combine(ops, [(chi_src, x[V]), (ctx.chi(ops, ("output", "plus", "times"), t), y[V])])
    elif name in ("act_V_gen", "act_V_avg"):
        plus, times = inputs[1], inputs[2]
        value = _combine(
            ops,
            [
                (chi_src, x[V]),
                (ctx.chi(ops, ("output", "plus"), t), plus[V]),
                (ctx.chi(ops, ("times",), t), times[V]),
            ],
        )
    elif name == "act_V_fnc":
        first, second = inputs[1], inputs[2]
        value = _combine(
            ops,
            [
                (chi_src, x[V]),
                (ctx.chi(ops, ("output",), t), first[V]),
                (ctx.chi(ops, ("plus",), t), first[V] + second[V]),
                (ctx.chi(ops, ("times",), t), first[V] * second[V]),
            ],
        )
    elif name in ("act_V_semi", "act_V_ext", "act_V_sign"):
        plus, first, second = inputs[1], inputs[2], inputs[3]
        terms = [
            (chi_src, x[V]),
            (ctx.chi(ops, ("output", "plus"), t), plus[V]),
            (ctx.chi(ops, ("times",), t), first[V] * second[V]),
        ]
        if name == "act_V_ext":
            fetched = inputs[2:]
            for b in spec.basis:
                arity = ctx.arity(b)
                if arity > len(fetched):
                    raise EngineError(f"{b} has arity {arity}, only {len(fetched)} fetch heads")
                terms.append((ctx.chi(ops, (b,), t), ops.ext(b, [vec[V] for vec in fetched[:arity]])))
        if name == "act_V_sign":
            u_plus, u_minus, u_sign = inputs[4], inputs[5], inputs[6]
            zero_v = (u_plus[S] - 1) * (u_minus[S] - 1) * 4
            sign_v = (1 - zero_v) * (u_sign[BIN] * 2 - 1)
            terms.append((ctx.chi(ops, ("sign",), t), sign_v))
        value = _combine(ops, terms)
    else:
        raise EngineError(f"no formula for {spec.label}")
    return _with_value(x, value)


# endregion


def ext_arities(spec: BuiltinActivation, registry: ExtensionRegistry) -> int:
    """Максимальная арность базиса act_V_ext (не меньше 2 для ×)."""
    return max([2] + [basis_arity(registry, b) for b in spec.basis])


def basis_arity(registry: ExtensionRegistry, name: str) -> int:
    """Арность функции базиса; sign встроен и всегда унарен."""
    return 1 if name == "sign" else registry.arity(name)
