"""
Встроенные внимания и активации по имени, над точными числами.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence, Tuple

from circuit import DEFAULT_EXTENSIONS, ExtensionRegistry
from encoding import CORE_TYPE_NAMES, TypeConstants
from engine import (
    BuiltinActivation,
    BuiltinAttention,
    EngineError,
    FormulaContext,
    activation_formula,
    attention_formula,
    check_activation,
    check_attention_dim,
)
from numerics import ExactArith


def builtin_attention(name: str, x: Sequence, y: Sequence) -> Fraction:
    """`builtin_attention("att_B(2)", x, y)`; размерность x и y должна подходить имени."""

    spec = BuiltinAttention.parse(name)
    if len(x) != len(y):
        raise EngineError(f"{spec.label}: vectors of dimensions {len(x)} and {len(y)}")
    check_attention_dim(spec, len(x))
    xs = [Fraction(v) for v in x]
    ys = [Fraction(v) for v in y]
    return Fraction(attention_formula(ExactArith(), spec, xs, ys))


def builtin_activation(
    name: str,
    inputs: Sequence[Sequence],
    gate_types: Tuple[str, ...] = CORE_TYPE_NAMES,
    charfin: str = "zero",
    registry: Optional[ExtensionRegistry] = None,
) -> Tuple[Fraction, ...]:
    registry = registry or DEFAULT_EXTENSIONS
    spec = BuiltinActivation.parse(name)
    dims = {len(vec) for vec in inputs}
    if len(dims) != 1:
        raise EngineError(f"{spec.label}: inputs of different dimensions {sorted(dims)}")
    check_activation(spec, len(inputs), dims.pop(), registry)
    ctx = FormulaContext(TypeConstants.for_registry(registry), tuple(gate_types), charfin, registry)
    vectors = [[Fraction(v) for v in vec] for vec in inputs]
    return tuple(Fraction(v) for v in activation_formula(ExactArith(ext_call=registry.call), spec, vectors, ctx))
