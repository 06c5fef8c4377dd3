"""
Обратное направление: трансформер фиксированной длины n → арифметическая схема постоянной глубины.
"""

from .wires import CircuitBuilder, CompileError, GateArith, Provenance, Wire
from .gadgets import (
    GADGETS,
    GadgetCircuit,
    GadgetError,
    gadget_eval,
    gadget_eval_check,
    splice,
    transform_weights,
)
from .compiler import PooledVector, compile, compile_with_provenance

__all__ = [
    "CircuitBuilder",
    "CompileError",
    "GateArith",
    "Provenance",
    "Wire",
    "GADGETS",
    "GadgetCircuit",
    "GadgetError",
    "gadget_eval",
    "gadget_eval_check",
    "splice",
    "transform_weights",
    "PooledVector",
    "compile",
    "compile_with_provenance",
]
