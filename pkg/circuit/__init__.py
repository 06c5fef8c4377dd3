"""
Арифметические схемы над Q: модель, текстовый формат, проверка, вычисление, генерация.
"""

from .model import (
    CIRCUIT_CLASSES,
    Circuit,
    CircuitError,
    CircuitMetrics,
    Constant,
    Edge,
    Extension,
    GateLabel,
    Input,
    Output,
    Plus,
    Sign,
    Times,
    label_kind,
    normalize_class,
)
from .extensions import DEFAULT_EXTENSIONS, ExtensionRegistry, UnknownExtensionError, default_registry
from .circuit_io import (
    CircuitFormatError,
    dump_circuit,
    format_values,
    load_circuit,
    parse_circuit,
    parse_inputs,
    save_circuit,
)
from .evaluator import (
    EvaluationError,
    EvaluationPlan,
    compile_plan,
    evaluate,
    evaluate_many,
    gate_depths,
    metrics,
)
from .structure_validator import ValidationReport, Violation, validate
from .transforms import binarize, canonicalize, compact, permute_alpha, prune, relabel, with_output_order
from .generator import InfeasibleSpecError, RandomCircuitSpec, random_circuit, random_inputs, random_rational

__all__ = [
    "CIRCUIT_CLASSES",
    "Circuit",
    "CircuitError",
    "CircuitMetrics",
    "Constant",
    "Edge",
    "Extension",
    "GateLabel",
    "Input",
    "Output",
    "Plus",
    "Sign",
    "Times",
    "label_kind",
    "normalize_class",
    "DEFAULT_EXTENSIONS",
    "ExtensionRegistry",
    "UnknownExtensionError",
    "default_registry",
    "CircuitFormatError",
    "dump_circuit",
    "format_values",
    "load_circuit",
    "parse_circuit",
    "parse_inputs",
    "save_circuit",
    "EvaluationError",
    "evaluate",
    "evaluate_many",
    "EvaluationPlan",
    "compile_plan",
    "gate_depths",
    "metrics",
    "ValidationReport",
    "Violation",
    "validate",
    "binarize",
    "canonicalize",
    "compact",
    "permute_alpha",
    "prune",
    "relabel",
    "with_output_order",
    "InfeasibleSpecError",
    "RandomCircuitSpec",
    "random_circuit",
    "random_inputs",
    "random_rational",
]
