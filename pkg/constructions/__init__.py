"""
Трансформеры, моделирующие арифметические схемы, и запуск моделирования.
"""

from .builders import CLI_NAMES, FNC_POOLS, KINDS, ConstructionError, ConstructionKind, build, parse_kind
from .formulas import builtin_activation, builtin_attention
from .simulate import (
    KIND_CLASSES,
    AdmissibilityError,
    SignReadout,
    admissibility_problems,
    check_admissible,
    sign_readout,
    simulate,
    simulate_sequence,
)

__all__ = [
    "CLI_NAMES",
    "FNC_POOLS",
    "KINDS",
    "ConstructionError",
    "ConstructionKind",
    "build",
    "parse_kind",
    "builtin_activation",
    "builtin_attention",
    "KIND_CLASSES",
    "AdmissibilityError",
    "SignReadout",
    "admissibility_problems",
    "check_admissible",
    "sign_readout",
    "simulate",
    "simulate_sequence",
]
