"""
Обобщённый трансформер: спецификации, встроенные функции, пулинг, исполнитель, формат конфигурации.
"""

from .specs import (
    ACTIVATION_BUILTINS,
    ATTENTION_BUILTINS,
    EMBEDDINGS,
    POOL_FAMILIES,
    SCORE_TRANSFORMS,
    BuiltinActivation,
    BuiltinAttention,
    DotProduct,
    EngineError,
    HeadSpec,
    HostCircuit,
    LayerSpec,
    PoolingSpec,
    TransformerConfig,
    split_call,
)
from .builtins import (
    EqualityScore,
    FormulaContext,
    activation_formula,
    activation_reads,
    attention_formula,
    basis_arity,
    check_activation,
    check_attention,
    check_attention_dim,
    dot_product_realization,
    equality_realization,
    ext_arities,
)
from .pooling import argmax_set, pool, pool_weighted, score_transform, transform_support
from .runner import (
    ExecutionTrace,
    HeadTrace,
    LayerTrace,
    ScoreMatrix,
    apply_activation,
    attention_matrix,
    run,
    score_matrix,
)
from .config_io import ConfigFormatError, dump_config, load_config, parse_config, save_config

__all__ = [
    "ACTIVATION_BUILTINS",
    "ATTENTION_BUILTINS",
    "EMBEDDINGS",
    "POOL_FAMILIES",
    "SCORE_TRANSFORMS",
    "BuiltinActivation",
    "BuiltinAttention",
    "DotProduct",
    "EngineError",
    "HeadSpec",
    "HostCircuit",
    "LayerSpec",
    "PoolingSpec",
    "TransformerConfig",
    "split_call",
    "EqualityScore",
    "FormulaContext",
    "activation_formula",
    "activation_reads",
    "attention_formula",
    "basis_arity",
    "check_activation",
    "check_attention",
    "check_attention_dim",
    "dot_product_realization",
    "equality_realization",
    "ext_arities",
    "argmax_set",
    "pool",
    "pool_weighted",
    "score_transform",
    "transform_support",
    "ExecutionTrace",
    "HeadTrace",
    "LayerTrace",
    "ScoreMatrix",
    "apply_activation",
    "attention_matrix",
    "run",
    "score_matrix",
    "ConfigFormatError",
    "dump_config",
    "load_config",
    "parse_config",
    "save_config",
]
