"""
Кодирование E_C схем в последовательности векторов и обратное чтение выходов.
"""

from .type_config import (
    BIN,
    COMPONENT_NAMES,
    CORE_TYPE_NAMES,
    DEFAULT_TYPES,
    I,
    ISQ,
    ONE,
    P,
    S,
    SSQ,
    SUPPORTED_DIMS,
    T,
    V,
    EncodingError,
    TypeConstants,
)
from .encoder import (
    EncodedSequence,
    EncodedVector,
    decode_outputs,
    edge_vector,
    embed,
    embed_components,
    encode,
    node_vector,
    permute,
)
from .sequence_io import SequenceFormatError, dump_sequence, load_sequence, parse_sequence, save_sequence

__all__ = [
    "BIN",
    "COMPONENT_NAMES",
    "CORE_TYPE_NAMES",
    "DEFAULT_TYPES",
    "I",
    "ISQ",
    "ONE",
    "P",
    "S",
    "SSQ",
    "SUPPORTED_DIMS",
    "T",
    "V",
    "EncodingError",
    "TypeConstants",
    "EncodedSequence",
    "EncodedVector",
    "decode_outputs",
    "edge_vector",
    "embed",
    "embed_components",
    "encode",
    "node_vector",
    "permute",
    "SequenceFormatError",
    "dump_sequence",
    "load_sequence",
    "parse_sequence",
    "save_sequence",
]
