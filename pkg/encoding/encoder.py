"""
Кодирование E_C: схема + входной вектор → последовательность 5-мерных векторов.

Один вектор на каждый гейт-источник (константа/вход) и по одному на каждое ребро.
Канонический порядок: векторы гейтов по возрастанию индекса, затем рёбра
по (индекс приёмника, α).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple

from circuit import Circuit, Constant, Input, Plus, Times
from numerics import ExactArith, charfin_via, to_rational

from .type_config import (
    DEFAULT_TYPES,
    I,
    S,
    SUPPORTED_DIMS,
    T,
    V,
    EncodingError,
    TypeConstants,
)

logger = logging.getLogger(__name__)

EncodedVector = Tuple[Fraction, ...]

_EXACT = ExactArith()


@dataclass(frozen=True)
class EncodedSequence:
    dim: int
    vectors: Tuple[EncodedVector, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vectors", tuple(tuple(Fraction(x) for x in vec) for vec in self.vectors))
        if self.dim < 1:
            raise EncodingError(f"dimension must be positive, got {self.dim}")
        for vec in self.vectors:
            if len(vec) != self.dim:
                raise EncodingError(f"vector {vec} does not have dimension {self.dim}")

    def __len__(self) -> int:
        return len(self.vectors)

    def column(self, component: int) -> Tuple[Fraction, ...]:
        return tuple(vec[component] for vec in self.vectors)


def node_vector(idx: int, type_value: Fraction, value: Fraction) -> EncodedVector:
    return (Fraction(idx), Fraction(0), Fraction(0), Fraction(type_value), Fraction(value))


def edge_vector(dst: int, src: int, alpha: int, type_value: Fraction) -> EncodedVector:
    return (Fraction(dst), Fraction(src), Fraction(alpha), Fraction(type_value), Fraction(0))


def encode(c: Circuit, u: Sequence, types: Optional[TypeConstants] = None) -> EncodedSequence:
    """
    Строит E_C(c, u).

    Raises:
        EncodingError: число входов не совпадает, тип гейта не имеет константы
            или у гейта + / × нет входящих рёбер
    """

    types = types or DEFAULT_TYPES
    if len(u) != c.num_inputs:
        raise EncodingError(f"circuit has {c.num_inputs} inputs, got {len(u)} values")
    values = [to_rational(x) for x in u]
    empty = sorted(idx for idx, label in c.gates if isinstance(label, (Plus, Times)) and c.fan_in(idx) == 0)
    if empty:
        raise EncodingError(f"gates {empty} have fan-in 0 and no vector in the encoding")

    vectors: List[EncodedVector] = []
    for idx, label in sorted(c.gates, key=lambda item: item[0]):
        if isinstance(label, Constant):
            vectors.append(node_vector(idx, types["const"], label.value))
        elif isinstance(label, Input):
            vectors.append(node_vector(idx, types["input"], values[label.k - 1]))
    for edge in sorted(c.edges, key=lambda e: (e.dst, e.alpha)):
        vectors.append(edge_vector(edge.dst, edge.src, edge.alpha, types.of_label(c.labels[edge.dst])))

    logger.debug("E_C: %d векторов (%d рёбер)", len(vectors), len(c.edges))
    return EncodedSequence(dim=5, vectors=tuple(vectors))


def decode_outputs(n_outputs: int, final: EncodedSequence, types: Optional[TypeConstants] = None) -> Tuple[Fraction, ...]:
    """v-компоненты векторов с t = t_output, по возрастанию s."""

    types = types or DEFAULT_TYPES
    t_output = types["output"]
    found = sorted((vec[S], vec[V]) for vec in final.vectors if vec[T] == t_output)
    if len(found) != n_outputs:
        raise EncodingError(f"expected {n_outputs} output vectors, found {len(found)}")
    return tuple(v for _, v in found)


def embed_components(
    ops: Any,
    x: Sequence[Any],
    target_dim: int,
    t_output: Fraction,
    charfin_mode: str = "zero",
    type_support: Sequence[Fraction] = (),
) -> List[Any]:
    """
    f_in над произвольным арифметическим бэкендом: дописывает (one, ssq, isq, bin).

    Используется и движком (точные числа), и компилятором схем (провода).
    """

    if target_dim not in SUPPORTED_DIMS:
        raise EncodingError(f"unsupported embedding dimension {target_dim}")
    base = list(x[:5])
    if target_dim == 5:
        return base
    extra = [ops.const(1), x[S] * x[S]]
    if target_dim >= 8:
        extra.append(x[I] * x[I])
    if target_dim == 9:
        extra.append(charfin_via(ops, t_output, x[T], charfin_mode, type_support))
    return base + extra


def embed(
    seq: EncodedSequence,
    target_dim: int,
    types: Optional[TypeConstants] = None,
    charfin_mode: str = "zero",
    type_names: Sequence[str] = (),
) -> EncodedSequence:
    """Входной эмбеддинг 5 → 7 | 8 | 9."""

    if seq.dim != 5:
        raise EncodingError(f"embedding expects a dim-5 sequence, got dim {seq.dim}")
    types = types or DEFAULT_TYPES
    support = types.support(type_names) if charfin_mode == "lagrange" else ()
    vectors = tuple(
        tuple(embed_components(_EXACT, vec, target_dim, types["output"], charfin_mode, support))
        for vec in seq.vectors
    )
    return EncodedSequence(dim=target_dim, vectors=vectors)


def permute(seq: EncodedSequence, order: Sequence[int]) -> EncodedSequence:
    """order[j] — позиция исходного вектора, который становится j-м."""

    if sorted(order) != list(range(len(seq))):
        raise EncodingError("order must be a permutation of sequence positions")
    return EncodedSequence(dim=seq.dim, vectors=tuple(seq.vectors[j] for j in order))
