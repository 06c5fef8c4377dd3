"""
Исполнитель обобщённого трансформера над точными рациональными числами.

Y⁰_i = f_in(x_i) + f_pos(i, n); на слое k каждая голова h считает матрицу
a^{k,h}_{i,j} = f_att(Y^{k−1}_i, Y^{k−1}_j), пулинг даёт Z^{k,h}_i, активация — Y^k_i.

Внутри прохода целые компоненты хранятся как int, нецелые как Fraction;
наружу (выход, трасса) значения отдаются как Fraction.
"""

from __future__ import annotations

import logging
import math
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from circuit import DEFAULT_EXTENSIONS, ExtensionRegistry, compile_plan, evaluate
from encoding import EncodedSequence, embed_components
from numerics import ExactArith, format_rational, lean_rational
from utils.settings_loader import load_settings

from .builtins import (
    EqualityScore,
    FormulaContext,
    activation_formula,
    activation_reads,
    attention_formula,
    check_activation,
    check_attention,
    dot_product_realization,
    equality_realization,
)
from .pooling import Weights, pool_weighted, transform_support
from .specs import (
    EMBEDDINGS,
    BuiltinActivation,
    BuiltinAttention,
    DotProduct,
    EngineError,
    HeadSpec,
    HostCircuit,
    TransformerConfig,
)

logger = logging.getLogger(__name__)

Vector = Tuple[Fraction, ...]
Matrix = Tuple[Tuple[Fraction, ...], ...]


@lru_cache(maxsize=1)
def default_trace_mode() -> str:
    return load_settings().trace_mode


class ScoreMatrix:
    """
    Матрица скоров одной головы в сжатом виде.

    Позиции с одинаковой проекцией запроса делят строку таблицы, с одинаковой проекцией
    ключа делят столбец: a[i][j] = table[row_keys[i]][col_keys[j]] / scale, scale > 0.
    """

    def __init__(self, row_keys: Sequence[int], col_keys: Sequence[int], table: Sequence[Sequence], scale: int = 1):
        self.row_keys = tuple(row_keys)
        self.col_keys = tuple(col_keys)
        self.table = table
        self.scale = scale
        self._positions: Dict[int, List[int]] = {}
        for j, c in enumerate(self.col_keys):
            self._positions.setdefault(c, []).append(j)
        self._rows: Dict[int, Tuple[Fraction, ...]] = {}
        self._best: Dict[int, List[int]] = {}

    def __len__(self) -> int:
        return len(self.row_keys)

    def entry(self, i: int, j: int) -> Fraction:
        return Fraction(self.table[self.row_keys[i]][self.col_keys[j]], self.scale)

    def row(self, i: int) -> Tuple[Fraction, ...]:
        r = self.row_keys[i]
        if r not in self._rows:
            values = self.table[r]
            self._rows[r] = tuple(Fraction(values[c], self.scale) for c in self.col_keys)
        return self._rows[r]

    def rows(self) -> Matrix:
        return tuple(self.row(i) for i in range(len(self.row_keys)))

    def argmax(self, i: int) -> List[int]:
        """M для строки i; позиции по возрастанию."""

        r = self.row_keys[i]
        if r not in self._best:
            values = self.table[r]
            best = max(values)
            self._best[r] = sorted(j for c, v in enumerate(values) if v == best for j in self._positions.get(c, ()))
        return self._best[r]

    def weights(self, i: int, transform: str) -> Weights:
        if transform != "id":
            return transform_support(transform, self.argmax(i))
        values = self.table[self.row_keys[i]]
        scale = self.scale
        out = []
        for j, c in enumerate(self.col_keys):
            v = values[c]
            if v:
                out.append((j, v if scale == 1 else lean_rational(Fraction(v, scale))))
        return out


def _distinct(rows: Sequence[tuple]) -> Tuple[List[int], List[tuple]]:
    index: Dict[tuple, int] = {}
    keys = [index.setdefault(row, len(index)) for row in rows]
    return keys, list(index)


def _integral(vectors: Sequence[tuple]) -> Tuple[List[Tuple[int, ...]], int]:
    """Общий знаменатель: векторы целых чисел и множитель scale."""

    scale = math.lcm(*(Fraction(x).denominator for vec in vectors for x in vec))
    if scale == 1:
        return [tuple(int(x) for x in vec) for vec in vectors], 1
    return [tuple(int(x * scale) for x in vec) for vec in vectors], scale


@lru_cache(maxsize=None)
def _dpa_terms(spec: DotProduct) -> Tuple[Tuple[Tuple[Tuple[int, object], ...], Tuple[Tuple[int, object], ...]], ...]:
    """Ненулевые слагаемые (a·x)(b·y) в виде пар списков (компонента, коэффициент)."""

    terms = []
    for a_row, b_row in zip(spec.A, spec.B):
        left = tuple((k, lean_rational(c)) for k, c in enumerate(a_row) if c)
        right = tuple((k, lean_rational(c)) for k, c in enumerate(b_row) if c)
        if left and right:
            terms.append((left, right))
    return tuple(terms)


def _dpa_scores(spec: DotProduct, Y: Sequence[tuple]) -> ScoreMatrix:
    terms = _dpa_terms(spec)
    row_keys, left = _distinct([tuple(sum(c * y[k] for k, c in a) for a, _ in terms) for y in Y])
    col_keys, right = _distinct([tuple(sum(c * y[k] for k, c in b) for _, b in terms) for y in Y])
    left, left_scale = _integral(left)
    right, right_scale = _integral(right)
    table = [[sum(map(operator.mul, lx, ry)) for ry in right] for lx in left]
    return ScoreMatrix(row_keys, col_keys, table, left_scale * right_scale)


def _equality_scores(eq: EqualityScore, Y: Sequence[tuple]) -> ScoreMatrix:
    row_keys, queries = _distinct([(y[eq.query],) for y in Y])
    col_keys, keys = _distinct([(eq.key_of(y),) for y in Y])
    table = [[1 if key[0] is not None and key[0] == query[0] else 0 for key in keys] for query in queries]
    return ScoreMatrix(row_keys, col_keys, table)


def _pointwise_scores(score: Callable[[tuple, tuple], Fraction], Y: Sequence[tuple]) -> ScoreMatrix:
    n = len(Y)
    table = [[lean_rational(Fraction(score(x, y))) for y in Y] for x in Y]
    return ScoreMatrix(range(n), range(n), table)


def score_matrix(spec, Y: Sequence[tuple], dim: int, ctx: FormulaContext, ops: ExactArith) -> ScoreMatrix:
    """Скоры одной головы в сжатом виде."""

    check_attention(spec, dim)
    if isinstance(spec, DotProduct):
        return _dpa_scores(spec, Y)
    if isinstance(spec, BuiltinAttention):
        realization = dot_product_realization(spec, dim)
        if realization is not None:
            return _dpa_scores(realization, Y)
        eq = equality_realization(spec, dim)
        if eq is not None:
            return _equality_scores(eq, Y)
        return _pointwise_scores(lambda x, y: attention_formula(ops, spec, x, y), Y)
    if isinstance(spec, HostCircuit):
        plan = compile_plan(spec.circuit, ctx.registry)
        return _pointwise_scores(lambda x, y: plan.run(list(x) + list(y))[0], Y)
    raise EngineError(f"unsupported attention spec {spec!r}")


def attention_matrix(spec, Y: Sequence[Vector], dim: int, ctx: FormulaContext, ops: ExactArith) -> Matrix:
    """n×n скоров одной головы."""
    return score_matrix(spec, [tuple(lean_rational(Fraction(x)) for x in y) for y in Y], dim, ctx, ops).rows()


class HeadTrace:
    """Скоры и пулинг одной головы; считаются при первом обращении."""

    def __init__(self, head: HeadSpec, Y: Sequence[tuple], dim: int, ctx: FormulaContext, ops: ExactArith):
        self.head = head
        self._Y = Y
        self._args = (dim, ctx, ops)
        self._scores: Optional[ScoreMatrix] = None
        self._pooled: Optional[Tuple[tuple, ...]] = None

    @property
    def scores(self) -> ScoreMatrix:
        if self._scores is None:
            self._scores = score_matrix(self.head.attention, self._Y, *self._args)
        return self._scores

    @property
    def pooled(self) -> Tuple[tuple, ...]:
        """Z_i по позициям; значения int или Fraction."""

        if self._pooled is None:
            scores, pooling = self.scores, self.head.pooling
            by_row: Dict[int, tuple] = {}
            out = []
            for i, r in enumerate(scores.row_keys):
                if r not in by_row:
                    by_row[r] = pool_weighted(pooling.family, self._Y, scores.weights(i, pooling.transform))
                out.append(by_row[r])
            self._pooled = tuple(out)
        return self._pooled


class LayerTrace:
    """Слой трассы: скоры и пулинг всех голов (включая не читаемые активацией) и выход."""

    def __init__(self, index: int, heads: Sequence[HeadTrace], output: Sequence[tuple]):
        self.index = index
        self.heads = tuple(heads)
        self._output = tuple(output)

    @property
    def attention(self) -> Tuple[Matrix, ...]:
        return tuple(head.scores.rows() for head in self.heads)

    @property
    def pooled(self) -> Tuple[Tuple[Vector, ...], ...]:
        return tuple(tuple(_as_fractions(z) for z in head.pooled) for head in self.heads)

    @property
    def output(self) -> Tuple[Vector, ...]:
        return tuple(_as_fractions(y) for y in self._output)


@dataclass
class ExecutionTrace:
    """Матрицы внимания, результаты пулинга и выходы слоёв (номера слоёв с 1)."""

    mode: str = "full"
    initial: Tuple[Vector, ...] = ()
    layers: List[LayerTrace] = field(default_factory=list)

    def layer(self, k: int) -> LayerTrace:
        for entry in self.layers:
            if entry.index == k:
                return entry
        raise EngineError(f"layer {k} is not retained in the trace (mode {self.mode})")

    def attention(self, k: int, h: int) -> Matrix:
        """a^{k,h}: строки — запрос x_i, столбцы — ключ y_j."""

        entry = self.layer(k)
        if not 1 <= h <= len(entry.heads):
            raise EngineError(f"layer {k} has {len(entry.heads)} heads, no head {h}")
        return entry.heads[h - 1].scores.rows()

    def attention_frame(self, k: int, h: int) -> pd.DataFrame:
        """Таблица скоров в раскладке «x по столбцам, y по строкам»."""

        matrix = self.attention(k, h)
        n = len(matrix)
        labels = [f"x{j}" for j in range(1, n + 1)]
        data = [[format_rational(matrix[i][j]) for i in range(n)] for j in range(n)]
        return pd.DataFrame(data, index=labels, columns=labels)


def _as_fractions(vec: Sequence) -> Vector:
    return tuple(Fraction(x) for x in vec)


def _lean(vec: Sequence) -> tuple:
    return tuple(lean_rational(Fraction(x)) for x in vec)


def _exact_ops(registry: ExtensionRegistry) -> ExactArith:
    return ExactArith(ext_call=registry.call)


def _embed(cfg: TransformerConfig, X: Sequence[tuple], ctx: FormulaContext, ops: ExactArith) -> List[tuple]:
    embedding = cfg.input_embedding
    if isinstance(embedding, HostCircuit):
        out = [evaluate(embedding.circuit, list(x), ctx.registry) for x in X]
        if any(len(vec) != cfg.dim for vec in out):
            raise EngineError(f"embedding circuit must have {cfg.dim} outputs")
        return [_lean(vec) for vec in out]
    if embedding == "identity":
        return list(X)
    support = ctx.support if cfg.charfin == "lagrange" else ()
    return [
        tuple(embed_components(ops, x, EMBEDDINGS[embedding], ctx.types["output"], cfg.charfin, support))
        for x in X
    ]


def _add_positional(cfg: TransformerConfig, Y: List[tuple]) -> List[tuple]:
    table = cfg.positional_table()
    if not table:
        return Y
    n = len(Y)
    out = []
    for i, y in enumerate(Y, 1):
        shift = table.get((i, n))
        out.append(y if shift is None else tuple(lean_rational(a + b) for a, b in zip(y, shift)))
    return out


def _activate(spec, inputs: Sequence[tuple], dim: int, ctx: FormulaContext, ops: ExactArith) -> tuple:
    if isinstance(spec, BuiltinActivation):
        return tuple(activation_formula(ops, spec, inputs, ctx))
    if isinstance(spec, HostCircuit):
        flat = [x for vec in inputs for x in vec]
        if spec.circuit.num_inputs != len(flat) or spec.circuit.num_outputs != dim:
            raise EngineError(f"activation circuit must map {len(flat)} inputs to {dim} outputs")
        return _lean(evaluate(spec.circuit, flat, ctx.registry))
    raise EngineError(f"unsupported activation spec {spec!r}")


def apply_activation(spec, inputs: Sequence[Vector], dim: int, ctx: FormulaContext, ops: ExactArith) -> Vector:
    return _as_fractions(_activate(spec, [_lean(vec) for vec in inputs], dim, ctx, ops))


def run(
    cfg: TransformerConfig,
    input_seq: Union[EncodedSequence, Sequence[Sequence]],
    trace_mode: Optional[str] = None,
    registry: Optional[ExtensionRegistry] = None,
) -> Tuple[EncodedSequence, ExecutionTrace]:
    """
    Исполняет трансформер на последовательности.

    Головы, которые активация не читает, считаются только при обращении к трассе.

    Returns:
        (Y^K, трасса). Трасса хранит все слои (full) или только последний (last).
    """

    registry = registry or DEFAULT_EXTENSIONS
    trace_mode = trace_mode or default_trace_mode()
    if trace_mode not in ("full", "last"):
        raise EngineError(f"trace mode must be full or last, got {trace_mode!r}")
    vectors = input_seq.vectors if isinstance(input_seq, EncodedSequence) else input_seq
    X = [_lean(vec) for vec in vectors]
    if not X:
        raise EngineError("transformer input is empty")
    if any(len(x) != cfg.input_dim for x in X):
        raise EngineError(f"input vectors must have dimension {cfg.input_dim}")

    ctx = FormulaContext.for_config(cfg, registry)
    ops = _exact_ops(registry)
    Y = _add_positional(cfg, _embed(cfg, X, ctx, ops))
    trace = ExecutionTrace(mode=trace_mode, initial=tuple(map(_as_fractions, Y)) if trace_mode == "full" else ())

    for k, layer in enumerate(cfg.layers, 1):
        if isinstance(layer.activation, BuiltinActivation):
            check_activation(layer.activation, len(layer.heads) + 1, cfg.dim, registry)
        for head in layer.heads:
            check_attention(head.attention, cfg.dim)
        heads = [HeadTrace(head, Y, cfg.dim, ctx, ops) for head in layer.heads]
        read = [head.pooled for head in heads[: activation_reads(layer.activation, len(heads), registry)]]
        Y = [_activate(layer.activation, [Y[i]] + [z[i] for z in read], cfg.dim, ctx, ops) for i in range(len(Y))]
        entry = LayerTrace(index=k, heads=heads, output=Y)
        if trace_mode == "full":
            trace.layers.append(entry)
        else:
            trace.layers[:] = [entry]
        logger.debug("Слой %d: %d голов (читаются %d), n=%d", k, len(heads), len(read), len(Y))

    return EncodedSequence(dim=cfg.dim, vectors=tuple(Y)), trace
