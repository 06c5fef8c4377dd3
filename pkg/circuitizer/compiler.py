"""
Компиляция трансформера в одну арифметическую схему при фиксированной длине n.

Входы схемы — n·d_in компонент входной последовательности (позиция за позицией),
выходы — n·d компонент Y^K. Скоры, преобразования скоров и пулинг раскрываются
гаджетами постоянной глубины, поэтому глубина схемы не зависит от n.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from circuit import DEFAULT_EXTENSIONS, Circuit, ExtensionRegistry
from encoding import embed_components
from engine import (
    EMBEDDINGS,
    BuiltinActivation,
    BuiltinAttention,
    DotProduct,
    EngineError,
    FormulaContext,
    HeadSpec,
    HostCircuit,
    TransformerConfig,
    activation_formula,
    activation_reads,
    attention_formula,
    check_activation,
    check_attention,
    dot_product_realization,
)

from .gadgets import splice, transform_weights
from .wires import CircuitBuilder, CompileError, GateArith, Provenance, Wire

logger = logging.getLogger(__name__)

Row = List[Wire]


class PooledVector:
    """Z_i одной головы; компоненты строятся по первому обращению."""

    def __init__(self, dim: int, build: Callable[[int], Wire]) -> None:
        self._dim = dim
        self._build = build
        self._cache: Dict[int, Wire] = {}

    def __len__(self) -> int:
        return self._dim

    def __getitem__(self, c: int) -> Wire:
        if not 0 <= c < self._dim:
            raise IndexError(c)
        if c not in self._cache:
            self._cache[c] = self._build(c)
        return self._cache[c]

    def __iter__(self):
        return (self[c] for c in range(self._dim))


# region embedding ----------------------------------------------------------------
def _embed(builder: CircuitBuilder, cfg: TransformerConfig, X: Sequence[Row], ctx: FormulaContext) -> List[Row]:
    embedding = cfg.input_embedding
    if isinstance(embedding, HostCircuit):
        if embedding.circuit.num_outputs != cfg.dim:
            raise CompileError(f"embedding circuit must have {cfg.dim} outputs")
        return [splice(builder, embedding.circuit, x) for x in X]
    if embedding == "identity":
        return [list(x) for x in X]
    ops = GateArith(builder)
    support = ctx.support if cfg.charfin == "lagrange" else ()
    return [
        [builder.lift(w) for w in embed_components(ops, x, EMBEDDINGS[embedding], ctx.types["output"], cfg.charfin, support)]
        for x in X
    ]


def _add_positional(builder: CircuitBuilder, cfg: TransformerConfig, Y: List[Row]) -> List[Row]:
    """Позиционный эмбеддинг — константы; при непустой таблице плюс стоит на каждой позиции."""

    table = cfg.positional_table()
    if not table:
        return Y
    n = len(Y)
    zero = (Fraction(0),) * cfg.dim
    return [
        [builder.plus([y, builder.const(p)]) for y, p in zip(row, table.get((i, n), zero))]
        for i, row in enumerate(Y, 1)
    ]


# endregion


# region scores -------------------------------------------------------------------
def _linear(builder: CircuitBuilder, coefs: Sequence[Fraction], y: Row) -> Wire:
    terms = [w if a == 1 else builder.times([builder.const(a), w]) for a, w in zip(coefs, y) if a]
    if not terms:
        return builder.const(0)
    return terms[0] if len(terms) == 1 else builder.plus(terms)


def _dpa_scores(builder: CircuitBuilder, spec: DotProduct, Y: Sequence[Row]) -> List[Row]:
    rows = [r for r in range(spec.dim) if any(spec.A[r]) and any(spec.B[r])]
    left = [[_linear(builder, spec.A[r], y) for r in rows] for y in Y]
    right = [[_linear(builder, spec.B[r], y) for r in rows] for y in Y]
    scores: List[Row] = []
    for lx in left:
        row = []
        for ry in right:
            products = [builder.times([p, q]) for p, q in zip(lx, ry)]
            if not products:
                row.append(builder.const(0))
            else:
                row.append(products[0] if len(products) == 1 else builder.plus(products))
        scores.append(row)
    return scores


def _scores(builder: CircuitBuilder, spec, Y: Sequence[Row], dim: int) -> List[Row]:
    """Матрица скоров a[i][j] = f_att(Y_i, Y_j) одной головы."""

    if isinstance(spec, DotProduct):
        return _dpa_scores(builder, spec, Y)
    if isinstance(spec, BuiltinAttention):
        realization = dot_product_realization(spec, dim)
        if realization is not None:
            return _dpa_scores(builder, realization, Y)
        ops = GateArith(builder)
        return [[builder.lift(attention_formula(ops, spec, x, y)) for y in Y] for x in Y]
    if isinstance(spec, HostCircuit):
        if spec.circuit.num_inputs != 2 * dim or spec.circuit.num_outputs != 1:
            raise CompileError(f"attention circuit must map {2 * dim} inputs to 1 output")
        return [[splice(builder, spec.circuit, list(x) + list(y))[0] for y in Y] for x in Y]
    raise CompileError(f"cannot compile attention {spec!r}")


# endregion


# region pooling ------------------------------------------------------------------
def _pooled(builder: CircuitBuilder, family: str, weights: Row, Y: Sequence[Row]) -> PooledVector:
    """
    WS: Σ_j w_j·Y_j[c]. WP: ∏_j (w_j·Y_j[c] + 1 − sign(w_j²)), нулевой вес даёт множитель 1.
    """

    if family == "WS":
        return PooledVector(len(Y[0]), lambda c: builder.plus([w * y[c] for w, y in zip(weights, Y)]))

    ones: List[Wire] = []

    def build(c: int) -> Wire:
        if not ones:
            ones.extend(1 - builder.sign(w * w) for w in weights)
        return builder.times([w * y[c] + one for w, y, one in zip(weights, Y, ones)])

    return PooledVector(len(Y[0]), build)


def _head(builder: CircuitBuilder, k: int, h: int, head: HeadSpec, Y: Sequence[Row], dim: int) -> List[PooledVector]:
    ops = GateArith(builder)
    with builder.section(f"layer {k} head {h} scores"):
        a = _scores(builder, head.attention, Y, dim)
    result = []
    for i, row in enumerate(a, 1):
        with builder.section(f"layer {k} head {h} weights position {i}"):
            weights = [builder.lift(w) for w in transform_weights(ops, head.pooling.transform, row)]
        result.append(_pooled(builder, head.pooling.family, weights, Y))
    return result


# endregion


def _activate(builder: CircuitBuilder, spec, inputs: Sequence[Sequence[Wire]], dim: int, ctx: FormulaContext) -> Row:
    if isinstance(spec, BuiltinActivation):
        return [builder.lift(w) for w in activation_formula(GateArith(builder), spec, inputs, ctx)]
    if isinstance(spec, HostCircuit):
        flat = [w for vec in inputs for w in vec]
        if spec.circuit.num_inputs != len(flat) or spec.circuit.num_outputs != dim:
            raise CompileError(f"activation circuit must map {len(flat)} inputs to {dim} outputs")
        return splice(builder, spec.circuit, flat)
    raise CompileError(f"cannot compile activation {spec!r}")


def compile_with_provenance(
    cfg: TransformerConfig, n: int, registry: Optional[ExtensionRegistry] = None
) -> Tuple[Circuit, Provenance]:
    """
    Схема трансформера при длине n и диапазоны гейтов (first, last, метка) по частям конфигурации.

    Raises:
        CompileError: n < 1 или часть конфигурации не компилируется
    """

    if n < 1:
        raise CompileError(f"sequence length must be >= 1, got {n}")
    registry = registry or DEFAULT_EXTENSIONS
    ctx = FormulaContext.for_config(cfg, registry)
    builder = CircuitBuilder()
    d_in = cfg.input_dim

    with builder.section("inputs"):
        X = [[builder.input(i * d_in + c + 1) for c in range(d_in)] for i in range(n)]
    try:
        with builder.section("input embedding"):
            Y = _add_positional(builder, cfg, _embed(builder, cfg, X, ctx))

        for k, layer in enumerate(cfg.layers, 1):
            if isinstance(layer.activation, BuiltinActivation):
                check_activation(layer.activation, len(layer.heads) + 1, cfg.dim, registry)
            for head in layer.heads:
                check_attention(head.attention, cfg.dim)
            # головы, которые активация не читает, в схему не попадают
            read = layer.heads[: activation_reads(layer.activation, len(layer.heads), registry)]
            pooled = [_head(builder, k, h, head, Y, cfg.dim) for h, head in enumerate(read, 1)]
            next_y = []
            for i in range(n):
                with builder.section(f"layer {k} position {i + 1}"):
                    next_y.append(_activate(builder, layer.activation, [Y[i]] + [z[i] for z in pooled], cfg.dim, ctx))
            Y = next_y
            logger.debug("Слой %d скомпилирован: %d гейтов", k, builder.size)
    except EngineError as exc:
        raise CompileError(str(exc)) from exc

    with builder.section("outputs"):
        for row in Y:
            for w in row:
                builder.output(w)

    has_wp = any(head.pooling.family == "WP" for layer in cfg.layers for head in layer.heads)
    c = builder.finish("unbounded" if has_wp else None)
    logger.info("Трансформер скомпилирован: n=%d, %d гейтов, класс %s", n, c.size, c.declared_class)
    return c, builder.provenance


def compile(cfg: TransformerConfig, n: int, registry: Optional[ExtensionRegistry] = None) -> Circuit:
    return compile_with_provenance(cfg, n, registry)[0]
