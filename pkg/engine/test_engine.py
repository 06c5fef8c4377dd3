#!/usr/bin/env python3
"""
Тесты исполнителя трансформера: преобразования скоров, пулинг, встроенные внимания, run, формат конфигурации.
"""

import random
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

BASE_DIR = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(BASE_DIR))

from circuit import parse_circuit
from encoding import CORE_TYPE_NAMES, DEFAULT_TYPES, S, encode, embed, embed_components, permute
from engine import (
    BuiltinActivation,
    BuiltinAttention,
    ConfigFormatError,
    DotProduct,
    EngineError,
    FormulaContext,
    HeadSpec,
    HostCircuit,
    LayerSpec,
    PoolingSpec,
    ScoreMatrix,
    TransformerConfig,
    argmax_set,
    attention_formula,
    attention_matrix,
    dot_product_realization,
    dump_config,
    load_config,
    parse_config,
    pool,
    pool_weighted,
    run,
    score_transform,
    transform_support,
)
from numerics import ExactArith

AVG4 = """\
class semi
gate 1 input 1
gate 2 input 2
gate 3 input 3
gate 4 input 4
gate 5 const 1/4
gate 6 plus 1 2 3 4
gate 7 times 5 6
gate 8 output 7
"""

EXACT = ExactArith()
small = st.fractions(min_value=-20, max_value=20, max_denominator=6)


def _single_layer(dim, attention, pooling="WS/avg", embedding="identity"):
    head = HeadSpec(attention, PoolingSpec.parse(pooling))
    return TransformerConfig(
        dim=dim,
        layers=(LayerSpec(heads=(head,), activation=BuiltinActivation("act_first")),),
        input_embedding=embedding,
    )


@pytest.fixture
def avg4_seq():
    return encode(parse_circuit(AVG4), [1, 2, 3, 4])


# region score transforms and pooling
def test_score_transform_examples():
    assert score_transform("avg", [3, 1, 3]) == [F(1, 2), 0, F(1, 2)]
    assert score_transform("hardleft", [3, 1, 3]) == [1, 0, 0]
    assert score_transform("hardright", [3, 1, 3]) == [0, 0, 1]
    assert score_transform("id", [3, 1, 3]) == [3, 1, 3]
    assert score_transform("avg", [36, 36, 36, 36]) == [F(1, 4)] * 4


def test_score_transform_rejects_empty_and_unknown():
    with pytest.raises(EngineError):
        score_transform("avg", [])
    with pytest.raises(EngineError):
        score_transform("softmax", [1])


def test_pool_examples():
    assert pool(PoolingSpec("WS", "avg"), [(F(1),), (F(2),), (F(3),)], [5, 5, 0]) == (F(3, 2),)
    assert pool(PoolingSpec("WP", "avg"), [(F(2),), (F(9),), (F(8),)], [5, 0, 5]) == (F(4),)
    X = [(F(1), F(2)), (F(3), F(4)), (F(5), F(6))]
    assert pool(PoolingSpec("WS", "id"), X, [0, 1, 0]) == X[1]
    # все веса нулевые: пустое произведение
    assert pool(PoolingSpec("WP", "id"), X, [0, 0, 0]) == (1, 1)


def test_pool_length_mismatch():
    with pytest.raises(EngineError):
        pool(PoolingSpec(), [(F(1),)], [1, 2])


def test_sparse_weights_and_pooling():
    assert transform_support("avg", [1, 3]) == [(1, F(1, 2)), (3, F(1, 2))]
    assert transform_support("hardright", [1, 3]) == [(3, 1)]
    X = [(F(1), F(2)), (F(3), F(4)), (F(5), F(6))]
    assert pool_weighted("WS", X, [(0, F(1, 2)), (2, F(1, 2))]) == (3, 4)
    assert pool_weighted("WS", X, [(0, 2), (1, -1)]) == (-1, 0)
    assert pool_weighted("WS", X, []) == (0, 0)
    assert pool_weighted("WP", X, []) == (1, 1)
    assert pool_weighted("WP", X, [(1, 1), (2, F(1, 2))]) == (F(15, 2), 12)


def test_score_matrix_shares_rows_and_columns():
    # позиции 0 и 2 делят строку и столбец
    a = ScoreMatrix([0, 1, 0], [0, 1, 0], [[2, 5], [1, 1]], scale=2)
    assert a.rows() == ((1, F(5, 2), 1), (F(1, 2), F(1, 2), F(1, 2)), (1, F(5, 2), 1))
    assert a.entry(1, 2) == F(1, 2)
    assert a.argmax(0) == [1]
    assert a.argmax(1) == [0, 1, 2]
    assert a.weights(1, "avg") == [(0, F(1, 3)), (1, F(1, 3)), (2, F(1, 3))]
    assert a.weights(2, "id") == [(0, 1), (1, F(5, 2)), (2, 1)]


@settings(max_examples=60, deadline=None)
@given(st.lists(small, min_size=1, max_size=8), st.randoms(use_true_random=False))
def test_transform_equivariance_and_weight_sums(scores, rnd):
    order = list(range(len(scores)))
    rnd.shuffle(order)
    permuted = [scores[j] for j in order]
    for name in ("id", "avg"):
        direct = score_transform(name, scores)
        assert score_transform(name, permuted) == [direct[j] for j in order]
    for name in ("avg", "hardleft", "hardright"):
        assert sum(score_transform(name, scores)) == 1
    shifted = [a + 7 for a in scores]
    assert set(argmax_set(shifted)) == set(argmax_set(scores))

    X = [(a, a * a) for a in scores]
    for family in ("WS", "WP"):
        spec = PoolingSpec(family, "avg")
        assert pool(spec, [X[j] for j in order], permuted) == pool(spec, X, scores)


def test_hardleft_equivariant_without_ties():
    scores = [F(1), F(5), F(2)]
    order = [2, 0, 1]
    direct = score_transform("hardleft", scores)
    assert score_transform("hardleft", [scores[j] for j in order]) == [direct[j] for j in order]


# endregion


# region builtin attention
@st.composite
def embedded_vectors(draw):
    base = [draw(small) for _ in range(5)]
    return tuple(embed_components(EXACT, base, 9, F(3)))


@settings(max_examples=1000, deadline=None)
@given(embedded_vectors(), embedded_vectors())
def test_dot_product_realizations_agree_with_formulas(x, y):
    for text in ("att_E_dp", "att_V_dp", "att_B(1)", "att_B(2)", "att_z_plus", "att_z_minus", "att_sign"):
        spec = BuiltinAttention.parse(text)
        dpa = dot_product_realization(spec, 9)
        left = [sum(a * v for a, v in zip(row, x)) for row in dpa.A]
        right = [sum(b * v for b, v in zip(row, y)) for row in dpa.B]
        assert sum(p * q for p, q in zip(left, right)) == attention_formula(EXACT, spec, x, y)


ALL_BUILTINS = ("att_E_eq", "att_V_eq", "att_E_dp", "att_V_dp", "att_B(2)", "att_z_plus", "att_z_minus", "att_sign")
CONTEXT = FormulaContext(types=DEFAULT_TYPES, gate_types=CORE_TYPE_NAMES)

# повторы позиций: совпадающие запросы и ключи
repeated_vectors = st.lists(embedded_vectors(), min_size=1, max_size=4).flatmap(
    lambda base: st.lists(st.sampled_from(base), min_size=1, max_size=7)
)


@settings(max_examples=200, deadline=None)
@given(repeated_vectors)
def test_runner_scores_match_formulas(Y):
    for text in ALL_BUILTINS:
        spec = BuiltinAttention.parse(text)
        a = attention_matrix(spec, Y, 9, CONTEXT, EXACT)
        for i, x in enumerate(Y):
            for j, y in enumerate(Y):
                assert a[i][j] == attention_formula(EXACT, spec, x, y), (text, i, j)


def test_edge_fetch_ignores_positions_with_large_alpha():
    base = [F(3), F(0), F(0), F(2), F(0)]
    node = tuple(embed_components(EXACT, base, 9, F(3)))
    edge_1 = tuple(embed_components(EXACT, [F(3), F(5), F(1), F(4), F(0)], 9, F(3)))
    edge_2 = tuple(embed_components(EXACT, [F(3), F(5), F(2), F(4), F(0)], 9, F(3)))
    query = tuple(embed_components(EXACT, [F(7), F(3), F(1), F(4), F(0)], 9, F(3)))
    a = attention_matrix(BuiltinAttention("att_E_eq"), [query, node, edge_1, edge_2], 9, CONTEXT, EXACT)
    assert a[0] == (0, 1, 1, 0)


def test_eq_builtins_have_no_dot_product():
    assert dot_product_realization(BuiltinAttention("att_V_eq"), 5) is None
    x = (F(6), 0, 0, F(4), 0)
    assert attention_formula(EXACT, BuiltinAttention("att_V_eq"), x, x) == 1
    assert attention_formula(EXACT, BuiltinAttention("att_V_eq"), x, (F(5), 0, 0, 0, 0)) == 0


def test_builtin_dimension_checks():
    with pytest.raises(EngineError):
        dot_product_realization(BuiltinAttention("att_B", 2), 7)
    with pytest.raises(EngineError):
        BuiltinAttention.parse("att_B")
    with pytest.raises(EngineError):
        BuiltinAttention.parse("att_softmax")


def test_builtin_examples_on_avg4(avg4_seq):
    seq7 = embed(avg4_seq, 7).vectors
    seq8 = embed(avg4_seq, 8).vectors
    assert attention_formula(EXACT, BuiltinAttention("att_V_dp"), seq7[5], seq7[0]) == 11
    assert attention_formula(EXACT, BuiltinAttention("att_B", 2), seq8[10], seq8[10]) == 53
    assert attention_formula(EXACT, BuiltinAttention("att_E_dp"), seq8[11], seq8[9]) == 49


# endregion


# region run
def test_identity_config_returns_input(avg4_seq):
    cfg = _single_layer(5, BuiltinAttention("att_V_eq"), "WS/id")
    out, trace = run(cfg, avg4_seq, trace_mode="full")
    assert out == avg4_seq
    assert trace.initial == avg4_seq.vectors
    assert len(trace.layer(1).attention[0]) == len(avg4_seq)


def test_att_v_dp_matrix_on_avg4(avg4_seq):
    cfg = _single_layer(7, BuiltinAttention("att_V_dp"), embedding="embed7")
    _, trace = run(cfg, avg4_seq, trace_mode="full")
    a = trace.attention(1, 1)
    s = [v[S] for v in avg4_seq.vectors]
    for i in range(12):
        for j in range(12):
            assert a[i][j] == 2 * s[i] * s[j] - s[j] * s[j]
    frame = trace.attention_frame(1, 1)
    assert frame.loc["x1", "x6"] == "11"
    assert frame.loc["x6", "x6"] == "36"
    assert frame.loc["x12", "x12"] == "64"


def test_run_is_permutation_equivariant(avg4_seq):
    head_e = HeadSpec(BuiltinAttention("att_E_dp"), PoolingSpec("WS", "avg"))
    head_v = HeadSpec(BuiltinAttention("att_V_dp"), PoolingSpec("WS", "avg"))
    cfg = TransformerConfig(
        dim=7,
        layers=(LayerSpec(heads=(head_e, head_v), activation=BuiltinActivation("act_E_avg")),),
        input_embedding="embed7",
    )
    out, _ = run(cfg, avg4_seq)
    rnd = random.Random(3)
    for _ in range(5):
        order = list(range(len(avg4_seq)))
        rnd.shuffle(order)
        permuted_out, _ = run(cfg, permute(avg4_seq, order))
        assert permuted_out.vectors == tuple(out.vectors[j] for j in order)


def test_unread_head_is_computed_on_trace_access(avg4_seq):
    # act_first не читает головы
    cfg = _single_layer(7, BuiltinAttention("att_V_dp"), embedding="embed7")
    out, trace = run(cfg, avg4_seq, trace_mode="full")
    assert [vec[:5] for vec in out.vectors] == list(avg4_seq.vectors)
    a = trace.attention(1, 1)
    s = [v[S] for v in avg4_seq.vectors]
    assert a[0][5] == 2 * s[0] * s[5] - s[5] * s[5]
    assert len(trace.layer(1).pooled[0]) == len(avg4_seq)


def test_run_returns_fractions(avg4_seq):
    cfg = _single_layer(7, BuiltinAttention("att_V_dp"), "WS/avg", embedding="embed7")
    out, trace = run(cfg, avg4_seq, trace_mode="full")
    assert all(type(x) is F for vec in out.vectors for x in vec)
    assert all(type(x) is F for vec in trace.layer(1).output for x in vec)
    assert all(type(x) is F for z in trace.layer(1).pooled[0] for x in z)


def test_trace_last_keeps_final_layer_only(avg4_seq):
    layer = LayerSpec(
        heads=(HeadSpec(BuiltinAttention("att_V_eq"), PoolingSpec()),), activation=BuiltinActivation("act_first")
    )
    cfg = TransformerConfig(dim=5, layers=(layer, layer, layer))
    _, trace = run(cfg, avg4_seq, trace_mode="last")
    assert [entry.index for entry in trace.layers] == [3]
    with pytest.raises(EngineError):
        trace.layer(1)


def test_run_rejects_dimension_mismatch(avg4_seq):
    cfg = _single_layer(7, BuiltinAttention("att_V_dp"))
    with pytest.raises(EngineError):
        run(cfg, avg4_seq)
    cfg = _single_layer(5, BuiltinAttention("att_B", 1))
    with pytest.raises(EngineError):
        run(cfg, avg4_seq)


def test_host_circuit_attention_matches_dpa():
    product = parse_circuit("gate 1 input 1\ngate 2 input 2\ngate 3 times 1 2\ngate 4 output 3\n")
    X = [(F(2),), (F(-1),), (F(1, 3),)]
    via_circuit, t1 = run(_single_layer(1, HostCircuit(product), "WS/hardright"), X, trace_mode="full")
    via_dpa, t2 = run(_single_layer(1, DotProduct(A=((1,),), B=((1,),)), "WS/hardright"), X, trace_mode="full")
    assert via_circuit == via_dpa
    assert t1.attention(1, 1) == t2.attention(1, 1)


def test_positional_table_is_added():
    cfg = TransformerConfig(
        dim=1,
        layers=(LayerSpec(heads=(HeadSpec(DotProduct(A=((0,),), B=((0,),))),), activation=BuiltinActivation("act_first")),),
        positional=(((2, 2), (F(10),)),),
    )
    out, _ = run(cfg, [(F(1),), (F(1),)])
    assert out.vectors == ((F(1),), (F(11),))


# endregion


# region config format
CONFIG_TEXT = """\
dim 8
embed embed8
charfin zero
types const,input,output,plus,times
layer
head att_E_dp WS/avg
head att_V_dp WS/avg
act act_E_semi
layer
head att_V_dp WS/avg
head att_B(1) WS/avg
head att_B(2) WS/avg
act act_V_semi
"""


def test_config_parse_and_dump():
    cfg = parse_config(CONFIG_TEXT)
    assert cfg.dim == 8
    assert len(cfg.layers) == 2
    assert cfg.layers[1].heads[2].attention == BuiltinAttention("att_B", 2)
    text, circuits = dump_config(cfg)
    assert text == CONFIG_TEXT
    assert circuits == {}


def test_config_with_dpa_and_circuit(tmp_path):
    (tmp_path / "score.circ").write_text("gate 1 input 1\ngate 2 input 2\ngate 3 times 1 2\ngate 4 output 3\n")
    text = "dim 1\nembed identity\ncharfin zero\ntypes const,input,output,plus,times\nlayer\nhead dpa A=2 B=1/2 WS/id\nhead circuit score.circ WS/avg\nact act_first\n"
    path = tmp_path / "cfg.xf"
    path.write_text(text)
    cfg = load_config(str(path))
    assert cfg.layers[0].heads[0].attention == DotProduct(A=((2,),), B=((F(1, 2),),))
    assert isinstance(cfg.layers[0].heads[1].attention, HostCircuit)
    assert dump_config(cfg)[0] == text


@pytest.mark.parametrize(
    "text",
    [
        "layer\nhead att_V_dp WS/avg\nact act_first\n",
        "dim 7\nhead att_V_dp WS/avg\n",
        "dim 7\nlayer\nhead att_V_dp WS/avg\n",
        "dim 7\nlayer\nhead att_V_dp XX/avg\nact act_first\n",
        "dim 7\nlayer\nhead att_nope WS/avg\nact act_first\n",
        "dim 7\nembed embed8\n",
        "dim 2\nlayer\nhead dpa A=1,2 B=1,0;0,1 WS/id\nact act_first\n",
        "dim 7\nwidth 3\n",
    ],
)
def test_config_format_errors(text):
    with pytest.raises(ConfigFormatError):
        parse_config(text)


# endregion
