#!/usr/bin/env python3
"""
Тесты конструкций: таблицы скоров на схеме-примере, моделирование против прямого вычисления,
чтение знака sign, перестановки, стекирование блоков.
"""

import random
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

BASE_DIR = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(BASE_DIR))

from circuit import RandomCircuitSpec, evaluate, metrics, parse_circuit, random_circuit, random_inputs
from constructions import (
    AdmissibilityError,
    ConstructionError,
    admissibility_problems,
    build,
    builtin_activation,
    builtin_attention,
    parse_kind,
    sign_readout,
    simulate,
    simulate_sequence,
)
from encoding import DEFAULT_TYPES, S, embed, encode, permute
from engine import BuiltinAttention, EngineError, PoolingSpec, run

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

SIGN_DIFF = """\
class semi
gate 1 input 1
gate 2 input 2
gate 3 const -1
gate 4 times 3 2
gate 5 plus 1 4
gate 6 sign 5
gate 7 output 6
"""

SUM2 = """\
class bounded
gate 1 input 1
gate 2 input 2
gate 3 plus 1 2
gate 4 output 3
"""

# s-компоненты векторов кодировки схемы-примера (x1..x12)
AVG4_S = [1, 2, 3, 4, 5, 6, 6, 6, 6, 7, 7, 8]

# att_V_dp: строки по s ключа y (1..8), столбцы по s запроса x (1..8)
VALUE_SCORES_BY_S = [
    [1, 3, 5, 7, 9, 11, 13, 15],
    [0, 4, 8, 12, 16, 20, 24, 28],
    [-3, 3, 9, 15, 21, 27, 33, 39],
    [-8, 0, 8, 16, 24, 32, 40, 48],
    [-15, -5, 5, 15, 25, 35, 45, 55],
    [-24, -12, 0, 12, 24, 36, 48, 60],
    [-35, -21, -7, 7, 21, 35, 49, 63],
    [-48, -32, -16, 0, 16, 32, 48, 64],
]

# att_B(2): строки по ключу y (x1..x12), столбцы по s запроса x (1..8)
B2_SCORES_BY_ROW = [
    [1, 3, 5, 7, 9, 11, 13, 15],
    [0, 4, 8, 12, 16, 20, 24, 28],
    [-3, 3, 9, 15, 21, 27, 33, 39],
    [-8, 0, 8, 16, 24, 32, 40, 48],
    [-15, -5, 5, 15, 25, 35, 45, 55],
    [-21, -9, 3, 15, 27, 39, 51, 63],
    [-20, -8, 4, 16, 28, 40, 52, 64],
    [-21, -9, 3, 15, 27, 39, 51, 63],
    [-24, -12, 0, 12, 24, 36, 48, 60],
    [-32, -18, -4, 10, 24, 38, 52, 66],
    [-31, -17, -3, 11, 25, 39, 53, 67],
    [-45, -29, -13, 3, 19, 35, 51, 67],
]

# максимумы по столбцам att_B(2) (номера строк x_j, с 1) для столбцов s = 1..8
B2_COLUMN_MAXIMA = [{1}, {2}, {3}, {4, 7}, {7}, {7}, {11}, {11, 12}]


@pytest.fixture
def avg4():
    return parse_circuit(AVG4)


def _kind(text, depth, **kwargs):
    return parse_kind(text, depth, **kwargs)


# region builders
def test_build_layouts():
    gen = build(_kind("gen", 3))
    assert gen.dim == 5 and len(gen.layers) == 6
    assert [h.attention.label for h in gen.layers[0].heads] == ["att_E_eq", "att_E_eq"]
    assert [(h.attention.label, h.pooling.label) for h in gen.layers[1].heads] == [
        ("att_V_eq", "WS/id"),
        ("att_V_eq", "WP/id"),
    ]

    fsac = build(_kind("fsac", 1))
    assert fsac.dim == 8 and len(fsac.layers) == 2
    assert [h.attention.label for h in fsac.layers[1].heads] == ["att_V_dp", "att_B(1)", "att_B(2)"]
    assert {h.pooling for h in fsac.layers[1].heads} == {PoolingSpec("WS", "avg")}

    sign = build(_kind("sign", 2))
    assert sign.dim == 9 and len(sign.layers) == 4
    labels = [h.attention.label for h in sign.layers[1].heads]
    assert labels[3:] == ["att_z_plus", "att_z_minus", "att_sign"]
    assert "sign" in sign.gate_types

    ext = build(_kind("ext:fma,relu", 1))
    assert ext.dim == 8
    assert [h.attention.label for h in ext.layers[1].heads] == ["att_V_dp", "att_B(1)", "att_B(2)", "att_B(3)"]
    assert ext.layers[1].activation.label == "act_V_ext(fma,relu)"

    fnc = build(_kind("fnc", 1))
    assert {h.pooling.transform for layer in fnc.layers for h in layer.heads} == {"hardleft"}


@pytest.mark.parametrize(
    "text, depth",
    [("foo", 1), ("fac:relu", 1), ("ext", 1), ("fac", 0)],
)
def test_parse_kind_errors(text, depth):
    with pytest.raises(ConstructionError):
        parse_kind(text, depth)


def test_unknown_extension_in_basis():
    with pytest.raises(ConstructionError):
        build(_kind("ext:nope", 1))


# endregion


# region builtin formulas
def test_builtin_attention_examples(avg4):
    seq = encode(avg4, [1, 2, 3, 4])
    seq7, seq8 = embed(seq, 7).vectors, embed(seq, 8).vectors
    assert builtin_attention("att_V_dp", seq7[5], seq7[0]) == 11
    assert builtin_attention("att_B(2)", seq8[10], seq8[10]) == 53
    assert builtin_attention("att_E_dp", seq8[11], seq8[9]) == 49
    with pytest.raises(EngineError):
        builtin_attention("att_B(2)", seq7[0], seq7[0])


def test_builtin_activation_examples():
    t = DEFAULT_TYPES
    q = F(7, 3)
    x = (F(6), F(1), F(1), t["plus"], F(0))
    y = (F(1), F(0), F(0), t["input"], q)
    z = (F(6), F(0), F(5, 2), t["plus"], F(0))
    assert builtin_activation("act_E_avg", [x, y, z])[4] == 4 * q

    x = (F(7), F(5), F(1), t["times"], F(0), F(1), F(49), F(1))
    first = (0, 0, 0, 0, F(1, 4), 0, 0, 0)
    second = (0, 0, 0, 0, F(10), 0, 0, 0)
    out = builtin_activation("act_V_semi", [x, x, first, second])
    assert out[4] == F(5, 2)
    assert out[:4] == x[:4]

    x = (F(2), F(0), F(0), t["input"], F(9))
    other = (F(5), F(5), F(5), t["plus"], F(-1))
    assert builtin_activation("act_V_avg", [x, other, other]) == x


def test_builtin_activation_lagrange_matches_zero():
    t = DEFAULT_TYPES
    x = (F(6), F(1), F(1), t["times"], F(0))
    y = (F(1), F(0), F(0), t["input"], F(-5, 2))
    z = (F(6), F(0), F(3, 2), t["times"], F(0))
    assert builtin_activation("act_E_avg", [x, y, z], charfin="lagrange") == builtin_activation(
        "act_E_avg", [x, y, z]
    )


# endregion


# region scores on the example circuit
def test_example_encoding_vectors(avg4):
    rows = [tuple(int(v) if v.denominator == 1 else v for v in vec) for vec in encode(avg4, [1, 2, 3, 4]).vectors]
    assert rows == [
        (1, 0, 0, 2, 1),
        (2, 0, 0, 2, 2),
        (3, 0, 0, 2, 3),
        (4, 0, 0, 2, 4),
        (5, 0, 0, 1, F(1, 4)),
        (6, 1, 1, 4, 0),
        (6, 2, 2, 4, 0),
        (6, 3, 3, 4, 0),
        (6, 4, 4, 4, 0),
        (7, 5, 1, 5, 0),
        (7, 6, 2, 5, 0),
        (8, 7, 1, 3, 0),
    ]


def test_value_attention_scores(avg4):
    outputs, trace = simulate(_kind("fac", 3), avg4, [1, 2, 3, 4], trace_mode="full")
    assert outputs == (F(5, 2),)
    a = trace.attention(2, 1)
    for i in range(12):
        for j in range(12):
            assert a[i][j] == VALUE_SCORES_BY_S[AVG4_S[j] - 1][AVG4_S[i] - 1]
    frame = trace.attention_frame(2, 1)
    assert frame.loc["x1", "x6"] == "11"
    assert frame.loc["x6", "x6"] == "36"
    assert frame.loc["x12", "x12"] == "64"


def test_b2_attention_scores_and_column_maxima(avg4):
    _, trace = simulate(_kind("fsac", 3), avg4, [1, 2, 3, 4], trace_mode="full")
    assert trace.layer(2).attention[2] == trace.attention(2, 3)
    a = trace.attention(2, 3)
    for i in range(12):
        for j in range(12):
            assert a[i][j] == B2_SCORES_BY_ROW[j][AVG4_S[i] - 1]
    for i in range(12):
        column = a[i]
        best = max(column)
        assert {j + 1 for j, v in enumerate(column) if v == best} == B2_COLUMN_MAXIMA[AVG4_S[i] - 1]
    frame = trace.attention_frame(2, 3)
    assert frame.loc["x7", "x4"] == "16"
    assert frame.loc["x11", "x10"] == frame.loc["x11", "x11"] == "53"
    assert frame.loc["x12", "x12"] == "67"


# endregion


# region simulate
def test_simulate_examples(avg4):
    assert simulate(_kind("fac", 3), avg4, [1, 2, 3, 4])[0] == (F(5, 2),)
    assert simulate(_kind("fnc", 2), parse_circuit(SUM2), [3, 4])[0] == (F(7),)
    # sign(x1 − x2) проходит in → × → + → sign → out: глубина 4
    sign_diff = parse_circuit(SIGN_DIFF)
    assert metrics(sign_diff).depth == 4
    assert simulate(_kind("sign", 4), sign_diff, [2, 5])[0] == (F(-1),)
    assert simulate(_kind("ext:sign", 4), sign_diff, [5, 2])[0] == (F(1),)


def test_admissibility(avg4):
    with pytest.raises(AdmissibilityError):
        simulate(_kind("sign", 2), parse_circuit(SIGN_DIFF), [2, 5])
    # fan-in 4 у плюса: не bounded
    assert admissibility_problems(_kind("fnc", 3), avg4)
    # sign-гейты только у sign и ext:sign
    assert admissibility_problems(_kind("fac", 4), parse_circuit(SIGN_DIFF))
    relu = parse_circuit("class semi\ngate 1 input 1\ngate 2 ext relu 1\ngate 3 output 2\n")
    assert admissibility_problems(_kind("ext:max2", 2), relu)
    assert not admissibility_problems(_kind("ext:relu", 2), relu)
    plus1 = parse_circuit("class bounded\ngate 1 input 1\ngate 2 plus 1\ngate 3 output 2\n")
    assert any("exactly 2" in p for p in admissibility_problems(_kind("fnc", 2), plus1))
    empty = parse_circuit("class unbounded\ngate 1 input 1\ngate 2 plus\ngate 3 plus 1 2\ngate 4 output 3\n")
    assert any("fan-in 0" in p for p in admissibility_problems(_kind("fac", 2), empty))


ORACLE_KINDS = [
    ("gen", "unbounded", ()),
    ("fac", "unbounded", ()),
    ("fsac", "semi", ()),
    ("fnc", "bounded", ()),
    ("ext:relu,max2,sign", "semi", ("relu", "max2", "sign")),
    ("ext:sign", "semi", ("sign",)),
    ("sign", "semi", ("sign",)),
]
ORACLE_CIRCUITS = 200
ORACLE_DEPTH = 4
ORACLE_GATES = 30


def _oracle_circuit(circuit_class, whitelist, seed):
    spec = RandomCircuitSpec(
        circuit_class=circuit_class,
        max_depth=ORACLE_DEPTH,
        max_gates=ORACLE_GATES,
        extension_whitelist=whitelist,
        seed=seed,
    )
    return random_circuit(spec)


@pytest.mark.parametrize("kind_text, circuit_class, whitelist", ORACLE_KINDS)
def test_simulation_oracle(kind_text, circuit_class, whitelist):
    rng = random.Random(11)
    kind = _kind(kind_text, ORACLE_DEPTH)
    for seed in range(ORACLE_CIRCUITS):
        c = _oracle_circuit(circuit_class, whitelist, seed)
        u = random_inputs(rng, c.num_inputs)
        assert simulate(kind, c, u)[0] == evaluate(c, u), f"seed {seed}"


def test_stacking_more_blocks_keeps_outputs(avg4):
    u = [F(-1, 2), 3, F(7, 5), 0]
    expected = evaluate(avg4, u)
    for depth in (3, 4, 5):
        assert simulate(_kind("fsac", depth), avg4, u)[0] == expected


@pytest.mark.parametrize(
    "kind_text, circuit_class, whitelist",
    [("fsac", "semi", ()), ("fac", "unbounded", ()), ("sign", "semi", ("sign",))],
)
def test_permutation_invariance(kind_text, circuit_class, whitelist):
    rng = random.Random(5)
    kind = _kind(kind_text, ORACLE_DEPTH)
    for seed in range(50):
        c = _oracle_circuit(circuit_class, whitelist, seed)
        u = random_inputs(rng, c.num_inputs)
        seq = encode(c, u)
        direct = simulate_sequence(kind, seq, c.num_outputs)[0]
        order = list(range(len(seq)))
        rng.shuffle(order)
        assert simulate_sequence(kind, permute(seq, order), c.num_outputs)[0] == direct, f"seed {seed}"


def test_fnc_pooling_variants_agree():
    rng = random.Random(2)
    for seed in range(8):
        c = random_circuit(RandomCircuitSpec(circuit_class="bounded", max_depth=3, max_gates=10, seed=seed))
        u = random_inputs(rng, c.num_inputs)
        results = {pool: simulate(_kind("fnc", 3, pool=pool), c, u)[0] for pool in ("hardleft", "hardright", "avg")}
        assert len(set(results.values())) == 1
        assert results["hardleft"] == evaluate(c, u)


@pytest.mark.parametrize(
    "v, u_plus, u_minus, zero, sign",
    [
        (F(-3), F(1), None, 0, -1),
        (F(0), F(3, 2), F(3, 2), 1, 0),
        (F(7, 2), None, F(1), 0, 1),
    ],
)
def test_sign_readout(v, u_plus, u_minus, zero, sign):
    readout = sign_readout(v)
    if u_plus is not None:
        assert readout.u_plus_s == u_plus
    if u_minus is not None:
        assert readout.u_minus_s == u_minus
    assert readout.zero == zero
    assert readout.sign == sign
    assert readout.outputs == (F(sign),)


def test_lagrange_and_zero_realizations_agree():
    rng = random.Random(8)
    zero_kind = _kind("sign", ORACLE_DEPTH)
    lagrange_kind = _kind("sign", ORACLE_DEPTH, charfin="lagrange")
    for seed in range(50):
        c = _oracle_circuit("semi", ("sign",), seed)
        u = random_inputs(rng, c.num_inputs)
        via_zero = simulate(zero_kind, c, u)[0]
        via_lagrange = simulate(lagrange_kind, c, u)[0]
        assert via_zero == via_lagrange == evaluate(c, u), f"seed {seed}"


def test_unused_heads_are_recorded_in_trace(avg4):
    _, trace = simulate(_kind("fsac", 3), avg4, [1, 2, 3, 4], trace_mode="last")
    assert [entry.index for entry in trace.layers] == [6]
    assert len(trace.layers[0].attention) == 3


def test_engine_runs_built_config_directly(avg4):
    cfg = build(_kind("fac", 3))
    seq = encode(avg4, [4, 4, 4, 4])
    out, _ = run(cfg, seq)
    edge_to_output = [vec for vec in out.vectors if vec[S] == 8]
    assert edge_to_output[0][4] == 4
    assert cfg.layers[0].heads[0].attention == BuiltinAttention("att_E_dp")


# endregion
