#!/usr/bin/env python3
"""
Тесты командной строки и фаззера: коды выхода, форматы вывода, воспроизводящие примеры.
"""

import sys
from fractions import Fraction as F
from io import StringIO
from pathlib import Path

import pandas as pd
import pytest

BASE_DIR = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(BASE_DIR))

from circuit import evaluate, load_circuit, parse_inputs
from constructions import parse_kind
from encoding import parse_sequence
from main_function import fuzzing
from main_function.cli import main
from main_function.fuzzing import run_fuzz, shrink, still_fails, trial_case

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


@pytest.fixture
def avg4_path(tmp_path):
    path = tmp_path / "avg4.circ"
    path.write_text(AVG4, encoding="utf-8")
    return path


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


# region cli
def test_eval_and_validate(capsys, avg4_path):
    assert _run(capsys, "eval", avg4_path, "--input", "1,2,3,4") == (0, "5/2\n")
    code, out = _run(capsys, "validate", avg4_path)
    assert code == 0 and "✅" in out
    code, out = _run(capsys, "validate", avg4_path, "--class", "bounded")
    assert code == 1 and "fan-in discipline" in out


def test_parse_errors_exit_with_2(capsys, avg4_path, tmp_path):
    assert _run(capsys, "eval", avg4_path, "--input", "1,x,3,4")[0] == 2
    broken = tmp_path / "broken.circ"
    broken.write_text("class semi\ngate 1 wire\n", encoding="utf-8")
    assert _run(capsys, "eval", broken, "--input", "1")[0] == 2
    assert _run(capsys, "simulate", "--kind", "fac", avg4_path, "--input", "1")[0] == 2


def test_simulate_prints_both_outputs_and_match(capsys, avg4_path):
    code, out = _run(capsys, "simulate", "--kind", "fac", "--depth", 3, avg4_path, "--input", "1,2,3,4")
    assert code == 0
    assert out == "5/2\n5/2\nMATCH\n"


def test_simulate_rejects_inadmissible_circuit(capsys, tmp_path):
    path = tmp_path / "sign_diff.circ"
    path.write_text(SIGN_DIFF, encoding="utf-8")
    assert _run(capsys, "simulate", "--kind", "sign", "--depth", 2, path, "--input", "2,5")[0] == 1
    code, out = _run(capsys, "simulate", "--kind", "sign", "--depth", 4, path, "--input", "2,5")
    assert code == 0 and out.endswith("MATCH\n")


def test_build_encode_attn_print_value_scores(capsys, avg4_path, tmp_path):
    cfg, seq = tmp_path / "fac.xf", tmp_path / "avg4.seq"
    assert _run(capsys, "build", "--kind", "fac", "--depth", 3, "-o", cfg)[0] == 0
    assert _run(capsys, "encode", avg4_path, "--input", "1,2,3,4", "-o", seq)[0] == 0
    assert len(parse_sequence(seq.read_text(encoding="utf-8"))) == 12

    code, out = _run(capsys, "attn", cfg, seq, "--layer", 2, "--head", 1)
    assert code == 0
    frame = pd.read_csv(StringIO(out), sep="\t", index_col=0)
    assert list(frame.columns) == [f"x{j}" for j in range(1, 13)]
    assert frame.loc["x1", "x6"] == 11
    assert frame.loc["x6", "x6"] == 36
    assert frame.loc["x12", "x12"] == 64
    assert _run(capsys, "attn", cfg, seq, "--layer", 2, "--head", 9)[0] == 1


def test_run_writes_final_sequence(capsys, avg4_path, tmp_path):
    cfg, seq, out_path = tmp_path / "fac.xf", tmp_path / "avg4.seq", tmp_path / "out.seq"
    _run(capsys, "build", "--kind", "fac", "--depth", 3, "-o", cfg)
    _run(capsys, "encode", avg4_path, "--input", "1,2,3,4", "-o", seq)
    code, out = _run(capsys, "run", cfg, seq, "-o", out_path, "--trace")
    assert code == 0
    final = parse_sequence(out_path.read_text(encoding="utf-8"))
    assert final.dim == 7
    # вектор ребра в выход (s = 8) несёт значение схемы
    assert [vec[4] for vec in final.vectors if vec[0] == 8] == [F(5, 2)]
    assert out.count("# layer") == 6 * 2


def test_build_prints_config_and_compile_emits_provenance(capsys, tmp_path):
    code, out = _run(capsys, "build", "--kind", "fnc", "--depth", 1, "--pool", "hardright")
    assert code == 0
    assert out.startswith("dim 8\nembed embed8\n")
    assert "head att_B(1) WS/hardright" in out

    cfg = tmp_path / "fnc.xf"
    cfg.write_text(out, encoding="utf-8")
    circ = tmp_path / "fnc.circ"
    assert _run(capsys, "compile", cfg, "--length", 2, "-o", circ)[0] == 0
    text = circ.read_text(encoding="utf-8")
    assert text.startswith("class semi\n")
    assert "# gates 1..10: inputs" in text
    assert load_circuit(str(circ)).num_inputs == 10
    assert _run(capsys, "compile", cfg, "--length", 0)[0] == 1


def test_fuzz_command_reports_every_trial(capsys, tmp_path):
    code, out = _run(
        capsys, "fuzz", "--kind", "fsac", "--count", 3, "--seed", 1,
        "--max-gates", 8, "--max-depth", 2, "--workers", 1, "--out-dir", tmp_path,
    )
    assert code == 0
    frame = pd.read_csv(StringIO(out), sep="\t")
    assert list(frame["trial"]) == [0, 1, 2]
    assert set(frame["status"]) == {"MATCH"}
    assert not list(tmp_path.glob("repro_*"))


# endregion


# region fuzzing
def test_trial_cases_are_deterministic_and_admissible():
    kind = parse_kind("fnc", 3)
    first = trial_case(kind, 4, 7, 10, 3)
    again = trial_case(kind, 4, 7, 10, 3)
    assert first == again
    c, u = first
    assert not still_fails(kind, c, u)


def test_shrink_and_repro_on_a_broken_simulator(monkeypatch, tmp_path):
    def off_by_one(kind, c, u, registry=None, trace_mode=None):
        return tuple(v + 1 for v in evaluate(c, u)), None

    monkeypatch.setattr(fuzzing, "simulate", off_by_one)
    kind = parse_kind("fac", 3)
    report = run_fuzz(kind, count=5, seed=3, max_gates=12, max_depth=3, out_dir=tmp_path)

    assert not report.ok
    assert [r.trial for r in report.results] == [0]
    failure = report.first_failure
    repro = load_circuit(str(report.repro_path))
    assert report.repro_path == tmp_path / "repro_0.circ"
    assert repro.num_outputs == 1
    assert repro.size <= len(failure.inputs) + 2
    inputs = parse_inputs((tmp_path / "repro_0.inputs").read_text(encoding="utf-8").strip())
    assert inputs == list(failure.inputs)
    assert still_fails(kind, repro, inputs)

    c, u = trial_case(kind, 0, 3, 12, 3)
    assert shrink(kind, c, u).size == repro.size


def test_parallel_fuzz_matches_sequential():
    kind = parse_kind("fsac", 2)
    sequential = run_fuzz(kind, count=4, seed=5, max_gates=8, max_depth=2, workers=1)
    parallel = run_fuzz(kind, count=4, seed=5, max_gates=8, max_depth=2, workers=2)
    assert sequential.ok and parallel.ok
    pd.testing.assert_frame_equal(sequential.frame(), parallel.frame())


# endregion
