"""
Дифференциальный фаззинг конструкций: случайная допустимая схема → simulate против evaluate.

Испытание номер t детерминировано по (seed, t). При расхождении схема жадно уменьшается
(удаление выходов, обход гейтов с последующим prune), пока расхождение сохраняется,
и записывается как repro_<t>.circ вместе с входами repro_<t>.inputs.
"""

from __future__ import annotations

import logging
import multiprocessing
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple

import pandas as pd

from circuit import (
    Circuit,
    CircuitError,
    Extension,
    Plus,
    RandomCircuitSpec,
    Sign,
    Times,
    evaluate,
    metrics,
    random_circuit,
    random_inputs,
    save_circuit,
)
from circuit.transforms import compact, ordered_edges, prune
from constructions import KIND_CLASSES, ConstructionError, ConstructionKind, admissibility_problems, simulate
from encoding import EncodingError
from engine import EngineError
from numerics import format_rational

logger = logging.getLogger(__name__)

_SIMULATION_ERRORS = (ConstructionError, EngineError, EncodingError, CircuitError)


@dataclass(frozen=True)
class TrialResult:
    trial: int
    seed: int
    gates: int
    depth: int
    inputs: Tuple[Fraction, ...]
    expected: Tuple[Fraction, ...]
    actual: Tuple[Fraction, ...] = ()
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error and self.actual == self.expected


@dataclass
class FuzzReport:
    kind: ConstructionKind
    results: List[TrialResult] = field(default_factory=list)
    repro_path: Optional[Path] = None
    repro_size: int = 0

    @property
    def first_failure(self) -> Optional[TrialResult]:
        return next((r for r in self.results if not r.ok), None)

    @property
    def ok(self) -> bool:
        return self.first_failure is None

    def frame(self) -> pd.DataFrame:
        """Сводка испытаний в порядке номеров."""

        rows = [
            {
                "trial": r.trial,
                "seed": r.seed,
                "gates": r.gates,
                "depth": r.depth,
                "inputs": ",".join(format_rational(x) for x in r.inputs),
                "expected": ",".join(format_rational(x) for x in r.expected),
                "actual": r.error or ",".join(format_rational(x) for x in r.actual),
                "status": "MATCH" if r.ok else "DIFF",
            }
            for r in self.results
        ]
        return pd.DataFrame(rows, columns=["trial", "seed", "gates", "depth", "inputs", "expected", "actual", "status"])


def extension_whitelist(kind: ConstructionKind) -> Tuple[str, ...]:
    if kind.kind == "avg_ext":
        return kind.basis
    if kind.kind == "avg_sign":
        return ("sign",)
    return ()


def trial_case(kind: ConstructionKind, trial: int, seed: int, max_gates: int, max_depth: int) -> Tuple[Circuit, List[Fraction]]:
    """Схема и входы испытания trial; глубина схемы не превышает K конструкции."""

    spec = RandomCircuitSpec(
        circuit_class=KIND_CLASSES[kind.kind],
        max_depth=min(max_depth, kind.depth),
        max_gates=max_gates,
        extension_whitelist=extension_whitelist(kind),
        seed=seed + trial,
    )
    c = random_circuit(spec)
    rng = random.Random(seed * 1_000_003 + trial)
    return c, random_inputs(rng, c.num_inputs)


def _simulated(kind: ConstructionKind, c: Circuit, u: Sequence[Fraction]) -> Tuple[Tuple[Fraction, ...], str]:
    try:
        return simulate(kind, c, u, trace_mode="last")[0], ""
    except _SIMULATION_ERRORS as exc:
        return (), f"{type(exc).__name__}: {exc}"


def run_trial(kind: ConstructionKind, trial: int, seed: int, max_gates: int, max_depth: int) -> TrialResult:
    c, u = trial_case(kind, trial, seed, max_gates, max_depth)
    expected = evaluate(c, u)
    actual, error = _simulated(kind, c, u)
    return TrialResult(
        trial=trial,
        seed=seed + trial,
        gates=c.size,
        depth=metrics(c).depth,
        inputs=tuple(u),
        expected=expected,
        actual=actual,
        error=error,
    )


def _run_trial_job(job: Tuple[ConstructionKind, int, int, int, int]) -> TrialResult:
    return run_trial(*job)


# region shrinking ----------------------------------------------------------------
def still_fails(kind: ConstructionKind, c: Circuit, u: Sequence[Fraction]) -> bool:
    """Схема допустима для конструкции, а моделирование с ней расходится."""

    if admissibility_problems(kind, c):
        return False
    actual, error = _simulated(kind, c, u)
    return bool(error) or actual != evaluate(c, u)


def _without_output(c: Circuit, gate: int) -> Circuit:
    labels = {idx: label for idx, label in c.labels.items() if idx != gate}
    edges = [(src, dst) for src, dst in ordered_edges(c) if dst != gate]
    return prune(compact(labels, edges, c.declared_class))


def _bypass(c: Circuit, gate: int, pred: int) -> Circuit:
    """Гейт gate убирается, его потребители читают pred напрямую."""

    labels = {idx: label for idx, label in c.labels.items() if idx != gate}
    edges = [(pred if src == gate else src, dst) for src, dst in ordered_edges(c) if dst != gate]
    return prune(compact(labels, edges, c.declared_class))


def _candidates(c: Circuit) -> Iterator[Circuit]:
    if c.num_outputs > 1:
        for gate in c.output_gates:
            yield _without_output(c, gate)
    for idx, label in c.gates:
        if isinstance(label, (Plus, Times, Sign, Extension)):
            for pred in dict.fromkeys(c.predecessors[idx]):
                yield _bypass(c, idx, pred)


def shrink(kind: ConstructionKind, c: Circuit, u: Sequence[Fraction]) -> Circuit:
    """Жадно уменьшает схему, сохраняя расхождение; входы не меняются."""

    pruned = prune(c)
    current = pruned if still_fails(kind, pruned, u) else c
    improved = True
    while improved:
        improved = False
        for candidate in _candidates(current):
            if candidate.size < current.size and still_fails(kind, candidate, u):
                logger.debug("Уменьшение: %d → %d гейтов", current.size, candidate.size)
                current = candidate
                improved = True
                break
    return current


def write_repro(out_dir: Path, trial: int, c: Circuit, u: Sequence[Fraction]) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"repro_{trial}.circ"
    save_circuit(str(path), c)
    (out_dir / f"repro_{trial}.inputs").write_text(",".join(format_rational(x) for x in u) + "\n", encoding="utf-8")
    return path


# endregion


def run_fuzz(
    kind: ConstructionKind,
    count: int,
    seed: int,
    max_gates: int,
    max_depth: int,
    workers: int = 1,
    out_dir: Optional[Path] = None,
) -> FuzzReport:
    """
    Прогоняет count испытаний; результаты идут по номерам и обрываются на первом расхождении.

    Args:
        workers: число процессов; при 1 испытания идут в текущем процессе
        out_dir: куда писать уменьшенный воспроизводящий пример (по умолчанию текущий каталог)
    """

    report = FuzzReport(kind=kind)
    jobs = [(kind, t, seed, max_gates, max_depth) for t in range(count)]
    if workers > 1 and count > 1:
        with multiprocessing.Pool(processes=workers) as pool:
            results = pool.map(_run_trial_job, jobs)
    else:
        results = []
        for job in jobs:
            results.append(_run_trial_job(job))
            if not results[-1].ok:
                break

    for result in results:
        report.results.append(result)
        if not result.ok:
            break
    logger.info("Фаззинг %s: %d испытаний", kind.label, len(report.results))

    failure = report.first_failure
    if failure is not None:
        c, u = trial_case(kind, failure.trial, seed, max_gates, max_depth)
        small = shrink(kind, c, u)
        report.repro_path = write_repro(out_dir or Path("."), failure.trial, small, u)
        report.repro_size = small.size
        logger.warning("Расхождение в испытании %d, пример из %d гейтов: %s", failure.trial, small.size, report.repro_path)
    return report
