"""
Командная строка: схемы, кодирование, конструкции, исполнение трансформеров, компиляция и фаззинг.

Результаты (рациональные числа, матрицы, файлы) печатаются в stdout без украшений,
статусные сообщения с эмодзи уходят в stderr.

Коды выхода: 0 — успех, 1 — смысловая ошибка или расхождение, 2 — ошибка разбора.
"""

from pathlib import Path
import sys
import argparse
import logging
from typing import List, Optional

# Добавляем корневую директорию в path
BASE_DIR = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(BASE_DIR))

from circuit import (
    CircuitError,
    CircuitFormatError,
    dump_circuit,
    evaluate,
    format_values,
    load_circuit,
    parse_inputs,
    validate,
)
from circuitizer import compile_with_provenance
from constructions import FNC_POOLS, ConstructionError, build, parse_kind, simulate
from encoding import EncodingError, SequenceFormatError, dump_sequence, encode, load_sequence
from engine import ConfigFormatError, EngineError, dump_config, load_config, run, save_config
from main_function.fuzzing import run_fuzz
from numerics import LagrangeError, RationalParseError
from utils.settings_loader import load_settings

PARSE_ERRORS = (CircuitFormatError, SequenceFormatError, ConfigFormatError, RationalParseError)
SEMANTIC_ERRORS = (CircuitError, EncodingError, EngineError, ConstructionError, LagrangeError, OSError)


def status(message: str) -> None:
    print(message, file=sys.stderr)


def emit(text: str, output: Optional[str] = None) -> None:
    """Пишет результат в файл -o или в stdout."""

    if output:
        Path(output).write_text(text, encoding="utf-8")
        status(f"💾 Записано: {output}")
    else:
        sys.stdout.write(text)


# region commands -------------------------------------------------------------------
def cmd_validate(args) -> int:
    report = validate(load_circuit(args.circuit), args.as_class)
    print(report.summary())
    return 0 if report.is_valid else 1


def cmd_eval(args) -> int:
    values = evaluate(load_circuit(args.circuit), parse_inputs(args.input))
    print(format_values(values))
    return 0


def cmd_encode(args) -> int:
    seq = encode(load_circuit(args.circuit), parse_inputs(args.input))
    emit(dump_sequence(seq), args.output)
    return 0


def cmd_build(args) -> int:
    kind = parse_kind(args.kind, args.depth, args.pool, args.charfin)
    cfg = build(kind)
    status(f"🔧 Конструкция {kind.label}: dim {cfg.dim}, {len(cfg.layers)} слоёв")
    if args.output:
        save_config(args.output, cfg)
        status(f"💾 Записано: {args.output}")
    else:
        sys.stdout.write(dump_config(cfg)[0])
    return 0


def _print_trace(trace) -> None:
    for entry in trace.layers:
        for h in range(1, len(entry.attention) + 1):
            print(f"# layer {entry.index} head {h}")
            sys.stdout.write(trace.attention_frame(entry.index, h).to_csv(sep="\t"))


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    out, trace = run(cfg, load_sequence(args.sequence), trace_mode="full" if args.trace else "last")
    emit(dump_sequence(out), args.output)
    if args.trace:
        _print_trace(trace)
    return 0


def cmd_simulate(args) -> int:
    kind = parse_kind(args.kind, args.depth, args.pool, args.charfin)
    c = load_circuit(args.circuit)
    u = parse_inputs(args.input)
    status(f"🔍 Моделирование: {kind.label}, {c.size} гейтов")
    simulated, _ = simulate(kind, c, u, trace_mode="last")
    direct = evaluate(c, u)
    print(format_values(simulated))
    print(format_values(direct))
    if simulated == direct:
        print("MATCH")
        return 0
    print("DIFF")
    status("❌ Выходы трансформера и схемы расходятся")
    return 1


def cmd_attn(args) -> int:
    cfg = load_config(args.config)
    _, trace = run(cfg, load_sequence(args.sequence), trace_mode="full")
    sys.stdout.write(trace.attention_frame(args.layer, args.head).to_csv(sep="\t"))
    return 0


def cmd_compile(args) -> int:
    cfg = load_config(args.config)
    c, provenance = compile_with_provenance(cfg, args.length)
    status(f"⚙️ Схема: {c.size} гейтов, класс {c.declared_class}")
    emit(dump_circuit(c, provenance), args.output)
    return 0


def cmd_fuzz(args) -> int:
    kind = parse_kind(args.kind, args.depth or args.max_depth, args.pool, args.charfin)
    status(f"🚀 Фаззинг {kind.label}: {args.count} испытаний, seed {args.seed}, процессов {args.workers}")
    report = run_fuzz(
        kind,
        count=args.count,
        seed=args.seed,
        max_gates=args.max_gates,
        max_depth=args.max_depth,
        workers=args.workers,
        out_dir=Path(args.out_dir),
    )
    sys.stdout.write(report.frame().to_csv(sep="\t", index=False))
    if report.ok:
        status(f"✅ Все {len(report.results)} испытаний совпали")
        return 0
    status(f"❌ Расхождение в испытании {report.first_failure.trial}")
    status(f"📝 Пример ({report.repro_size} гейтов): {report.repro_path}")
    return 1


# endregion


def make_parser() -> argparse.ArgumentParser:
    settings = load_settings()
    parser = argparse.ArgumentParser(description="Арифметические схемы и моделирующие их трансформеры")
    sub = parser.add_subparsers(dest="command", required=True)

    def construction_flags(p: argparse.ArgumentParser, depth_required: bool = True) -> None:
        p.add_argument("--kind", required=True, help="gen | fac | fsac | fnc | ext:<имена> | sign")
        p.add_argument("--depth", type=int, required=depth_required, help="Число блоков K (≥ глубины схемы)")
        p.add_argument("--pool", choices=FNC_POOLS, default="hardleft", help="Преобразование скоров для fnc")
        p.add_argument("--charfin", choices=("zero", "lagrange"), default=settings.charfin_mode)

    p = sub.add_parser("validate", help="Проверить структуру схемы")
    p.add_argument("circuit")
    p.add_argument("--class", dest="as_class", help="Проверять как bounded | semi | unbounded")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("eval", help="Вычислить схему на входах")
    p.add_argument("circuit")
    p.add_argument("--input", required=True, help="r1,r2,…")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("encode", help="Закодировать схему с входами в последовательность dim 5")
    p.add_argument("circuit")
    p.add_argument("--input", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("build", help="Построить трансформер конструкции")
    construction_flags(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("run", help="Исполнить трансформер на последовательности")
    p.add_argument("config")
    p.add_argument("sequence")
    p.add_argument("--trace", action="store_true", help="Напечатать матрицы внимания всех слоёв")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("simulate", help="Сравнить трансформер с прямым вычислением схемы")
    construction_flags(p)
    p.add_argument("circuit")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("attn", help="Матрица скоров головы (строки — y, столбцы — x)")
    p.add_argument("config")
    p.add_argument("sequence")
    p.add_argument("--layer", type=int, required=True)
    p.add_argument("--head", type=int, required=True)
    p.set_defaults(func=cmd_attn)

    p = sub.add_parser("compile", help="Скомпилировать трансформер в схему при длине n")
    p.add_argument("config")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("fuzz", help="Дифференциальный фаззинг конструкции")
    construction_flags(p, depth_required=False)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=settings.default_seed)
    p.add_argument("--workers", type=int, default=settings.fuzz_workers)
    p.add_argument("--max-gates", type=int, default=settings.fuzz_max_gates)
    p.add_argument("--max-depth", type=int, default=settings.fuzz_max_depth)
    p.add_argument("--out-dir", default=".", help="Каталог для repro_<trial>.circ")
    p.set_defaults(func=cmd_fuzz)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Точка входа.

    Returns:
        Код выхода: 0, 1 (смысловая ошибка, расхождение) или 2 (ошибка разбора)
    """

    settings = load_settings()
    logging.basicConfig(level=settings.log_level, format="%(levelname)s %(name)s: %(message)s")
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    try:
        return args.func(args)
    except PARSE_ERRORS as e:
        status(f"❌ Ошибка разбора: {e}")
        return 2
    except SEMANTIC_ERRORS as e:
        status(f"❌ {e}")
        return 1


if __name__ == "__main__":
    exit(main())
