"""
Файл последовательности: строка `dim <d>`, затем по вектору на строку,
компоненты — рациональные литералы через пробел в порядке s p i t v [one ssq isq bin].
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import List

from numerics import RationalParseError, format_rational, parse_rational

from .encoder import EncodedSequence, EncodedVector
from .type_config import EncodingError

logger = logging.getLogger(__name__)


class SequenceFormatError(EncodingError):
    """Синтаксическая ошибка в файле последовательности."""


def parse_sequence(text: str) -> EncodedSequence:
    dim = None
    vectors: List[EncodedVector] = []
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if dim is None:
            if parts[0] != "dim" or len(parts) != 2 or not parts[1].isdigit():
                raise SequenceFormatError(f"line {line_no}: expected `dim <d>` header")
            dim = int(parts[1])
            continue
        if len(parts) != dim:
            raise SequenceFormatError(f"line {line_no}: expected {dim} components, got {len(parts)}")
        try:
            vectors.append(tuple(parse_rational(part) for part in parts))
        except RationalParseError as exc:
            raise SequenceFormatError(f"line {line_no}: {exc}") from exc
    if dim is None:
        raise SequenceFormatError("missing `dim <d>` header")
    try:
        return EncodedSequence(dim=dim, vectors=tuple(vectors))
    except EncodingError as exc:
        raise SequenceFormatError(str(exc)) from exc


def dump_sequence(seq: EncodedSequence) -> str:
    lines = [f"dim {seq.dim}"]
    lines += [" ".join(format_rational(x) for x in vec) for vec in seq.vectors]
    return "\n".join(lines) + "\n"


def load_sequence(path: str) -> EncodedSequence:
    return parse_sequence(Path(path).read_text(encoding="utf-8"))


def save_sequence(path: str, seq: EncodedSequence) -> None:
    Path(path).write_text(dump_sequence(seq), encoding="utf-8")
    logger.info("Последовательность записана: %s (%d векторов, dim %d)", path, len(seq), seq.dim)
