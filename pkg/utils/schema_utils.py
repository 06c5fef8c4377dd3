"""
schema_utils: работа с JSON-эталонами правил.

Эталоны лежат рядом с кодом, который их читает (например circuit/schemas/*.json).
"""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List


def load_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


@lru_cache(maxsize=None)
def load_schema(path: str) -> Dict[str, Any]:
    """Загружает эталон один раз за процесс."""
    return load_json(path)


def diff_keys(expected: Dict[str, Any], actual: Dict[str, Any]) -> Dict[str, List[str]]:
    added = sorted(k for k in actual if k not in expected)
    removed = sorted(k for k in expected if k not in actual)
    return {"added": added, "removed": removed}


def schema_path(package_file: str, name: str) -> str:
    """Путь к эталону в подкаталоге schemas рядом с модулем."""
    return str(Path(package_file).resolve().parent / "schemas" / name)
