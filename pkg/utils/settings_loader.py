"""
Загрузка настроек проекта.

Порядок: settings.py (локальный, если есть) → settings.example.py (значения по умолчанию),
затем переопределение переменными окружения с тем же именем.
"""

from __future__ import annotations

import importlib.util
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any

BASE_DIR = Path(__file__).resolve().parents[1]

_CHOICES = {
    "CHARFIN_MODE": ("zero", "lagrange"),
    "TRACE_MODE": ("full", "last"),
}


@dataclass(frozen=True)
class Settings:
    charfin_mode: str
    trace_mode: str
    fuzz_workers: int
    fuzz_max_gates: int
    fuzz_max_depth: int
    default_seed: int
    log_level: str


def _load_module():
    for name in ("settings.py", "settings.example.py"):
        path = BASE_DIR / name
        if path.exists():
            spec = importlib.util.spec_from_file_location("project_settings", str(path))
            module = importlib.util.module_from_spec(spec)
            assert spec and spec.loader
            spec.loader.exec_module(module)
            return module
    return None


def _read(module, key: str, default: Any) -> Any:
    value = getattr(module, key, default) if module is not None else default
    raw = os.environ.get(key)
    if raw is not None:
        value = type(default)(raw)
    if key in _CHOICES and value not in _CHOICES[key]:
        raise ValueError(f"{key} must be one of {_CHOICES[key]}, got {value!r}")
    return value


def load_settings() -> Settings:
    """Читает настройки с учётом переменных окружения."""

    module = _load_module()
    return Settings(
        charfin_mode=_read(module, "CHARFIN_MODE", "zero"),
        trace_mode=_read(module, "TRACE_MODE", "full"),
        fuzz_workers=_read(module, "FUZZ_WORKERS", 1),
        fuzz_max_gates=_read(module, "FUZZ_MAX_GATES", 30),
        fuzz_max_depth=_read(module, "FUZZ_MAX_DEPTH", 4),
        default_seed=_read(module, "DEFAULT_SEED", 0),
        log_level=_read(module, "LOG_LEVEL", "WARNING"),
    )
