"""
Общие утилиты: настройки проекта и JSON-эталоны.
"""
