# Настройки по умолчанию. Скопируйте в settings.py и правьте локально.
# Любой ключ можно переопределить переменной окружения с тем же именем:
#   CHARFIN_MODE=lagrange python main_function/cli.py simulate ...

# Реализация характеристических функций χ_T^t: "zero" (через zero(x − t)) или "lagrange"
CHARFIN_MODE = "zero"

# Хранение трассы исполнения трансформера: "full" (все слои) или "last" (только последний)
TRACE_MODE = "full"

# Фаззинг
FUZZ_WORKERS = 1
FUZZ_MAX_GATES = 30
FUZZ_MAX_DEPTH = 4
DEFAULT_SEED = 0

# Логирование
LOG_LEVEL = "WARNING"
