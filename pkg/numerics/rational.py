"""
Рациональные числа и скалярные функции над ними.

Единственная область значений — fractions.Fraction: каноническая несократимая
дробь со знаменателем > 0 поддерживается самой Fraction после каждой операции.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Union

Rational = Fraction

# -5/3, 7, 1/4; без десятичной точки, знаменатель положительный
_LITERAL_RE = re.compile(r"^(-?)([0-9]+)(?:/([0-9]+))?$")

_ZERO = Fraction(0)
_ONE = Fraction(1)


class RationalParseError(Exception):
    """Некорректный текстовый литерал рационального числа."""


def parse_rational(text: str) -> Fraction:
    """
    Разбирает литерал вида `-5/3`, `7`, `1/4`.

    Raises:
        RationalParseError: десятичная точка, пустая строка, нулевой знаменатель и т.п.
    """

    match = _LITERAL_RE.match(text.strip())
    if match is None:
        raise RationalParseError(f"invalid rational literal: {text!r}")
    minus, numerator, denominator = match.groups()
    if denominator is not None and int(denominator) == 0:
        raise RationalParseError(f"zero denominator in literal: {text!r}")
    value = Fraction(int(numerator), int(denominator) if denominator else 1)
    return -value if minus else value


def format_rational(value: Fraction) -> str:
    """Каноническая запись: `p/q` или целое без знаменателя."""
    return str(Fraction(value))


def to_rational(value: Union[int, str, Fraction]) -> Fraction:
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact values")
    return Fraction(value)


def lean_rational(x: Union[int, Fraction]) -> Union[int, Fraction]:
    """Целое значение как int, нецелое остаётся Fraction."""
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def is_integer(value: Fraction) -> bool:
    return Fraction(value).denominator == 1


def is_natural(value: Fraction) -> bool:
    return is_integer(value) and value >= 0


def sign(x: Fraction) -> Fraction:
    if x > 0:
        return _ONE
    if x < 0:
        return -_ONE
    return _ZERO


def zero_fn(x: Fraction) -> Fraction:
    return _ONE if x == 0 else _ZERO


def charfin(r: Fraction, x: Fraction) -> Fraction:
    """χ_r(x) ровно как zero(x + (−1)·r), чтобы схема совпадала с формулой."""
    return zero_fn(x + (-1) * r)


def relu(x: Fraction) -> Fraction:
    return Fraction(x) if x > 0 else _ZERO


def all_distinct(values: Iterable[Fraction]) -> bool:
    seen = list(values)
    return len(set(seen)) == len(seen)
