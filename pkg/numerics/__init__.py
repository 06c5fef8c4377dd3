"""
Точная рациональная арифметика и скалярные функции: sign, zero, χ, relu, полиномы Лагранжа.
"""

from .rational import (
    Rational,
    RationalParseError,
    charfin,
    format_rational,
    is_integer,
    is_natural,
    lean_rational,
    parse_rational,
    relu,
    sign,
    to_rational,
    zero_fn,
)
from .lagrange import LagrangeError, LagrangeTable, lagrange_eval
from .arith import ExactArith, charfin_via, lagrange_via, zero_via

__all__ = [
    "Rational",
    "RationalParseError",
    "charfin",
    "format_rational",
    "is_integer",
    "is_natural",
    "lean_rational",
    "parse_rational",
    "relu",
    "sign",
    "to_rational",
    "zero_fn",
    "LagrangeError",
    "LagrangeTable",
    "lagrange_eval",
    "ExactArith",
    "charfin_via",
    "lagrange_via",
    "zero_via",
]
