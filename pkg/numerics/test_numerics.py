#!/usr/bin/env python3
"""
Тесты рациональной арифметики, sign/zero/χ и полиномов Лагранжа.
"""

import sys
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

BASE_DIR = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(BASE_DIR))

from numerics import (
    ExactArith,
    LagrangeError,
    LagrangeTable,
    RationalParseError,
    charfin,
    charfin_via,
    format_rational,
    is_integer,
    is_natural,
    lean_rational,
    lagrange_eval,
    parse_rational,
    relu,
    sign,
    zero_fn,
)

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=50)


def test_literals():
    assert parse_rational("-5/3") == F(-5, 3)
    assert parse_rational("7") == F(7)
    assert parse_rational("2/4") == F(1, 2)
    assert format_rational(F(10, 4)) == "5/2"
    assert format_rational(F(-6, 3)) == "-2"
    for bad in ("1.5", "", "1/0", "1/-2", "--1", "a"):
        with pytest.raises(RationalParseError):
            parse_rational(bad)


@pytest.mark.parametrize("text", ["٣/٤", "７", "-²", "1/٢"])
def test_literals_accept_ascii_digits_only(text):
    with pytest.raises(RationalParseError):
        parse_rational(text)


def test_lean_rational_keeps_value():
    assert type(lean_rational(F(6, 3))) is int and lean_rational(F(6, 3)) == 2
    assert lean_rational(F(1, 3)) == F(1, 3)
    assert lean_rational(5) == 5


@settings(max_examples=500)
@given(rationals, rationals)
def test_exact_backend_matches_fraction_arithmetic(x, y):
    ops = ExactArith()
    assert ops.total([x, y, ops.const(1)]) == x + y + 1
    assert ops.product([x, y]) == x * y
    assert ops.sign(x - y) == sign(x - y)
    assert charfin_via(ops, lean_rational(y), x) == charfin(y, x)


def test_sign_zero_relu_examples():
    assert sign(F(0)) == 0
    assert sign(F(7, 3)) == 1
    assert sign(F(-5)) == -1
    assert zero_fn(F(0)) == 1
    assert zero_fn(F(5)) == 0
    assert zero_fn(F(-1, 4)) == 0
    assert relu(F(3)) == 3 and relu(F(-2)) == 0 and relu(F(0)) == 0


def test_charfin_examples():
    assert charfin(F(4), F(4)) == 1
    assert charfin(F(4), F(5)) == 0
    assert charfin(F(1, 4), F(1, 4)) == 1


def test_lagrange_examples():
    table = LagrangeTable.build([1, 2, 5], 2)
    assert lagrange_eval(table, 2) == 1
    assert lagrange_eval(table, 5) == 0
    assert lagrange_eval(table, 0) == F(-5, 3)


def test_lagrange_rejects_bad_tables():
    with pytest.raises(LagrangeError):
        LagrangeTable.build([1, 2, 2], 1)
    with pytest.raises(LagrangeError):
        LagrangeTable.build([1, 2], 3)


def test_membership_predicates():
    assert is_natural(F(3)) and not is_natural(F(-3)) and not is_natural(F(1, 2))
    assert is_integer(F(-3)) and not is_integer(F(7, 2))


@settings(max_examples=10_000, deadline=None)
@given(rationals, rationals, rationals)
def test_field_laws(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x + y == y + x and x * y == y * x
    assert x * (y + z) == x * y + x * z
    assert x + (-x) == 0
    if x != 0:
        assert x * (1 / x) == 1


@settings(max_examples=10_000, deadline=None)
@given(rationals, rationals, rationals)
def test_order_compatibility(x, y, z):
    if x <= y:
        assert x + z <= y + z
        if z >= 0:
            assert x * z <= y * z and z * x <= z * y


@given(rationals)
def test_sign_squared_is_one_minus_zero(x):
    assert sign(x) * sign(x) == 1 - zero_fn(x)
    assert relu(x) == x * (sign(x) ** 2 + sign(x)) / 2


@settings(max_examples=100)
@given(st.lists(rationals, min_size=1, max_size=8, unique=True), st.data())
def test_lagrange_agrees_with_charfin_on_support(support, data):
    target = data.draw(st.sampled_from(support))
    table = LagrangeTable.build(support, target)
    for x in support:
        assert lagrange_eval(table, x) == charfin(target, x)


def test_charfin_realizations_agree_on_type_set():
    ops = ExactArith()
    support = [1, 2, 3, 4, 5, 6]
    for target in support:
        for x in support:
            zero_based = charfin_via(ops, target, F(x), "zero")
            poly_based = charfin_via(ops, target, F(x), "lagrange", support)
            assert zero_based == poly_based == charfin(F(target), F(x))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
