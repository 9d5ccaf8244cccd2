# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Tests for string and JSON parsers."""

from __future__ import annotations

from fractions import Fraction

import pytest

from lg_toolkit.config import StartKind
from lg_toolkit.parsing import (
    coerce_int,
    coerce_int_matrix,
    coerce_rational,
    coerce_rational_list,
    coerce_rational_matrix,
    format_rational,
    parse_enum,
    parse_float,
    parse_int,
    parse_int_list,
    parse_json,
    parse_list,
    parse_rational,
    parse_rational_list,
    parse_str,
)


def test_parse_str_returns_input() -> None:
    """parse_str is the identity."""
    assert parse_str(" raw ") == " raw "


def test_parse_int_and_float() -> None:
    """Numeric parsers trim whitespace and reject garbage."""
    assert parse_int(" 42 ") == 42  # noqa: PLR2004
    assert parse_float("1e-8") == pytest.approx(1e-8)
    with pytest.raises(ValueError, match="Invalid integer literal"):
        parse_int("4.2")
    with pytest.raises(ValueError, match="Invalid float literal"):
        parse_float("x")


@pytest.mark.parametrize(
    ("value", "expected"),
    [
        pytest.param("3", Fraction(3), id="integer"),
        pytest.param("-3/4", Fraction(-3, 4), id="fraction"),
        pytest.param(" 6 / 8 ", Fraction(3, 4), id="spaced-fraction"),
        pytest.param("0.25", Fraction(1, 4), id="decimal"),
    ],
)
def test_parse_rational_is_exact(value: str, expected: Fraction) -> None:
    """Rationals parse exactly from integer, fraction and decimal text."""
    assert parse_rational(value) == expected


@pytest.mark.parametrize(
    "value",
    [pytest.param("1/0", id="zero-denominator"), pytest.param("one", id="word"), pytest.param("", id="empty")],
)
def test_parse_rational_rejects_malformed(value: str) -> None:
    """Malformed rationals raise ValueError."""
    with pytest.raises(ValueError, match="rational literal"):
        parse_rational(value)


def test_format_rational() -> None:
    """Integers drop the denominator, other values use num/den."""
    assert format_rational(Fraction(1, 4)) == "1/4"
    assert format_rational(Fraction(8, 4)) == "2"
    assert format_rational(-3) == "-3"


def test_parse_lists() -> None:
    """Separated lists parse item by item."""
    assert parse_rational_list("1,2,1") == (Fraction(1), Fraction(2), Fraction(1))
    assert parse_rational_list("1/2; 3/4", sep=";") == (Fraction(1, 2), Fraction(3, 4))
    assert parse_int_list("2, 2, 3") == (2, 2, 3)
    assert parse_list("a,b") == ["a", "b"]


def test_parse_list_rejects_empty_item() -> None:
    """An empty item is an error rather than a silent zero."""
    with pytest.raises(ValueError, match="Empty item"):
        parse_rational_list("1,,2")


def test_parse_enum_by_value_or_name() -> None:
    """Enums parse by value or by case-insensitive name."""
    assert parse_enum("td", StartKind) is StartKind.TOTAL_DEGREE
    assert parse_enum("MULTIHOMOGENEOUS", StartKind) is StartKind.MULTIHOMOGENEOUS
    with pytest.raises(ValueError, match="expected one of td, mhom"):
        parse_enum("bezout", StartKind)


def test_parse_json() -> None:
    """JSON decoding errors become ValueError with a position."""
    assert parse_json('{"n": 2}') == {"n": 2}
    with pytest.raises(ValueError, match="line 1 column"):
        parse_json("{n: 2}")


def test_coerce_rational_accepts_json_scalars() -> None:
    """Ints, decimal floats and num/den strings coerce exactly."""
    assert coerce_rational(3) == 3  # noqa: PLR2004
    assert coerce_rational(0.1) == Fraction(1, 10)
    assert coerce_rational("2/6") == Fraction(1, 3)


@pytest.mark.parametrize(
    "value",
    [pytest.param(True, id="bool"), pytest.param(None, id="none"), pytest.param([1], id="list")],
)
def test_coerce_rational_rejects_non_numbers(value: object) -> None:
    """Booleans, null and containers are not numbers."""
    with pytest.raises(ValueError, match="Expected a rational number"):
        coerce_rational(value)


def test_coerce_int_rejects_fractions() -> None:
    """Non-integral values are rejected."""
    assert coerce_int("4/2") == 2  # noqa: PLR2004
    with pytest.raises(ValueError, match="Expected an integer"):
        coerce_int("1/2")


def test_coerce_collections() -> None:
    """Lists and matrices coerce entrywise and must be rectangular."""
    assert coerce_rational_list([1, "1/2"]) == (Fraction(1), Fraction(1, 2))
    assert coerce_int_matrix([[1, 0], [0, 1]]) == ((1, 0), (0, 1))
    assert coerce_rational_matrix([["1/3"]]) == ((Fraction(1, 3),),)
    with pytest.raises(ValueError, match="equal length"):
        coerce_int_matrix([[1, 2], [3]])
    with pytest.raises(ValueError, match="JSON array"):
        coerce_rational_list("1,2")
