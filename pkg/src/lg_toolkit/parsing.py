# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""String and JSON parsers for model inputs.

The ``parse_*`` functions:
- Accept ``str`` input only.
- Return a well-typed value on success.
- Raise ``ValueError`` on malformed input (never return ``None``).

The ``coerce_*`` functions take already-decoded JSON values (ints, ``"num/den"`` strings,
decimal strings) and turn them into exact types. Floats are accepted through their
shortest decimal representation so ``0.1`` means one tenth.
"""

from __future__ import annotations

import json
import re
from collections.abc import Callable
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, cast

__all__ = [
    "ItemCast",
    "coerce_int",
    "coerce_int_matrix",
    "coerce_rational",
    "coerce_rational_list",
    "coerce_rational_matrix",
    "format_rational",
    "parse_enum",
    "parse_float",
    "parse_int",
    "parse_int_list",
    "parse_json",
    "parse_list",
    "parse_rational",
    "parse_rational_list",
    "parse_str",
]

if TYPE_CHECKING:
    from lg_toolkit.lg_types import IntMatrix, JSONValue, RationalMatrix

type ItemCast[T] = Callable[[str], T]

_RATIONAL_PATTERN = re.compile(r"^\s*([+-]?\d+)\s*/\s*([+-]?\d+)\s*$")


def parse_str(value: str) -> str:
    """Return the input unchanged.

    Returns:
        str: The original input value.

    """
    return value


def parse_int(value: str) -> int:
    """Parse an integer string using base-10 semantics.

    Returns:
        int: Parsed integer.

    Raises:
        ValueError: If the value is not a valid integer literal.

    """
    try:
        return int(value.strip())
    except ValueError as exc:
        msg = f"Invalid integer literal: {value!r}"
        raise ValueError(msg) from exc


def parse_float(value: str) -> float:
    """Parse a floating-point string.

    Returns:
        float: Parsed float.

    Raises:
        ValueError: If the value is not a valid float literal.

    """
    try:
        return float(value.strip())
    except ValueError as exc:
        msg = f"Invalid float literal: {value!r}"
        raise ValueError(msg) from exc


def parse_enum[E: Enum](value: str, enum_type: type[E]) -> E:
    """Parse an enum member by value, falling back to a case-insensitive name match.

    Returns:
        E: Matching enum member.

    Raises:
        ValueError: If no member matches.

    """
    stripped = value.strip()
    for member in enum_type:
        if member.value == stripped or member.name.lower() == stripped.lower():
            return member
    choices = ", ".join(str(member.value) for member in enum_type)
    msg = f"Invalid {enum_type.__name__} value: {value!r} (expected one of {choices})"
    raise ValueError(msg)


def parse_rational(value: str) -> Fraction:
    """Parse ``"3"``, ``"-3/4"`` or ``"0.25"`` into an exact :class:`Fraction`.

    Returns:
        Fraction: Parsed rational.

    Raises:
        ValueError: If the value is not a rational literal or has a zero denominator.

    """
    match = _RATIONAL_PATTERN.match(value)
    if match is not None:
        numerator, denominator = int(match.group(1)), int(match.group(2))
        if denominator == 0:
            msg = f"Zero denominator in rational literal: {value!r}"
            raise ValueError(msg)
        return Fraction(numerator, denominator)
    try:
        return Fraction(value.strip())
    except (ValueError, ZeroDivisionError) as exc:
        msg = f"Invalid rational literal: {value!r}"
        raise ValueError(msg) from exc


def format_rational(value: Fraction | int) -> str:
    """Render a rational as ``"num/den"``, or ``"num"`` when the denominator is one.

    Returns:
        str: Canonical text form.

    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_list[T](value: str, *, sep: str = ",", item_cast: ItemCast[T] | None = None) -> list[T]:
    """Parse a separated list of values into a :class:`list`.

    Returns:
        list[T]: Parsed items after casting.

    Raises:
        ValueError: If any item is empty.

    """  # noqa: DOC502 - item cast may raise ValueError
    caster = item_cast or parse_str
    return [caster(part) for part in _split_items(value, sep)]  # type: ignore[misc]


def parse_rational_list(value: str, *, sep: str = ",") -> tuple[Fraction, ...]:
    """Parse ``"1,2,1"`` or ``"1/2, 3/4"`` into a tuple of fractions.

    Returns:
        tuple[Fraction, ...]: Parsed rationals.

    """
    return tuple(parse_list(value, sep=sep, item_cast=parse_rational))


def parse_int_list(value: str, *, sep: str = ",") -> tuple[int, ...]:
    """Parse ``"2,2,3"`` into a tuple of integers.

    Returns:
        tuple[int, ...]: Parsed integers.

    """
    return tuple(parse_list(value, sep=sep, item_cast=parse_int))


def parse_json(value: str) -> JSONValue:
    """Parse a JSON string using :func:`json.loads`.

    Returns:
        JSONValue: Parsed JSON value.

    Raises:
        ValueError: If the text is not valid JSON.

    """
    try:
        return cast("JSONValue", json.loads(value))
    except json.JSONDecodeError as exc:
        msg = f"Invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}"
        raise ValueError(msg) from exc


def coerce_rational(value: object) -> Fraction:
    """Convert a decoded JSON scalar to an exact rational.

    Returns:
        Fraction: Exact value.

    Raises:
        ValueError: For booleans, ``None`` and non-numeric values.

    """
    if isinstance(value, bool) or value is None:
        msg = f"Expected a rational number, got {value!r}"
        raise ValueError(msg)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return parse_rational(value)
    msg = f"Expected a rational number, got {type(value).__name__}"
    raise ValueError(msg)


def coerce_int(value: object) -> int:
    """Convert a decoded JSON scalar to an integer, rejecting non-integral rationals.

    Returns:
        int: Exact integer.

    Raises:
        ValueError: If the value is not integral.

    """
    rational = coerce_rational(value)
    if rational.denominator != 1:
        msg = f"Expected an integer, got {value!r}"
        raise ValueError(msg)
    return rational.numerator


def coerce_rational_list(value: object) -> tuple[Fraction, ...]:
    """Convert a JSON array of scalars to a tuple of fractions.

    Returns:
        tuple[Fraction, ...]: Exact values.

    Raises:
        ValueError: If the value is not a list.

    """
    if not isinstance(value, list):
        msg = f"Expected a JSON array, got {type(value).__name__}"
        raise ValueError(msg)  # noqa: TRY004 - callers expect ValueError for malformed input
    return tuple(coerce_rational(item) for item in value)


def coerce_rational_matrix(value: object) -> RationalMatrix:
    """Convert a JSON array of rows to a rectangular rational matrix.

    Returns:
        RationalMatrix: Exact rows.

    """
    return _coerce_matrix(value, coerce_rational)


def coerce_int_matrix(value: object) -> IntMatrix:
    """Convert a JSON array of rows to a rectangular integer matrix.

    Returns:
        IntMatrix: Integer rows.

    """
    return _coerce_matrix(value, coerce_int)


def _coerce_matrix[T](value: object, item: Callable[[object], T]) -> tuple[tuple[T, ...], ...]:
    if not isinstance(value, list) or not value or not all(isinstance(row, list) for row in value):
        msg = "Expected a non-empty JSON array of rows"
        raise ValueError(msg)
    rows = tuple(tuple(item(entry) for entry in row) for row in value)
    if len({len(row) for row in rows}) != 1 or not rows[0]:
        msg = "Matrix rows must be non-empty and of equal length"
        raise ValueError(msg)
    return rows


def _split_items(value: str, sep: str) -> list[str]:
    parts = [part.strip() for part in value.split(sep)]
    if any(part == "" for part in parts):
        msg = f"Empty item in separated list: {value!r}"
        raise ValueError(msg)
    return parts
