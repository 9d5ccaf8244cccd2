# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Tests for sparse polynomials, the text parser and binary forms."""

from __future__ import annotations

from fractions import Fraction

import pytest

from lg_toolkit.catalog import KNOWN_BIDEGREE_PAIRS
from lg_toolkit.polyarith import BinaryForm, SparsePoly, involution_b_from_s, involution_s_from_b, parse_poly


def test_zero_coefficients_are_dropped() -> None:
    """Cancelling terms leave no stored entry."""
    p = SparsePoly(2, [((1, 0), 2), ((1, 0), -2), ((0, 1), 1)])
    assert dict(p.terms) == {(0, 1): Fraction(1)}
    assert (p - p).is_zero


def test_exponent_validation() -> None:
    """Exponents must match the ring and be non-negative."""
    with pytest.raises(ValueError, match="invalid for 2 variables"):
        SparsePoly(2, {(1,): 1})
    with pytest.raises(ValueError, match="invalid for 1 variables"):
        SparsePoly(1, {(-1,): 1})


def test_arithmetic_is_exact() -> None:
    """Sums, products and powers keep rational coefficients."""
    x = SparsePoly.variable(2, 0)
    y = SparsePoly.variable(2, 1)
    square = (x + y) ** 2
    assert square == x * x + 2 * x * y + y * y
    assert square.is_exact
    assert (square * Fraction(1, 2)).coefficient((1, 1)) == 1
    assert (1 - x).constant_term() == 1


def test_complex_promotion_is_one_way() -> None:
    """Mixing with a complex value promotes; the exact operand is untouched."""
    x = SparsePoly.variable(1, 0)
    mixed = x + 1j
    assert not mixed.is_exact
    assert x.is_exact
    assert mixed.evaluate([2]) == 2 + 1j


def test_mismatched_rings_raise() -> None:
    """Polynomials in different rings cannot be combined."""
    with pytest.raises(ValueError, match="Cannot combine"):
        _ = SparsePoly.variable(2, 0) + SparsePoly.variable(3, 0)


def test_negative_power_raises() -> None:
    """Only non-negative powers exist."""
    with pytest.raises(ValueError, match="Negative polynomial power"):
        _ = SparsePoly.variable(1, 0) ** -1


def test_evaluate_exact_and_numeric() -> None:
    """Rational points give exact values, float points give complex ones."""
    f = parse_poly("4*p0*p2 - p1^2")
    assert f.evaluate([Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]) == 0
    assert isinstance(f.evaluate([1, 2, 3]), Fraction)
    assert f.evaluate([1.0, 2.0, 3.0]) == pytest.approx(8 + 0j)
    with pytest.raises(ValueError, match="3 variables"):
        f.evaluate([1, 2])


def test_degree_and_homogeneity() -> None:
    """Total degree, partial degree and homogeneity."""
    f = parse_poly("p0^2*p1 + p2^3")
    assert f.degree == 3  # noqa: PLR2004
    assert f.degree_in([0]) == 2  # noqa: PLR2004
    assert f.degree_in([1, 2]) == 3  # noqa: PLR2004
    assert f.is_homogeneous()
    assert not parse_poly("p0 + 1").is_homogeneous()


def test_diff() -> None:
    """Formal partial derivatives."""
    f = parse_poly("p0^3*p1 - 2*p1")
    assert f.diff(0) == parse_poly("3*p0^2*p1")
    assert f.diff(1) == parse_poly("p0^3 - 2", nvars=2)
    with pytest.raises(IndexError):
        f.diff(2)


def test_substitute_restrict_embed() -> None:
    """Substitution keeps the ring, restriction drops a variable, embedding relocates."""
    f = parse_poly("p0*p1 + p1^2 + p2")
    assert f.substitute(1, 2) == parse_poly("2*p0 + 4 + p2", nvars=3)
    assert f.restrict(1) == parse_poly("p1", nvars=2)
    assert parse_poly("p0*p1").embed(4, [3, 1]) == parse_poly("p3*p1", nvars=4)


def test_compose() -> None:
    """Composition substitutes polynomials for variables."""
    t = SparsePoly.variable(1, 0)
    f = parse_poly("p0*p1 - p2")
    assert f.compose([t, t**2, t**3]) == SparsePoly.zero(1)


@pytest.mark.parametrize(
    "text",
    [
        pytest.param("4*p0*p2 - p1^2", id="hardy-weinberg"),
        pytest.param("3/2*p0^2*p1 - p2 + 7", id="rational"),
        pytest.param("-p0", id="negative-lead"),
    ],
)
def test_to_text_reads_back(text: str) -> None:
    """Text output parses back to the same polynomial."""
    f = parse_poly(text)
    assert parse_poly(f.to_text(), nvars=f.nvars) == f


def test_json_round_trip_and_text_form() -> None:
    """JSON term lists and plain strings both decode."""
    f = parse_poly("1/3*p0^2 - p1")
    assert SparsePoly.from_json(f.to_json()) == f
    assert SparsePoly.from_json("p0 - p1", nvars=3).nvars == 3  # noqa: PLR2004
    with pytest.raises(ValueError, match="terms"):
        SparsePoly.from_json({"nvars": 1})


def test_parser_operators() -> None:
    """The parser understands ** powers, implicit products and constant division."""
    assert parse_poly("2(p0 + p1)") == parse_poly("2*p0 + 2*p1")
    assert parse_poly("p0**2/4") == parse_poly("1/4*p0^2")
    assert parse_poly("0.5*p0") == parse_poly("1/2*p0")
    assert parse_poly("x*y", names=["x", "y"]) == SparsePoly.monomial((1, 1))


@pytest.mark.parametrize(
    ("text", "message"),
    [
        pytest.param("p0 / p1", "non-zero constants", id="division-by-variable"),
        pytest.param("p0^p1", "non-negative integer", id="symbolic-exponent"),
        pytest.param("(p0 + p1", "end of polynomial", id="unclosed"),
        pytest.param("q0 + p1", "Unknown variable", id="unknown-name"),
        pytest.param("p0 $ p1", "Invalid character", id="bad-character"),
        pytest.param("   ", "Empty polynomial", id="empty"),
    ],
)
def test_parser_errors(text: str, message: str) -> None:
    """Malformed text raises ValueError with a useful message."""
    with pytest.raises(ValueError, match=message):
        parse_poly(text)


def test_parser_nvars_too_small() -> None:
    """Declared ring size must cover every variable."""
    with pytest.raises(ValueError, match="nvars=2"):
        parse_poly("p0 + p2", nvars=2)


def test_binary_form_text() -> None:
    """Binary forms render as sums of p^a u^b."""
    form = BinaryForm.of([4, 6, 6, 6, 2, 0])
    assert form.to_text() == "4p^5 + 6p^4u + 6p^3u^2 + 6p^2u^3 + 2pu^4"
    assert form.leading == 4  # noqa: PLR2004
    assert form.trailing == 2  # noqa: PLR2004
    assert BinaryForm.of([0, 0]).to_text() == "0"
    with pytest.raises(ValueError, match="at least one"):
        BinaryForm(())


@pytest.mark.parametrize("name", sorted(KNOWN_BIDEGREE_PAIRS))
def test_involution_reproduces_known_pairs(name: str) -> None:
    """Both directions of the involution map each recorded pair onto the other."""
    bidegree, sectional = KNOWN_BIDEGREE_PAIRS[name]
    assert involution_b_from_s(sectional) == bidegree
    assert involution_s_from_b(bidegree) == sectional


@pytest.mark.parametrize(
    "coeffs",
    [
        pytest.param((3, 5, 2, 0), id="cubic"),
        pytest.param((7, 1, 0), id="quadratic"),
        pytest.param((1,), id="constant"),
    ],
)
def test_involution_is_invertible(coeffs: tuple[int, ...]) -> None:
    """B to S to B is the identity on integer forms."""
    form = BinaryForm.of(coeffs)
    assert involution_b_from_s(involution_s_from_b(form)) == form


def test_binary_form_rejects_non_integers() -> None:
    """Coefficients must be integers."""
    with pytest.raises(ValueError, match="must be integers"):
        BinaryForm((1, 0.5))  # type: ignore[arg-type]


def test_binary_form_json() -> None:
    """JSON carries degree, coefficients and text."""
    assert BinaryForm.of([1, 2, 0]).to_json() == {"degree": 2, "coeffs": [1, 2, 0], "text": "p^2 + 2pu"}
