# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Sparse multivariate polynomials and binary forms.

:class:`SparsePoly` is an immutable map from exponent tuples to coefficients. Coefficients
are exact :class:`~fractions.Fraction` values for construction and combinatorics, or
``complex`` for numerical work. Combining an exact polynomial with a complex one promotes
the result to complex; nothing ever converts back.

:class:`BinaryForm` stores integer coefficients ``c_0..c_n`` of ``p^(n-i) u^i`` and
:func:`involution_b_from_s` / :func:`involution_s_from_b` move between sectional ML degrees
and ML bidegrees by exact integer division.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from types import MappingProxyType
from typing import TYPE_CHECKING, Final, Self, cast

from lg_toolkit.parsing import format_rational

if TYPE_CHECKING:
    from lg_toolkit.lg_types import Coefficient, Exponent, JSONDict, JSONValue

__all__ = [
    "BinaryForm",
    "SparsePoly",
    "involution_b_from_s",
    "involution_s_from_b",
    "parse_poly",
]

type Scalar = int | Fraction | complex | float

_TOKEN_PATTERN: Final = re.compile(
    r"\s*(?:(?P<number>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()]))"
)
_DEFAULT_NAME: Final = re.compile(r"^p(\d+)$")


def _as_coefficient(value: Scalar) -> Coefficient:
    if isinstance(value, bool):
        msg = "Boolean is not a polynomial coefficient"
        raise TypeError(msg)
    if isinstance(value, int | Fraction):
        return Fraction(value)
    if isinstance(value, float | complex):
        return complex(value)
    msg = f"Unsupported coefficient type: {type(value).__name__}"
    raise TypeError(msg)


class SparsePoly:
    """Immutable sparse polynomial in ``nvars`` variables.

    Zero coefficients are never stored. All exponent tuples have length ``nvars``.
    """

    __slots__ = ("_exact", "_hash", "_nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Scalar] | Iterable[tuple[Exponent, Scalar]] = ()) -> None:
        """Build a polynomial, merging repeated exponents and dropping zero coefficients.

        Raises:
            ValueError: If an exponent has the wrong length or a negative entry.

        """
        if nvars < 0:
            msg = f"nvars must be non-negative, got {nvars}"
            raise ValueError(msg)
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[Exponent, Coefficient] = {}
        for raw_exp, raw_coeff in items:
            exp = tuple(int(e) for e in raw_exp)
            if len(exp) != nvars or any(e < 0 for e in exp):
                msg = f"Exponent {raw_exp!r} is invalid for {nvars} variables"
                raise ValueError(msg)
            coeff = _as_coefficient(raw_coeff)
            merged[exp] = merged[exp] + coeff if exp in merged else coeff
        exact = all(isinstance(c, Fraction) for c in merged.values())
        if not exact:
            merged = {e: complex(c) for e, c in merged.items()}
        self._nvars = nvars
        self._terms: Mapping[Exponent, Coefficient] = MappingProxyType({e: c for e, c in merged.items() if c != 0})
        self._exact = exact
        self._hash: int | None = None

    @classmethod
    def zero(cls, nvars: int) -> Self:
        """Return the zero polynomial.

        Returns:
            Self: Polynomial with no terms.

        """
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, value: Scalar) -> Self:
        """Return a constant polynomial.

        Returns:
            Self: ``value`` as a polynomial.

        """
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int) -> Self:
        """Return the polynomial ``x_index``.

        Returns:
            Self: Degree-one monomial.

        Raises:
            IndexError: If ``index`` is out of range.

        """
        if not 0 <= index < nvars:
            msg = f"Variable index {index} out of range for {nvars} variables"
            raise IndexError(msg)
        exp = [0] * nvars
        exp[index] = 1
        return cls(nvars, {tuple(exp): 1})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coefficient: Scalar = 1) -> Self:
        """Return ``coefficient * x^exponent``.

        Returns:
            Self: Single-term polynomial.

        """
        return cls(len(exponent), {tuple(exponent): coefficient})

    @classmethod
    def linear_form(cls, coefficients: Sequence[Scalar], constant: Scalar = 0) -> Self:
        """Return ``sum_i coefficients[i] * x_i + constant``.

        Returns:
            Self: Affine-linear polynomial.

        """
        nvars = len(coefficients)
        terms: list[tuple[Exponent, Scalar]] = [((0,) * nvars, constant)]
        for index, coeff in enumerate(coefficients):
            exp = [0] * nvars
            exp[index] = 1
            terms.append((tuple(exp), coeff))
        return cls(nvars, terms)

    @property
    def nvars(self) -> int:
        """Number of variables."""
        return self._nvars

    @property
    def terms(self) -> Mapping[Exponent, Coefficient]:
        """Read-only map from exponent tuple to coefficient."""
        return self._terms

    @property
    def is_exact(self) -> bool:
        """Whether every coefficient is a :class:`Fraction`."""
        return self._exact

    @property
    def is_zero(self) -> bool:
        """Whether the polynomial has no terms."""
        return not self._terms

    @property
    def degree(self) -> int:
        """Total degree; ``0`` for constants and the zero polynomial."""
        return max((sum(exp) for exp in self._terms), default=0)

    def degree_in(self, indices: Iterable[int]) -> int:
        """Return the degree in the given subset of variables.

        Returns:
            int: Largest partial degree over the subset.

        """
        chosen = tuple(indices)
        return max((sum(exp[i] for i in chosen) for exp in self._terms), default=0)

    def is_homogeneous(self) -> bool:
        """Return whether every term has the same total degree.

        Returns:
            bool: ``True`` for homogeneous (and zero) polynomials.

        """
        return len({sum(exp) for exp in self._terms}) <= 1

    def constant_term(self) -> Coefficient:
        """Return the coefficient of the zero exponent.

        Returns:
            Coefficient: Constant coefficient, ``Fraction(0)`` when absent.

        """
        return self._terms.get((0,) * self._nvars, Fraction(0))

    def coefficient(self, exponent: Sequence[int]) -> Coefficient:
        """Return the coefficient of ``x^exponent`` (zero when absent).

        Returns:
            Coefficient: Stored coefficient.

        """
        return self._terms.get(tuple(exponent), Fraction(0))

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other: SparsePoly | Scalar) -> SparsePoly:
        if isinstance(other, SparsePoly):
            if other.nvars != self._nvars:
                msg = f"Cannot combine polynomials in {self._nvars} and {other.nvars} variables"
                raise ValueError(msg)
            return other
        return SparsePoly.constant(self._nvars, other)

    def __add__(self, other: SparsePoly | Scalar) -> SparsePoly:
        """Return the sum."""
        rhs = self._coerce(other)
        merged: dict[Exponent, Coefficient] = dict(self._terms)
        for exp, coeff in rhs.terms.items():
            merged[exp] = merged[exp] + coeff if exp in merged else coeff
        return SparsePoly(self._nvars, merged)

    __radd__ = __add__

    def __neg__(self) -> SparsePoly:
        """Return the additive inverse."""
        return SparsePoly(self._nvars, {exp: -coeff for exp, coeff in self._terms.items()})

    def __sub__(self, other: SparsePoly | Scalar) -> SparsePoly:
        """Return the difference."""
        return self + (-self._coerce(other))

    def __rsub__(self, other: SparsePoly | Scalar) -> SparsePoly:
        """Return ``other - self``."""
        return self._coerce(other) - self

    def __mul__(self, other: SparsePoly | Scalar) -> SparsePoly:
        """Return the product."""
        if not isinstance(other, SparsePoly):
            factor = _as_coefficient(other)
            return SparsePoly(self._nvars, {exp: coeff * factor for exp, coeff in self._terms.items()})
        rhs = self._coerce(other)
        product: dict[Exponent, Coefficient] = {}
        for exp_a, coeff_a in self._terms.items():
            for exp_b, coeff_b in rhs.terms.items():
                exp = tuple(a + b for a, b in zip(exp_a, exp_b, strict=True))
                value = coeff_a * coeff_b
                product[exp] = product[exp] + value if exp in product else value
        return SparsePoly(self._nvars, product)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> SparsePoly:
        """Return ``self ** exponent`` for a non-negative integer exponent.

        Raises:
            ValueError: For negative exponents.

        """
        if exponent < 0:
            msg = f"Negative polynomial power: {exponent}"
            raise ValueError(msg)
        result = SparsePoly.constant(self._nvars, 1)
        base: SparsePoly = self
        while exponent:
            if exponent & 1:
                result *= base
            base *= base
            exponent >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        """Compare by variable count and terms."""
        if isinstance(other, int | Fraction | complex | float) and not isinstance(other, bool):
            return self == SparsePoly.constant(self._nvars, other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self._nvars == other.nvars and dict(self._terms) == dict(other.terms)

    def __hash__(self) -> int:
        """Hash over the variable count and terms."""
        if self._hash is None:
            self._hash = hash((self._nvars, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and substitution -----------------------------------------

    def evaluate(self, point: Sequence[Scalar]) -> Coefficient:
        """Evaluate the polynomial at ``point``.

        The result is an exact :class:`Fraction` when the polynomial is exact and every
        coordinate is an ``int`` or :class:`Fraction`; otherwise it is ``complex``.

        Returns:
            Coefficient: Value of the polynomial.

        Raises:
            ValueError: If ``point`` has the wrong length.

        """
        if len(point) != self._nvars:
            msg = f"Point has {len(point)} coordinates, polynomial has {self._nvars} variables"
            raise ValueError(msg)
        exact = self._exact and all(isinstance(x, int | Fraction) and not isinstance(x, bool) for x in point)
        values: Sequence[Coefficient] = (
            [Fraction(x) for x in point] if exact else [complex(x) for x in point]  # type: ignore[arg-type]
        )
        total: Coefficient = Fraction(0) if exact else 0j
        for exp, coeff in self._terms.items():
            term: Coefficient = coeff if exact else complex(coeff)
            for value, power in zip(values, exp, strict=True):
                if power:
                    term *= value**power
            total += term
        return total

    def diff(self, index: int) -> SparsePoly:
        """Return the formal partial derivative with respect to ``x_index``.

        Returns:
            SparsePoly: Derivative in the same ring.

        Raises:
            IndexError: If ``index`` is out of range.

        """
        if not 0 <= index < self._nvars:
            msg = f"Variable index {index} out of range for {self._nvars} variables"
            raise IndexError(msg)
        terms: list[tuple[Exponent, Coefficient]] = []
        for exp, coeff in self._terms.items():
            power = exp[index]
            if power:
                lowered = exp[:index] + (power - 1,) + exp[index + 1 :]
                terms.append((lowered, coeff * power))
        return SparsePoly(self._nvars, terms)

    def substitute(self, index: int, value: Scalar) -> SparsePoly:
        """Replace ``x_index`` by a constant, keeping the variable count.

        Returns:
            SparsePoly: Polynomial no longer depending on ``x_index``.

        """
        scalar = _as_coefficient(value)
        terms: list[tuple[Exponent, Coefficient]] = []
        for exp, coeff in self._terms.items():
            power = exp[index]
            cleared = exp[:index] + (0,) + exp[index + 1 :]
            terms.append((cleared, coeff * scalar**power if power else coeff))
        return SparsePoly(self._nvars, terms)

    def restrict(self, index: int) -> SparsePoly:
        """Set ``x_index`` to zero and drop it from the ring.

        Returns:
            SparsePoly: Polynomial in ``nvars - 1`` variables.

        """
        kept = [(exp[:index] + exp[index + 1 :], coeff) for exp, coeff in self._terms.items() if exp[index] == 0]
        return SparsePoly(self._nvars - 1, kept)

    def embed(self, nvars: int, positions: Sequence[int]) -> SparsePoly:
        """Map variable ``i`` to variable ``positions[i]`` of a larger ring.

        Returns:
            SparsePoly: The same polynomial in ``nvars`` variables.

        Raises:
            ValueError: If ``positions`` does not cover every variable.

        """
        if len(positions) != self._nvars:
            msg = f"Expected {self._nvars} positions, got {len(positions)}"
            raise ValueError(msg)
        terms: list[tuple[Exponent, Coefficient]] = []
        for exp, coeff in self._terms.items():
            target = [0] * nvars
            for source, power in enumerate(exp):
                target[positions[source]] += power
            terms.append((tuple(target), coeff))
        return SparsePoly(nvars, terms)

    def compose(self, polys: Sequence[SparsePoly]) -> SparsePoly:
        """Substitute ``polys[i]`` for ``x_i``.

        Returns:
            SparsePoly: Composite polynomial in the ring of ``polys``.

        Raises:
            ValueError: If the substitutions do not match the variable count or rings.

        """
        if len(polys) != self._nvars or not polys:
            msg = f"Expected {self._nvars} substitutions, got {len(polys)}"
            raise ValueError(msg)
        target = polys[0].nvars
        if any(poly.nvars != target for poly in polys):
            msg = "Substituted polynomials must share a ring"
            raise ValueError(msg)
        cache: dict[tuple[int, int], SparsePoly] = {}
        result = SparsePoly.zero(target)
        for exp, coeff in self._terms.items():
            term = SparsePoly.constant(target, coeff)
            for index, power in enumerate(exp):
                if power:
                    key = (index, power)
                    if key not in cache:
                        cache[key] = polys[index] ** power
                    term *= cache[key]
            result += term
        return result

    def to_complex(self) -> SparsePoly:
        """Return the same polynomial with complex coefficients.

        Returns:
            SparsePoly: Floating copy; the exact original is untouched.

        """
        return SparsePoly(self._nvars, {exp: complex(coeff) for exp, coeff in self._terms.items()})

    # -- text and JSON ------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exponent, Coefficient]]:
        """Return terms in canonical order: higher total degree first, then lexicographically descending.

        Returns:
            list[tuple[Exponent, Coefficient]]: Ordered term list.

        """
        return sorted(self._terms.items(), key=lambda item: (-sum(item[0]), tuple(-e for e in item[0])))

    def to_text(self, names: Sequence[str] | None = None) -> str:
        """Render as ``"3/2*p0^2*p1 - p2"``.

        Returns:
            str: Human-readable form that :func:`parse_poly` reads back exactly.

        """
        labels = list(names) if names is not None else [f"p{i}" for i in range(self._nvars)]
        if not self._terms:
            return "0"
        pieces: list[str] = []
        for position, (exp, coeff) in enumerate(self.sorted_terms()):
            monomial = "*".join(
                label if power == 1 else f"{label}^{power}"
                for label, power in zip(labels, exp, strict=True)
                if power
            )
            negative, magnitude = _split_sign(coeff)
            if monomial and magnitude == "1":
                body = monomial
            elif monomial:
                body = f"{magnitude}*{monomial}"
            else:
                body = magnitude
            if position == 0:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f" - {body}" if negative else f" + {body}")
        return "".join(pieces)

    def to_json(self) -> JSONDict:
        """Return the JSON term-list form.

        Returns:
            JSONDict: ``{"nvars": n, "terms": [{"exp": [...], "num": a, "den": b}, ...]}``.

        """
        terms: list[JSONValue] = []
        for exp, coeff in self.sorted_terms():
            entry: JSONDict = {"exp": list(exp)}
            if isinstance(coeff, Fraction):
                entry["num"] = coeff.numerator
                entry["den"] = coeff.denominator
            else:
                entry["re"] = coeff.real
                entry["im"] = coeff.imag
            terms.append(entry)
        return {"nvars": self._nvars, "terms": terms}

    @classmethod
    def from_json(cls, data: JSONValue, *, nvars: int | None = None) -> SparsePoly:
        """Build a polynomial from its JSON term-list form or from a text string.

        Returns:
            SparsePoly: Parsed polynomial.

        Raises:
            ValueError: If the payload is malformed.

        """
        if isinstance(data, str):
            return parse_poly(data, nvars=nvars)
        if not isinstance(data, dict) or not isinstance(data.get("terms"), list):
            msg = "Polynomial JSON must be a string or an object with a 'terms' array"
            raise ValueError(msg)
        raw_terms = cast("list[JSONValue]", data["terms"])
        declared = data.get("nvars", nvars)
        terms: list[tuple[Exponent, Scalar]] = []
        for raw in raw_terms:
            if not isinstance(raw, dict) or not isinstance(raw.get("exp"), list):
                msg = f"Malformed term: {raw!r}"
                raise ValueError(msg)
            exp = tuple(int(cast("int", e)) for e in cast("list[JSONValue]", raw["exp"]))
            terms.append((exp, _term_coefficient(raw)))
        if declared is None:
            if not terms:
                msg = "Cannot infer nvars of an empty polynomial"
                raise ValueError(msg)
            declared = len(terms[0][0])
        return cls(int(cast("int", declared)), terms)

    def __str__(self) -> str:
        """Return :meth:`to_text`."""
        return self.to_text()

    def __repr__(self) -> str:
        """Return a constructor-like representation."""
        return f"SparsePoly({self._nvars}, {self.to_text()!r})"


def _split_sign(coeff: Coefficient) -> tuple[bool, str]:
    if isinstance(coeff, Fraction):
        return coeff < 0, format_rational(abs(coeff))
    return False, repr(coeff)


def _term_coefficient(raw: Mapping[str, JSONValue]) -> Scalar:
    if "num" in raw:
        num = raw["num"]
        den = raw.get("den", 1)
        if not isinstance(num, int) or not isinstance(den, int) or den == 0:
            msg = f"Malformed rational coefficient: {raw!r}"
            raise ValueError(msg)
        return Fraction(num, den)
    if "re" in raw or "im" in raw:
        real, imag = raw.get("re", 0.0), raw.get("im", 0.0)
        return complex(float(cast("float", real)), float(cast("float", imag)))
    if "coef" in raw and isinstance(raw["coef"], str | int):
        return Fraction(str(raw["coef"]))
    msg = f"Term has no coefficient: {raw!r}"
    raise ValueError(msg)


# -- parser -------------------------------------------------------------------


class _Parser:
    """Recursive-descent parser for ``+ - * / ^ ( )`` over rational literals and named variables."""

    def __init__(self, tokens: list[tuple[str, str]], lookup: Mapping[str, int], nvars: int) -> None:
        self._tokens = tokens
        self._pos = 0
        self._lookup = lookup
        self._nvars = nvars

    def parse(self) -> SparsePoly:
        result = self._expression()
        if self._pos != len(self._tokens):
            msg = f"Unexpected token {self._tokens[self._pos][1]!r}"
            raise ValueError(msg)
        return result

    def _peek(self) -> tuple[str, str] | None:
        return self._tokens[self._pos] if self._pos < len(self._tokens) else None

    def _take(self) -> tuple[str, str]:
        token = self._peek()
        if token is None:
            msg = "Unexpected end of polynomial"
            raise ValueError(msg)
        self._pos += 1
        return token

    def _expression(self) -> SparsePoly:
        result = self._term()
        while (token := self._peek()) is not None and token[1] in {"+", "-"}:
            self._take()
            rhs = self._term()
            result = result + rhs if token[1] == "+" else result - rhs
        return result

    def _term(self) -> SparsePoly:
        result = self._unary()
        while (token := self._peek()) is not None:
            if token[1] == "*":
                self._take()
                result *= self._unary()
            elif token[1] == "/":
                self._take()
                divisor = self._unary()
                if divisor.degree > 0 or divisor.is_zero:
                    msg = "Division is only allowed by non-zero constants"
                    raise ValueError(msg)
                result *= 1 / divisor.constant_term()
            elif token[0] in {"number", "name"} or token[1] == "(":
                result *= self._unary()
            else:
                break
        return result

    def _unary(self) -> SparsePoly:
        token = self._peek()
        if token is not None and token[1] in {"+", "-"}:
            self._take()
            operand = self._unary()
            return -operand if token[1] == "-" else operand
        return self._power()

    def _power(self) -> SparsePoly:
        base = self._atom()
        token = self._peek()
        if token is not None and token[1] in {"^", "**"}:
            self._take()
            kind, text = self._take()
            if kind != "number" or not text.isdigit():
                msg = f"Exponent must be a non-negative integer, got {text!r}"
                raise ValueError(msg)
            return base ** int(text)
        return base

    def _atom(self) -> SparsePoly:
        kind, text = self._take()
        if kind == "number":
            return SparsePoly.constant(self._nvars, Fraction(text))
        if kind == "name":
            return SparsePoly.variable(self._nvars, self._lookup[text])
        if text == "(":
            inner = self._expression()
            if self._take()[1] != ")":
                msg = "Missing closing parenthesis"
                raise ValueError(msg)
            return inner
        msg = f"Unexpected token {text!r}"
        raise ValueError(msg)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens: list[tuple[str, str]] = []
    position = 0
    stripped = text.rstrip()
    while position < len(stripped):
        match = _TOKEN_PATTERN.match(stripped, position)
        if match is None or match.end() == position:
            msg = f"Invalid character in polynomial at offset {position}: {text!r}"
            raise ValueError(msg)
        kind = match.lastgroup or "op"
        tokens.append((kind, match.group(kind)))
        position = match.end()
    return tokens


def parse_poly(text: str, *, names: Sequence[str] | None = None, nvars: int | None = None) -> SparsePoly:
    """Parse a polynomial such as ``"4*p0*p2 - p1^2"``.

    Variables default to ``p0, p1, ...``; the ring size is the largest index plus one
    unless ``nvars`` is given. Pass ``names`` to use other variable names.

    Returns:
        SparsePoly: Exact polynomial.

    Raises:
        ValueError: On syntax errors or unknown variables.

    """
    tokens = _tokenize(text)
    if not tokens:
        msg = "Empty polynomial text"
        raise ValueError(msg)
    identifiers = {value for kind, value in tokens if kind == "name"}
    if names is not None:
        lookup = {name: index for index, name in enumerate(names)}
        size = len(names)
    else:
        lookup = {}
        for identifier in identifiers:
            match = _DEFAULT_NAME.match(identifier)
            if match is None:
                msg = f"Unknown variable {identifier!r}; expected names like p0, p1, ..."
                raise ValueError(msg)
            lookup[identifier] = int(match.group(1))
        size = max(lookup.values(), default=-1) + 1
    if nvars is not None:
        if nvars < size:
            msg = f"Polynomial uses {size} variables but nvars={nvars}"
            raise ValueError(msg)
        size = nvars
    unknown = identifiers - lookup.keys()
    if unknown:
        msg = f"Unknown variables: {', '.join(sorted(unknown))}"
        raise ValueError(msg)
    return _Parser(tokens, lookup, size).parse()


# -- binary forms -------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class BinaryForm:
    """Integer binary form ``sum_i coeffs[i] * p^(n-i) * u^i``."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        """Validate coefficients.

        Raises:
            ValueError: If the form is empty or has non-integer coefficients.

        """
        if not self.coeffs:
            msg = "A binary form needs at least one coefficient"
            raise ValueError(msg)
        if not all(isinstance(c, int) and not isinstance(c, bool) for c in self.coeffs):
            msg = f"Binary form coefficients must be integers: {self.coeffs!r}"
            raise ValueError(msg)

    @classmethod
    def of(cls, coeffs: Iterable[int]) -> BinaryForm:
        """Build a form from any iterable of integers.

        Returns:
            BinaryForm: New form.

        """
        return cls(tuple(int(c) for c in coeffs))

    @property
    def degree(self) -> int:
        """Homogeneous degree ``n``."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        """First nonzero coefficient (the ML degree for bidegrees), ``0`` for the zero form."""
        return next((c for c in self.coeffs if c), 0)

    @property
    def trailing(self) -> int:
        """Last nonzero coefficient (the degree of the variety for bidegrees)."""
        return next((c for c in reversed(self.coeffs) if c), 0)

    def to_text(self) -> str:
        """Render as ``"4p^5 + 6p^4u + ..."``.

        Returns:
            str: Readable form, ``"0"`` for the zero form.

        """
        pieces: list[str] = []
        n = self.degree
        for i, coeff in enumerate(self.coeffs):
            if not coeff:
                continue
            p_part = "" if n - i == 0 else ("p" if n - i == 1 else f"p^{n - i}")
            u_part = "" if i == 0 else ("u" if i == 1 else f"u^{i}")
            monomial = p_part + u_part
            magnitude = abs(coeff)
            body = monomial if magnitude == 1 and monomial else f"{magnitude}{monomial}"
            if not pieces:
                pieces.append(f"-{body}" if coeff < 0 else body)
            else:
                pieces.append(f" - {body}" if coeff < 0 else f" + {body}")
        return "".join(pieces) or "0"

    def to_json(self) -> JSONDict:
        """Return ``{"degree", "coeffs", "text"}``.

        Returns:
            JSONDict: Serializable form.

        """
        return {"degree": self.degree, "coeffs": list(self.coeffs), "text": self.to_text()}

    def __str__(self) -> str:
        """Return :meth:`to_text`."""
        return self.to_text()


def _taylor_shift(coeffs: Sequence[int], shift: int) -> list[int]:
    """Coefficients (low to high) of ``c(u + shift)``."""
    out = [0] * len(coeffs)
    for j, c in enumerate(coeffs):
        if c:
            for k in range(j + 1):
                out[k] += c * comb(j, k) * shift ** (j - k)
    return out


def _divide_by_linear(coeffs: Sequence[int], root: int) -> tuple[list[int], int]:
    """Synthetic division of ``sum coeffs[i] u^i`` by ``u - root``; returns quotient and remainder."""
    n = len(coeffs) - 1
    quotient = [0] * n
    acc = 0
    for i in range(n, 0, -1):
        acc = coeffs[i] + acc * root
        quotient[i - 1] = acc
    return quotient, coeffs[0] + acc * root


def involution_b_from_s(sectional: BinaryForm) -> BinaryForm:
    """Map a sectional ML degree to the ML bidegree.

    Computes ``(u*S(p, u-p) - p*S(p, 0)) / (u - p)`` by exact integer division.

    Returns:
        BinaryForm: Bidegree of the same degree.

    Raises:
        ValueError: If the division leaves a remainder.

    """
    coeffs = list(sectional.coeffs)
    numerator = [0, *_taylor_shift(coeffs, -1)]
    numerator[0] -= coeffs[0]
    quotient, remainder = _divide_by_linear(numerator, 1)
    if remainder:
        msg = f"Sectional form {sectional} is not exactly divisible (remainder {remainder})"
        raise ValueError(msg)
    return BinaryForm(tuple(quotient))


def involution_s_from_b(bidegree: BinaryForm) -> BinaryForm:
    """Map an ML bidegree to the sectional ML degree.

    Computes ``(u*B(p, u+p) + p*B(p, 0)) / (u + p)`` by exact integer division.

    Returns:
        BinaryForm: Sectional form of the same degree.

    Raises:
        ValueError: If the division leaves a remainder.

    """
    coeffs = list(bidegree.coeffs)
    numerator = [0, *_taylor_shift(coeffs, 1)]
    numerator[0] += coeffs[0]
    quotient, remainder = _divide_by_linear(numerator, -1)
    if remainder:
        msg = f"Bidegree {bidegree} is not exactly divisible (remainder {remainder})"
        raise ValueError(msg)
    return BinaryForm(tuple(quotient))
