# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Linear models and the matroid of their hyperplane arrangement.

A linear model ``X ⊂ P^n`` is the row space of a rational ``(d+1)×(n+1)`` matrix. The
coordinate hyperplanes and ``p_+ = 0`` restrict to ``n + 2`` hyperplanes of ``X``; their
normals (the columns of the basis and the column sum) form a matroid of rank ``d + 1``.
The ML bidegree of ``X`` is read off the h-vector of its broken circuit complex.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, NamedTuple, Self

import sympy

from lg_toolkit.critsys import DataVector, SingularPolicy, VarietySpec, build_lagrange_system
from lg_toolkit.errors import InputError
from lg_toolkit.parsing import coerce_rational_matrix, format_rational
from lg_toolkit.polyarith import BinaryForm, SparsePoly
from lg_toolkit.tracker import PointClass, TrackerConfig, solve

if TYPE_CHECKING:
    import numpy as np

    from lg_toolkit.critsys import CriticalSystem
    from lg_toolkit.lg_types import JSONDict, JSONValue, RationalMatrix
    from lg_toolkit.tracker import SolutionSet

__all__ = [
    "CharPoly",
    "LinearModel",
    "Matroid",
    "arrangement_matroid",
    "broken_circuit_fvector",
    "broken_circuit_hvector",
    "characteristic_polynomial",
    "linear_ml_bidegree",
    "mle_linear",
    "whitney_characteristic_polynomial",
]

LOGGER = logging.getLogger("lg_toolkit.linmatroid")

type Subset = frozenset[int]


def _rational_matrix(rows: Sequence[Sequence[Fraction]]) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in rows])


def _fraction(value: sympy.Expr) -> Fraction:
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


@dataclass(frozen=True, slots=True)
class LinearModel:
    """Row space of a full-rank rational matrix, seen as a linear subspace of ``P^n``."""

    basis: RationalMatrix

    def __post_init__(self) -> None:
        """Validate the basis.

        Raises:
            InputError: If the basis is rank deficient or ``X`` lies in a hyperplane of ``H``.

        """
        if not self.basis or len({len(row) for row in self.basis}) != 1:
            msg = "Basis must be a non-empty rectangular matrix"
            raise InputError(msg)
        matrix = _rational_matrix(self.basis)
        if matrix.rank() != len(self.basis):
            msg = f"Basis of {len(self.basis)} rows has rank {matrix.rank()}"
            raise InputError(msg)
        for i in range(self.n + 1):
            if all(row[i] == 0 for row in self.basis):
                msg = f"X lies in the hyperplane p{i} = 0"
                raise InputError(msg)
        if all(sum(row) == 0 for row in self.basis):
            msg = "X lies in the hyperplane p_+ = 0"
            raise InputError(msg)

    @classmethod
    def from_json(cls, data: JSONValue) -> Self:
        """Parse a basis given as a JSON array of rows (or ``{"basis": rows}``).

        Returns:
            Self: Parsed model.

        Raises:
            InputError: If the payload is malformed.

        """
        raw = data.get("basis") if isinstance(data, dict) else data
        try:
            basis = coerce_rational_matrix(raw)
        except ValueError as exc:
            msg = f"Invalid basis: {exc}"
            raise InputError(msg) from exc
        return cls(basis)

    @classmethod
    def from_variety(cls, spec: VarietySpec) -> Self:
        """Build the model cut out by the linear generators of ``spec``.

        Returns:
            Self: Model whose rows span the common kernel of the generators.

        Raises:
            InputError: If a generator is not linear.

        """
        if not spec.is_linear:
            msg = "Only linear varieties have a linear model"
            raise InputError(msg)
        size = spec.n + 1
        if not spec.generators:
            return cls(tuple(tuple(Fraction(int(i == j)) for j in range(size)) for i in range(size)))
        forms = [[g.coefficient([int(k == i) for k in range(size)]) for i in range(size)] for g in spec.generators]
        kernel = _rational_matrix(forms).nullspace()
        return cls(tuple(tuple(_fraction(v) for v in vec) for vec in kernel))

    @property
    def d(self) -> int:
        """Projective dimension of ``X``."""
        return len(self.basis) - 1

    @property
    def n(self) -> int:
        """Ambient projective dimension."""
        return len(self.basis[0]) - 1

    @property
    def coordinate_count(self) -> int:
        """Number of coordinates."""
        return self.n + 1

    def orthogonal_complement(self) -> RationalMatrix:
        """Return a basis of ``X^⊥``, one row per linear form vanishing on ``X``.

        Returns:
            RationalMatrix: Rows of the kernel of the basis.

        """
        kernel = _rational_matrix(self.basis).nullspace()
        return tuple(tuple(_fraction(v) for v in vec) for vec in kernel)

    def as_variety(self) -> VarietySpec:
        """Return ``X`` as the variety of the linear forms in ``X^⊥``.

        Returns:
            VarietySpec: Linear complete intersection.

        """
        forms = tuple(SparsePoly.linear_form(list(row)) for row in self.orthogonal_complement())
        return VarietySpec(self.n, forms, len(forms), SingularPolicy.NONE)

    def critical_system(self, u: DataVector, rng: np.random.Generator) -> CriticalSystem:
        """Build the Lagrange system of :meth:`as_variety`.

        Returns:
            CriticalSystem: Critical system for ``u``.

        """
        return self.as_variety().critical_system(u, rng)

    def to_json(self) -> JSONDict:
        """Return ``{"basis": rows}`` with ``"num/den"`` entries.

        Returns:
            JSONDict: Serializable model.

        """
        return {"basis": [[format_rational(v) for v in row] for row in self.basis]}


class Matroid:
    """A matroid on ``{0, ..., size-1}`` given by a cached rank oracle."""

    __slots__ = ("_cache", "_rank_fn", "size")

    def __init__(self, size: int, rank_fn: Callable[[Subset], int]) -> None:
        """Store the ground size and rank function."""
        self.size = size
        self._rank_fn = rank_fn
        self._cache: dict[Subset, int] = {}

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[Fraction]]) -> Self:
        """Matroid of the given vectors (columns), ranks by exact elimination.

        Returns:
            Self: Vector matroid.

        """
        matrix = _rational_matrix([list(col) for col in zip(*vectors, strict=True)])
        rows = list(range(matrix.rows))

        def rank(subset: Subset) -> int:
            if not subset:
                return 0
            return int(matrix.extract(rows, sorted(subset)).rank())

        return cls(len(vectors), rank)

    @classmethod
    def uniform(cls, rank: int, size: int) -> Self:
        """Uniform matroid ``U(rank, size)``.

        Returns:
            Self: Uniform matroid.

        """
        return cls(size, lambda subset: min(len(subset), rank))

    @classmethod
    def boolean(cls, size: int) -> Self:
        """Free matroid in which every subset is independent.

        Returns:
            Self: Boolean matroid.

        """
        return cls(size, len)

    @property
    def ground(self) -> Subset:
        """Ground set."""
        return frozenset(range(self.size))

    @property
    def full_rank(self) -> int:
        """Rank of the ground set."""
        return self.rank(self.ground)

    def rank(self, subset: Iterable[int]) -> int:
        """Return the rank of ``subset``.

        Returns:
            int: Rank.

        """
        key = frozenset(subset)
        cached = self._cache.get(key)
        if cached is None:
            cached = self._rank_fn(key)
            self._cache[key] = cached
        return cached

    def closure(self, subset: Iterable[int]) -> Subset:
        """Return the flat spanned by ``subset``.

        Returns:
            Subset: Closure.

        """
        base = frozenset(subset)
        rank = self.rank(base)
        return frozenset(e for e in range(self.size) if e in base or self.rank(base | {e}) == rank)

    def loops(self) -> tuple[int, ...]:
        """Elements of rank zero.

        Returns:
            tuple[int, ...]: Loops in increasing order.

        """
        return tuple(e for e in range(self.size) if self.rank({e}) == 0)

    def circuits(self) -> tuple[Subset, ...]:
        """Minimal dependent sets, by size then lexicographically.

        Returns:
            tuple[Subset, ...]: Circuits.

        """
        found: list[Subset] = []
        for size in range(1, self.full_rank + 2):
            for combo in itertools.combinations(range(self.size), size):
                subset = frozenset(combo)
                if any(circuit <= subset for circuit in found):
                    continue
                if self.rank(subset) < size:
                    found.append(subset)
        return tuple(found)


def arrangement_matroid(model: LinearModel) -> Matroid:
    """Matroid of the ``n + 2`` restricted hyperplanes ``p_0, ..., p_n, p_+``.

    Returns:
        Matroid: Matroid of the basis columns followed by their sum.

    """
    columns = [[row[i] for row in model.basis] for i in range(model.n + 1)]
    columns.append([sum(row, Fraction(0)) for row in model.basis])
    matroid = Matroid.from_vectors(columns)
    LOGGER.debug("arrangement matroid: rank %s on %s elements", matroid.full_rank, matroid.size)
    return matroid


class CharPoly(NamedTuple):
    """Integer polynomial in ``q``, coefficients from the top degree down."""

    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        """Degree in ``q``."""
        return len(self.coeffs) - 1

    def evaluate(self, q: int) -> int:
        """Evaluate by Horner's rule.

        Returns:
            int: Value at ``q``.

        """
        value = 0
        for coeff in self.coeffs:
            value = value * q + coeff
        return value

    def reduced(self) -> CharPoly:
        """Divide by ``q - 1``.

        Returns:
            CharPoly: Reduced characteristic polynomial.

        Raises:
            ValueError: If ``q = 1`` is not a root.

        """
        quotient: list[int] = []
        acc = 0
        for coeff in self.coeffs[:-1]:
            acc = acc + coeff
            quotient.append(acc)
        if acc + self.coeffs[-1] != 0:
            msg = f"{self.to_text()} does not vanish at q = 1"
            raise ValueError(msg)
        return CharPoly(tuple(quotient) or (0,))

    def to_text(self) -> str:
        """Render as ``"q^3 - 6q^2 + 15q - 10"``.

        Returns:
            str: Readable polynomial.

        """
        pieces: list[str] = []
        for index, coeff in enumerate(self.coeffs):
            if not coeff:
                continue
            power = self.degree - index
            monomial = "" if power == 0 else ("q" if power == 1 else f"q^{power}")
            body = monomial if abs(coeff) == 1 and monomial else f"{abs(coeff)}{monomial}"
            sign = "-" if coeff < 0 else "+"
            pieces.append(f"{'-' if coeff < 0 else ''}{body}" if not pieces else f" {sign} {body}")
        return "".join(pieces) or "0"


def _poly_sub(a: list[int], b: list[int]) -> list[int]:
    size = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(size)]


def _times_q_minus_one(a: list[int]) -> list[int]:
    return _poly_sub([0, *a], [*a, 0])


def _as_charpoly(low_to_high: list[int], degree: int) -> CharPoly:
    padded = (low_to_high + [0] * (degree + 1))[: degree + 1]
    return CharPoly(tuple(reversed(padded)))


def characteristic_polynomial(matroid: Matroid) -> CharPoly:
    """Characteristic polynomial by deletion–contraction, memoized on flats.

    A minor is the contraction of a flat ``F`` restricted to a set ``E`` of remaining
    elements; its rank function is ``r(S ∪ F) - r(F)``.

    Returns:
        CharPoly: ``χ_M(q)`` of degree ``rank(M)``.

    Raises:
        InputError: If the matroid has loops.

    """
    loops = matroid.loops()
    if loops:
        msg = f"Characteristic polynomial needs a loopless matroid; loops at {list(loops)}"
        raise InputError(msg)
    memo: dict[tuple[Subset, Subset], list[int]] = {}

    def chi(flat: Subset, remaining: Subset) -> list[int]:
        key = (flat, remaining)
        if key in memo:
            return memo[key]
        if not remaining:
            result = [1]
        else:
            element = min(remaining)
            rest = remaining - {element}
            base = matroid.rank(flat)
            if matroid.rank(flat | {element}) == base:
                result = [0]
            elif matroid.rank(flat | rest) < matroid.rank(flat | remaining):
                result = _times_q_minus_one(chi(flat, rest))
            else:
                contracted = matroid.closure(flat | {element})
                contraction = [0] if rest & contracted else chi(contracted, rest)
                result = _poly_sub(chi(flat, rest), contraction)
        memo[key] = result
        return result

    return _as_charpoly(chi(frozenset(), matroid.ground), matroid.full_rank)


def whitney_characteristic_polynomial(matroid: Matroid) -> CharPoly:
    """Characteristic polynomial ``Σ_S (-1)^|S| q^(r(E) - r(S))`` over all subsets.

    Exponential in the ground size; meant as an independent check for small matroids.

    Returns:
        CharPoly: ``χ_M(q)``.

    """
    rank = matroid.full_rank
    coeffs = [0] * (rank + 1)
    for size in range(matroid.size + 1):
        for combo in itertools.combinations(range(matroid.size), size):
            coeffs[rank - matroid.rank(combo)] += (-1) ** size
    return _as_charpoly(coeffs, rank)


def _broken_circuits(matroid: Matroid, ordering: Sequence[int]) -> list[Subset]:
    position = {element: index for index, element in enumerate(ordering)}
    broken = [circuit - {min(circuit, key=position.__getitem__)} for circuit in matroid.circuits()]
    return sorted(set(broken), key=lambda s: (len(s), sorted(s)))


def broken_circuit_fvector(matroid: Matroid, ordering: Sequence[int] | None = None) -> tuple[int, ...]:
    """Face counts ``(f_{-1}, f_0, ..., f_d)`` of the broken circuit complex.

    Faces are enumerated depth-first in the given order; a branch is pruned as soon as it
    contains a broken circuit.

    Returns:
        tuple[int, ...]: Number of faces of each size ``0..rank``.

    Raises:
        InputError: If ``ordering`` is not a permutation of the ground set.

    """
    order = list(range(matroid.size)) if ordering is None else list(ordering)
    if sorted(order) != list(range(matroid.size)):
        msg = f"Ordering must be a permutation of 0..{matroid.size - 1}"
        raise InputError(msg)
    broken = _broken_circuits(matroid, order)
    counts = [0] * (matroid.full_rank + 1)

    def extend(face: Subset, start: int) -> None:
        counts[len(face)] += 1
        for index in range(start, len(order)):
            candidate = face | {order[index]}
            if any(b <= candidate for b in broken):
                continue
            extend(candidate, index + 1)

    extend(frozenset(), 0)
    return tuple(counts)


def broken_circuit_hvector(matroid: Matroid, ordering: Sequence[int] | None = None) -> tuple[int, ...]:
    """h-vector ``(h_0, ..., h_d)`` of the broken circuit complex, ``d = rank - 1``.

    Uses ``h(z) = Σ_i f_{i-1} z^i (1-z)^{d+1-i}``; the top coefficient vanishes because the
    complex is a cone, so it is dropped.

    Returns:
        tuple[int, ...]: h-vector.

    Raises:
        InputError: If the matroid has loops.

    """
    if matroid.loops():
        msg = "Broken circuit complexes need a loopless matroid"
        raise InputError(msg)
    fvector = broken_circuit_fvector(matroid, ordering)
    top = len(fvector) - 1
    z = sympy.symbols("z")
    series = sum((f * z**i * (1 - z) ** (top - i) for i, f in enumerate(fvector)), sympy.Integer(0))
    poly = sympy.Poly(sympy.expand(series), z)
    coeffs = [int(poly.coeff_monomial(z**i)) for i in range(top + 1)]
    return tuple(coeffs[:top]) if top > 0 else tuple(coeffs)


def linear_ml_bidegree(model: LinearModel) -> BinaryForm:
    """ML bidegree ``(h_0 u^d + h_1 p u^(d-1) + ... + h_d p^d) p^(n-d)``.

    Returns:
        BinaryForm: Bidegree whose leading coefficient is the ML degree ``h_d``.

    """
    hvector = broken_circuit_hvector(arrangement_matroid(model))
    d, n = model.d, model.n
    coeffs = [hvector[d - i] for i in range(d + 1)] + [0] * (n - d)
    return BinaryForm.of(coeffs)


def mle_linear(model: LinearModel, u: DataVector, config: TrackerConfig | None = None) -> SolutionSet:
    """All critical points ``p ∈ X`` with ``u ∈ p ⋆ (X^⊥ + 1)``.

    Solved as the Lagrange system of the linear forms spanning ``X^⊥``.

    Returns:
        SolutionSet: Classified critical points.

    Raises:
        InputError: If the data has the wrong size.

    """
    if u.size != model.coordinate_count:
        msg = f"Linear model expects {model.coordinate_count} data entries, got {u.size}"
        raise InputError(msg)
    config = config or TrackerConfig()
    system = build_lagrange_system(model.as_variety(), u, rng=config.rng())
    result = solve(system, config)
    if result.count(PointClass.SINGULAR):
        LOGGER.warning("singular critical points for u=%s; the data may be resonant", u.to_json())
    return result
