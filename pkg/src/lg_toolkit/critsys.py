# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Square polynomial systems whose off-arrangement solutions are likelihood critical points.

Each builder returns a :class:`CriticalSystem`: the equations, the role of every unknown,
the variable groups used for multihomogeneous starts, and a coordinate map expressing the
model point ``p`` in terms of the unknowns. The tracker classifies endpoints through that
map, so spurious solutions introduced by clearing denominators (points on the coordinate
hyperplanes or on ``p_+ = 0``) are discarded numerically.

Formulations (data enters through ``u / u_+`` so unknowns stay of unit size):

- :func:`build_lagrange_system`: implicit complete intersections, multipliers for the row span.
- :func:`build_plane_curve_system`: a plane curve and one determinant, denominators cleared.
- :func:`build_rank_system` / :func:`build_symmetric_rank_system`: parametrized rank constraints.
- :func:`build_toric_system`: torus coordinates for toric models.
- :func:`build_parametric_system`: polynomial parametrizations with reciprocal unknowns.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from typing import TYPE_CHECKING, Protocol, Self, cast, runtime_checkable

import numpy as np
import sympy

from lg_toolkit.errors import InputError
from lg_toolkit.parsing import coerce_int, coerce_rational, format_rational
from lg_toolkit.polyarith import SparsePoly

if TYPE_CHECKING:
    from lg_toolkit.lg_types import Coefficient, IntMatrix, JSONDict, JSONValue

__all__ = [
    "CriticalModel",
    "CriticalSystem",
    "DataVector",
    "ParametricSpec",
    "RankSpec",
    "RestrictableModel",
    "SingularPolicy",
    "SymmetricRankSpec",
    "UnknownRole",
    "VarietySpec",
    "build_lagrange_system",
    "build_parametric_system",
    "build_plane_curve_system",
    "build_rank_system",
    "build_symmetric_rank_system",
    "build_toric_system",
    "chart_coefficients",
    "coefficient_list",
    "data_rows",
    "dlog_residual",
    "jacobian_rank",
    "shifted_exponents",
    "symmetric_index_pairs",
    "validate_toric_matrix",
]

LOGGER = logging.getLogger("lg_toolkit.critsys")

GENERIC_LOW = 1_000
GENERIC_HIGH = 1_000_000

type Matrix = list[list[SparsePoly]]


class SingularPolicy(StrEnum):
    """How endpoints in the singular locus of the model are treated."""

    FILTER = "filter"
    NONE = "none"


class UnknownRole(StrEnum):
    """Meaning of an unknown in a critical system."""

    COORDINATE = "p"
    MULTIPLIER = "lambda"
    TORUS = "x"
    RANK_PARAMETER = "rank"
    PARAMETER = "theta"
    RECIPROCAL = "q"


@dataclass(frozen=True, slots=True)
class DataVector:
    """Observed counts ``u_0..u_n``; complex entries are allowed for parameter homotopies."""

    values: tuple[Fraction | complex, ...]

    def __post_init__(self) -> None:
        """Validate that the vector is non-empty and non-zero.

        Raises:
            InputError: For an empty or all-zero vector.

        """
        if not self.values:
            msg = "Data vector is empty"
            raise InputError(msg)
        if all(v == 0 for v in self.values):
            msg = "Data vector is zero"
            raise InputError(msg)

    @classmethod
    def of(cls, values: Sequence[object]) -> Self:
        """Build a data vector from ints, rationals, ``"num/den"`` strings or complex numbers.

        Returns:
            Self: New data vector.

        """
        converted: list[Fraction | complex] = []
        for value in values:
            if isinstance(value, complex):
                converted.append(value)
            else:
                converted.append(coerce_rational(value))
        return cls(tuple(converted))

    @classmethod
    def generic(cls, size: int, rng: np.random.Generator, *, low: int = GENERIC_LOW, high: int = GENERIC_HIGH) -> Self:
        """Draw integer data uniformly from ``[low, high]``.

        Returns:
            Self: Generic positive integer data.

        """
        return cls(tuple(Fraction(int(v)) for v in rng.integers(low, high + 1, size=size)))

    @classmethod
    def generic_complex(cls, size: int, rng: np.random.Generator) -> Self:
        """Draw complex data with moduli comparable to :meth:`generic`.

        Returns:
            Self: Generic complex data.

        """
        scale = float(GENERIC_LOW)
        values = scale * (rng.normal(size=size) + 1j * rng.normal(size=size))
        return cls(tuple(complex(v) for v in values))

    @property
    def size(self) -> int:
        """Number of entries."""
        return len(self.values)

    @property
    def u_plus(self) -> Fraction | complex:
        """Sum of all entries."""
        return sum(self.values, Fraction(0))

    @property
    def is_exact(self) -> bool:
        """Whether all entries are rational."""
        return all(isinstance(v, Fraction) for v in self.values)

    def with_zero(self, index: int) -> DataVector:
        """Return a copy with entry ``index`` set to zero.

        Returns:
            DataVector: Modified data.

        """
        values = list(self.values)
        values[index] = Fraction(0)
        return DataVector(tuple(values))

    def drop(self, index: int) -> DataVector:
        """Return a copy without entry ``index``.

        Returns:
            DataVector: Shorter data vector.

        """
        return DataVector(self.values[:index] + self.values[index + 1 :])

    def as_complex(self) -> np.ndarray:
        """Return the entries as a complex numpy array.

        Returns:
            np.ndarray: Complex copy.

        """
        return np.array([complex(v) for v in self.values], dtype=np.complex128)

    def to_json(self) -> list[JSONValue]:
        """Return entries as ``"num/den"`` strings, complex entries as ``[re, im]``.

        Returns:
            list[JSONValue]: Serializable entries.

        """
        out: list[JSONValue] = []
        for value in self.values:
            if isinstance(value, Fraction):
                out.append(format_rational(value))
            else:
                out.append([value.real, value.imag])
        return out


@dataclass(frozen=True, slots=True)
class CriticalSystem:
    """A square polynomial system together with the data needed to interpret its solutions."""

    equations: tuple[SparsePoly, ...]
    roles: tuple[UnknownRole, ...]
    coordinates: tuple[SparsePoly, ...]
    variable_groups: tuple[tuple[int, ...], ...]
    provenance: str
    data: DataVector
    chart: SparsePoly | None = None
    generators: tuple[SparsePoly, ...] = ()
    codim: int = 0
    singular_policy: SingularPolicy = SingularPolicy.NONE
    metadata: dict[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        """Check squareness and the variable partition.

        Raises:
            InputError: If the system is not square or the groups are not a partition.

        """
        nunknowns = len(self.roles)
        if len(self.equations) != nunknowns:
            msg = f"{self.provenance}: {len(self.equations)} equations in {nunknowns} unknowns"
            raise InputError(msg)
        if any(eq.nvars != nunknowns for eq in self.equations):
            msg = f"{self.provenance}: equations live in the wrong ring"
            raise InputError(msg)
        flat = sorted(i for group in self.variable_groups for i in group)
        if flat != list(range(nunknowns)) or any(not group for group in self.variable_groups):
            msg = f"{self.provenance}: variable groups must partition the unknowns"
            raise InputError(msg)

    @property
    def nunknowns(self) -> int:
        """Number of unknowns (and equations)."""
        return len(self.roles)

    def degrees(self) -> tuple[int, ...]:
        """Return the total degree of each equation.

        Returns:
            tuple[int, ...]: Degrees in equation order.

        """
        return tuple(eq.degree for eq in self.equations)

    def group_degrees(self) -> tuple[tuple[int, ...], ...]:
        """Return the degree of each equation in each variable group.

        Returns:
            tuple[tuple[int, ...], ...]: Row per equation, column per group.

        """
        return tuple(tuple(eq.degree_in(group) for group in self.variable_groups) for eq in self.equations)


@runtime_checkable
class CriticalModel(Protocol):
    """Anything that can produce a critical system for given data."""

    @property
    def coordinate_count(self) -> int:
        """Number of model coordinates ``n + 1``."""
        ...

    def critical_system(self, u: DataVector, rng: np.random.Generator) -> CriticalSystem:
        """Build the critical system for data ``u``."""
        ...


@runtime_checkable
class RestrictableModel(CriticalModel, Protocol):
    """A model that can be intersected with a coordinate hyperplane."""

    def restricted(self, coord: int) -> CriticalModel:
        """Return the model restricted to ``p_coord = 0`` in one fewer coordinate."""
        ...


def chart_coefficients(size: int, rng: np.random.Generator) -> tuple[Fraction, ...]:
    """Draw an affine chart ``p_0 + sum gamma_i p_i = 1`` with seeded random rationals.

    The first coefficient is always one; the others are nonzero rationals with numerator
    and denominator in ``[1, 99]`` and a random sign.

    Returns:
        tuple[Fraction, ...]: Chart coefficients.

    """
    numerators = rng.integers(1, 100, size=size)
    denominators = rng.integers(1, 100, size=size)
    signs = rng.choice((-1, 1), size=size)
    coeffs = [Fraction(int(s) * int(a), int(b)) for s, a, b in zip(signs, numerators, denominators, strict=True)]
    coeffs[0] = Fraction(1)
    return tuple(coeffs)


def _chart_poly(coeffs: Sequence[Fraction], nvars: int, positions: Sequence[int]) -> SparsePoly:
    form = SparsePoly.linear_form(list(coeffs), -1)
    return form.embed(nvars, positions) if nvars != len(coeffs) else form


def _rng(rng: np.random.Generator | None) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng(0)


def _check_data(u: DataVector, size: int, what: str) -> None:
    if u.size != size:
        msg = f"{what} expects {size} data entries, got {u.size}"
        raise InputError(msg)


def _normalized(u: DataVector) -> tuple[Fraction | complex, ...]:
    total = u.u_plus
    if total == 0:
        msg = "Data must have a nonzero total u_+"
        raise InputError(msg)
    return tuple(v / total for v in u.values)


# -- implicit models ------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class VarietySpec:
    """A projective variety ``X`` in ``P^n`` cut out by homogeneous generators."""

    n: int
    generators: tuple[SparsePoly, ...]
    codim: int
    singular_policy: SingularPolicy = SingularPolicy.FILTER

    def __post_init__(self) -> None:
        """Validate generators.

        Raises:
            InputError: If a generator is in the wrong ring, not homogeneous, or divisible by
                a coordinate or by ``p_+``, or if the codimension is out of range.

        """
        size = self.n + 1
        if self.n < 1:
            msg = f"Ambient dimension must be positive, got {self.n}"
            raise InputError(msg)
        if not 0 <= self.codim <= min(self.n, len(self.generators)):
            msg = f"Codimension {self.codim} is incompatible with {len(self.generators)} generators in P^{self.n}"
            raise InputError(msg)
        for index, generator in enumerate(self.generators):
            if generator.nvars != size:
                msg = f"Generator {index} has {generator.nvars} variables, expected {size}"
                raise InputError(msg)
            if generator.is_zero or not generator.is_homogeneous() or generator.degree == 0:
                msg = f"Generator {index} is not a non-constant homogeneous polynomial: {generator}"
                raise InputError(msg)
            for var in range(size):
                if all(exp[var] > 0 for exp in generator.terms):
                    msg = f"Generator {index} is divisible by p{var}"
                    raise InputError(msg)
            if _vanishes_on_sum_hyperplane(generator):
                msg = f"Generator {index} is divisible by p_+"
                raise InputError(msg)

    @classmethod
    def hypersurface(cls, polynomial: SparsePoly, *, singular_policy: SingularPolicy = SingularPolicy.FILTER) -> Self:
        """Return the hypersurface ``V(polynomial)``.

        Returns:
            Self: Codimension-one spec.

        """
        return cls(polynomial.nvars - 1, (polynomial,), 1, singular_policy)

    @classmethod
    def from_json(cls, data: JSONValue) -> Self:
        """Parse ``{"n", "codim", "generators", "singularPolicy"}``.

        Returns:
            Self: Parsed spec.

        Raises:
            InputError: If the payload is malformed.

        """
        if not isinstance(data, dict):
            msg = "Variety spec must be a JSON object"
            raise InputError(msg)
        try:
            n = coerce_int(data["n"])
            raw_generators = data.get("generators", [])
            if not isinstance(raw_generators, list):
                msg = "'generators' must be an array"
                raise InputError(msg)
            generators = tuple(SparsePoly.from_json(g, nvars=n + 1) for g in raw_generators)
            codim = coerce_int(data.get("codim", len(generators)))
            policy = SingularPolicy(str(data.get("singularPolicy", SingularPolicy.FILTER.value)))
        except KeyError as exc:
            msg = f"Variety spec is missing {exc.args[0]!r}"
            raise InputError(msg) from exc
        except ValueError as exc:
            msg = f"Invalid variety spec: {exc}"
            raise InputError(msg) from exc
        return cls(n, generators, codim, policy)

    def to_json(self) -> JSONDict:
        """Return the JSON form read by :meth:`from_json`.

        Returns:
            JSONDict: Serializable spec.

        """
        return {
            "n": self.n,
            "codim": self.codim,
            "generators": [g.to_text() for g in self.generators],
            "singularPolicy": self.singular_policy.value,
        }

    @property
    def coordinate_count(self) -> int:
        """Number of homogeneous coordinates."""
        return self.n + 1

    @property
    def dimension(self) -> int:
        """Projective dimension ``n - codim``."""
        return self.n - self.codim

    @property
    def is_linear(self) -> bool:
        """Whether every generator is linear."""
        return all(g.degree == 1 for g in self.generators)

    @property
    def is_plane_curve(self) -> bool:
        """Whether this is a single curve in ``P^2``."""
        return self.n == 2 and len(self.generators) == 1 and self.codim == 1  # noqa: PLR2004

    def critical_system(self, u: DataVector, rng: np.random.Generator) -> CriticalSystem:
        """Return the plane-curve system for plane curves, the Lagrange system otherwise.

        Returns:
            CriticalSystem: System for data ``u``.

        """
        if self.is_plane_curve:
            return build_plane_curve_system(self.generators[0], u, rng=rng, singular_policy=self.singular_policy)
        return build_lagrange_system(self, u, rng=rng)

    def restricted(self, coord: int) -> VarietySpec:
        """Return ``X ∩ {p_coord = 0}`` as a variety in ``P^(n-1)``.

        Returns:
            VarietySpec: Restricted spec with the same codimension.

        Raises:
            InputError: If the coordinate is out of range or a generator becomes zero.

        """
        if not 0 <= coord <= self.n:
            msg = f"Coordinate {coord} out of range for P^{self.n}"
            raise InputError(msg)
        generators = tuple(g.restrict(coord) for g in self.generators)
        if any(g.is_zero for g in generators):
            msg = f"X contains the hyperplane p{coord} = 0 component; restriction is degenerate"
            raise InputError(msg)
        return VarietySpec(self.n - 1, generators, self.codim, self.singular_policy)

    def with_hyperplanes(self, count: int, rng: np.random.Generator) -> VarietySpec:
        """Intersect with ``count`` random hyperplanes with integer coefficients in ``[-99, 99]``.

        Returns:
            VarietySpec: Sliced spec of codimension ``codim + count``.

        Raises:
            InputError: If the slice would be empty.

        """
        if count > self.dimension:
            msg = f"Cannot slice a {self.dimension}-dimensional variety by {count} hyperplanes"
            raise InputError(msg)
        size = self.n + 1
        slices: list[SparsePoly] = []
        while len(slices) < count:
            coeffs = [int(c) for c in rng.integers(-99, 100, size=size)]
            if sum(1 for c in coeffs if c) < 2 or sum(coeffs) == 0:  # noqa: PLR2004
                continue
            slices.append(SparsePoly.linear_form(coeffs))
        return VarietySpec(self.n, self.generators + tuple(slices), self.codim + count, self.singular_policy)


def _vanishes_on_sum_hyperplane(poly: SparsePoly) -> bool:
    size = poly.nvars
    if size < 2:  # noqa: PLR2004
        return False
    variables = [SparsePoly.variable(size - 1, i) for i in range(size - 1)]
    last = -sum(variables, SparsePoly.zero(size - 1))
    return poly.compose([*variables, last]).is_zero


def build_lagrange_system(
    spec: VarietySpec,
    u: DataVector,
    *,
    rng: np.random.Generator | None = None,
    chart: Sequence[Fraction] | None = None,
) -> CriticalSystem:
    """Build ``u_i / u_+ = λ_0 p_i + Σ_j λ_j p_i ∂g_j/∂p_i`` with ``g_j(p) = 0`` and an affine chart.

    Unknowns are ``p_0..p_n`` followed by ``λ_0..λ_r``.

    Returns:
        CriticalSystem: Square system in ``n + r + 2`` unknowns.

    Raises:
        InputError: If the spec is not a complete intersection or the data has the wrong size.

    """
    r = len(spec.generators)
    if r > spec.n:
        msg = f"{r} generators exceed the ambient dimension {spec.n}"
        raise InputError(msg)
    if spec.codim != r:
        msg = f"Lagrange systems need a complete intersection (codim {spec.codim} != {r} generators)"
        raise InputError(msg)
    size = spec.n + 1
    _check_data(u, size, "Lagrange system")
    nvars = size + r + 1
    positions = list(range(size))
    p = [SparsePoly.variable(nvars, i) for i in range(size)]
    lam = [SparsePoly.variable(nvars, size + j) for j in range(r + 1)]
    generators = [g.embed(nvars, positions) for g in spec.generators]

    weights = _normalized(u)
    equations: list[SparsePoly] = []
    for i in range(size):
        row = weights[i] - lam[0] * p[i]
        for j, generator in enumerate(generators):
            row -= lam[j + 1] * p[i] * generator.diff(i)
        equations.append(row)
    equations.extend(generators)
    gamma = tuple(chart) if chart is not None else chart_coefficients(size, _rng(rng))
    chart_poly = _chart_poly(gamma, nvars, positions)
    equations.append(chart_poly)

    return CriticalSystem(
        equations=tuple(equations),
        roles=(UnknownRole.COORDINATE,) * size + (UnknownRole.MULTIPLIER,) * (r + 1),
        coordinates=tuple(p),
        variable_groups=(tuple(range(size)), tuple(range(size, nvars))),
        provenance="lagrange",
        data=u,
        chart=chart_poly,
        generators=spec.generators,
        codim=spec.codim,
        singular_policy=spec.singular_policy,
    )


def build_plane_curve_system(
    f: SparsePoly,
    u: DataVector,
    *,
    rng: np.random.Generator | None = None,
    chart: Sequence[Fraction] | None = None,
    singular_policy: SingularPolicy = SingularPolicy.FILTER,
) -> CriticalSystem:
    """Build ``f = 0``, ``det[(1,1,1); (u_i p_j p_k); ∇f] = 0`` and an affine chart.

    The middle row is ``(u_i / p_i)`` multiplied by ``p_0 p_1 p_2``. The first row stands for
    ``u_+ / p_+`` times the all-ones vector, which only rescales the row, so ``p_+`` never
    needs clearing.

    Returns:
        CriticalSystem: Three equations in ``p_0, p_1, p_2``.

    Raises:
        InputError: If ``f`` is not a homogeneous trivariate polynomial.

    """
    if f.nvars != 3:  # noqa: PLR2004
        msg = f"Plane curve must be trivariate, got {f.nvars} variables"
        raise InputError(msg)
    if not f.is_homogeneous() or f.degree == 0:
        msg = f"Plane curve must be homogeneous and non-constant: {f}"
        raise InputError(msg)
    _check_data(u, 3, "Plane curve system")
    p0, p1, p2 = (SparsePoly.variable(3, i) for i in range(3))
    w = _normalized(u)
    middle = (w[0] * p1 * p2, w[1] * p0 * p2, w[2] * p0 * p1)
    grad = (f.diff(0), f.diff(1), f.diff(2))
    det = (
        (middle[1] * grad[2] - middle[2] * grad[1])
        - (middle[0] * grad[2] - middle[2] * grad[0])
        + (middle[0] * grad[1] - middle[1] * grad[0])
    )
    gamma = tuple(chart) if chart is not None else chart_coefficients(3, _rng(rng))
    chart_poly = _chart_poly(gamma, 3, range(3))
    return CriticalSystem(
        equations=(f, det, chart_poly),
        roles=(UnknownRole.COORDINATE,) * 3,
        coordinates=(p0, p1, p2),
        variable_groups=((0, 1, 2),),
        provenance="plane-curve",
        data=u,
        chart=chart_poly,
        generators=(f,),
        codim=1,
        singular_policy=singular_policy,
    )


# -- rank models ----------------------------------------------------------------


def _matmul(a: Matrix, b: Matrix, nvars: int) -> Matrix:
    inner = len(b)
    cols = len(b[0]) if b else 0
    out: Matrix = []
    for row in a:
        out_row = []
        for j in range(cols):
            acc = SparsePoly.zero(nvars)
            for k in range(inner):
                if not row[k].is_zero and not b[k][j].is_zero:
                    acc += row[k] * b[k][j]
            out_row.append(acc)
        out.append(out_row)
    return out


def _transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a, strict=True)] if a else []


def _variables(nvars: int, start: int, rows: int, cols: int) -> tuple[Matrix, int]:
    block = [[SparsePoly.variable(nvars, start + i * cols + j) for j in range(cols)] for i in range(rows)]
    return block, start + rows * cols


def _identity(nvars: int, size: int, scale: int = 1) -> Matrix:
    return [
        [SparsePoly.constant(nvars, scale) if i == j else SparsePoly.zero(nvars) for j in range(size)]
        for i in range(size)
    ]


def data_rows(U: Sequence[Sequence[object]]) -> list[list[Fraction | complex]]:
    """Convert a data matrix to exact rationals, keeping complex entries.

    Returns:
        list[list[Fraction | complex]]: Rectangular rows.

    Raises:
        InputError: If the matrix is empty or ragged.

    """
    rows: list[list[Fraction | complex]] = []
    for row in U:
        rows.append([v if isinstance(v, complex) else coerce_rational(v) for v in row])
    if not rows or len({len(row) for row in rows}) != 1:
        msg = "Data matrix must be rectangular and non-empty"
        raise InputError(msg)
    return rows


def build_rank_system(
    m: int, n: int, r: int, U: Sequence[Sequence[object]], *, zero_last: bool = False
) -> CriticalSystem:
    """Build ``P ⋆ (R Λ L)^T + P = U / u_{++}`` for ``P = (I; L1) P1 (I, R1)``.

    Unknown blocks: ``P1`` (r×r), ``R1`` (r×(n-r)), ``L1`` ((m-r)×r), ``Λ`` ((n-r)×(m-r)),
    with ``R = (R1; -I)`` and ``L = (L1, -I)``. When ``m > n`` the transposed problem is
    built and the coordinate map transposes back. With ``zero_last`` the last equation is
    replaced by ``P_last = 0`` and the last data entry is ignored, which models the
    determinantal variety restricted to ``p_last = 0``.

    Returns:
        CriticalSystem: ``mn`` equations in ``mn`` unknowns.

    Raises:
        InputError: If ``r`` is out of range or the data has the wrong shape.

    """
    rows = data_rows(U)
    if len(rows) != m or len(rows[0]) != n:
        msg = f"Data matrix must be {m}x{n}, got {len(rows)}x{len(rows[0])}"
        raise InputError(msg)
    if not 1 <= r <= min(m, n):
        msg = f"Rank {r} out of range for {m}x{n} matrices"
        raise InputError(msg)
    transposed = m > n
    if transposed:
        rows = [list(col) for col in zip(*rows, strict=True)]
        m, n = n, m
    if zero_last:
        rows[m - 1][n - 1] = Fraction(0)
    u_pp = sum((v for row in rows for v in row), Fraction(0))
    if u_pp == 0:
        msg = "Data must have a nonzero total u_++"
        raise InputError(msg)
    scaled = [[v / u_pp for v in row] for row in rows]

    nvars = m * n
    P1, cursor = _variables(nvars, 0, r, r)
    R1, cursor = _variables(nvars, cursor, r, n - r)
    L1, cursor = _variables(nvars, cursor, m - r, r)
    Lam, cursor = _variables(nvars, cursor, n - r, m - r)
    A = _identity(nvars, r) + L1
    B = [_identity(nvars, r)[i] + R1[i] for i in range(r)]
    P = _matmul(_matmul(A, P1, nvars), B, nvars)
    if r < m:
        R = R1 + _identity(nvars, n - r, -1)
        L = [L1[i] + _identity(nvars, m - r, -1)[i] for i in range(m - r)]
        N = _transpose(_matmul(_matmul(R, Lam, nvars), L, nvars))
    else:
        N = [[SparsePoly.zero(nvars) for _ in range(n)] for _ in range(m)]

    equations: list[SparsePoly] = []
    for i in range(m):
        for j in range(n):
            if zero_last and (i, j) == (m - 1, n - 1):
                equations.append(P[i][j])
            else:
                equations.append(P[i][j] * N[i][j] + P[i][j] - scaled[i][j])

    oriented = _transpose(P) if transposed else P
    coordinates = [entry for row in oriented for entry in row]
    if zero_last:
        coordinates = coordinates[:-1]
    sizes = (r * r, r * (n - r), (m - r) * r, (n - r) * (m - r))
    groups: list[tuple[int, ...]] = []
    start = 0
    for size in sizes:
        if size:
            groups.append(tuple(range(start, start + size)))
        start += size
    flat_data = [v for row in (_transpose_values(rows) if transposed else rows) for v in row]
    if zero_last:
        flat_data = flat_data[:-1]
    LOGGER.debug("rank system m=%s n=%s r=%s zero_last=%s transposed=%s", m, n, r, zero_last, transposed)
    return CriticalSystem(
        equations=tuple(equations),
        roles=(UnknownRole.RANK_PARAMETER,) * nvars,
        coordinates=tuple(coordinates),
        variable_groups=tuple(groups),
        provenance="rank",
        data=DataVector(tuple(flat_data)),
        metadata={"shape": (n, m) if transposed else (m, n), "rank": r, "zero_last": zero_last},
    )


def _transpose_values(rows: list[list[Fraction | complex]]) -> list[list[Fraction | complex]]:
    return [list(col) for col in zip(*rows, strict=True)]


def symmetric_index_pairs(n: int) -> list[tuple[int, int]]:
    """Return the upper-triangular index pairs ``(i, j)``, ``i <= j``, in row order.

    Returns:
        list[tuple[int, int]]: ``[(0,0), (0,1), ..., (n-1,n-1)]``.

    """
    return [(i, j) for i in range(n) for j in range(i, n)]


def build_symmetric_rank_system(n: int, r: int, U: Sequence[Sequence[object]]) -> CriticalSystem:
    """Build critical equations for symmetric ``n×n`` matrices of rank at most ``r``.

    ``M = A S A^T`` with ``A = (I_r; L1)`` and ``S`` symmetric; the normal directions are
    ``Z = K Λ K^T`` with ``K = (L1^T; -I)`` and ``Λ`` symmetric. Coordinates are
    ``p_ii = M_ii / 2`` and ``p_ij = M_ij`` for ``i < j``, listed in upper-triangular row order;
    the equations are ``p_ij Z_ij + p_ij = u_ij / u_+``.

    Returns:
        CriticalSystem: ``n(n+1)/2`` equations and unknowns.

    Raises:
        InputError: If ``r`` is out of range or ``U`` is not symmetric.

    """
    rows = data_rows(U)
    if len(rows) != n or len(rows[0]) != n:
        msg = f"Symmetric data must be {n}x{n}"
        raise InputError(msg)
    if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(n)):
        msg = "Symmetric rank data must be a symmetric matrix"
        raise InputError(msg)
    if not 1 <= r <= n:
        msg = f"Rank {r} out of range for {n}x{n} symmetric matrices"
        raise InputError(msg)
    pairs = symmetric_index_pairs(n)
    data = [rows[i][j] for i, j in pairs]
    u_plus = sum(data, Fraction(0))
    if u_plus == 0:
        msg = "Data must have a nonzero total u_+"
        raise InputError(msg)

    nvars = len(pairs)
    s_count = r * (r + 1) // 2
    lam_size = n - r
    cursor = 0
    S = [[SparsePoly.zero(nvars)] * r for _ in range(r)]
    for i in range(r):
        for j in range(i, r):
            S[i][j] = S[j][i] = SparsePoly.variable(nvars, cursor)
            cursor += 1
    L1, cursor = _variables(nvars, cursor, lam_size, r)
    Lam = [[SparsePoly.zero(nvars)] * lam_size for _ in range(lam_size)]
    for i in range(lam_size):
        for j in range(i, lam_size):
            Lam[i][j] = Lam[j][i] = SparsePoly.variable(nvars, cursor)
            cursor += 1

    A = _identity(nvars, r) + L1
    M = _matmul(_matmul(A, S, nvars), _transpose(A), nvars)
    if lam_size:
        K = _transpose(L1) + _identity(nvars, lam_size, -1)
        Z = _matmul(_matmul(K, Lam, nvars), _transpose(K), nvars)
    else:
        Z = [[SparsePoly.zero(nvars)] * n for _ in range(n)]

    half = Fraction(1, 2)
    coordinates = [M[i][j] * half if i == j else M[i][j] for i, j in pairs]
    equations = [
        coordinates[k] * Z[i][j] + coordinates[k] - data[k] / u_plus for k, (i, j) in enumerate(pairs)
    ]
    sizes = (s_count, lam_size * r, lam_size * (lam_size + 1) // 2)
    groups: list[tuple[int, ...]] = []
    start = 0
    for size in sizes:
        if size:
            groups.append(tuple(range(start, start + size)))
        start += size
    return CriticalSystem(
        equations=tuple(equations),
        roles=(UnknownRole.RANK_PARAMETER,) * nvars,
        coordinates=tuple(coordinates),
        variable_groups=tuple(groups),
        provenance="symmetric-rank",
        data=DataVector(tuple(data)),
        metadata={"n": n, "rank": r},
    )


@dataclass(frozen=True, slots=True)
class RankSpec:
    """Determinantal model of ``m×n`` matrices of rank at most ``r``."""

    m: int
    n: int
    r: int
    zero_last: bool = False

    def __post_init__(self) -> None:
        """Validate the rank.

        Raises:
            InputError: If ``r`` is out of range.

        """
        if not 1 <= self.r <= min(self.m, self.n):
            msg = f"Rank {self.r} out of range for {self.m}x{self.n} matrices"
            raise InputError(msg)

    @property
    def coordinate_count(self) -> int:
        """Number of matrix entries (minus the structural zero)."""
        return self.m * self.n - (1 if self.zero_last else 0)

    def data_matrix(self, u: DataVector) -> list[list[Fraction | complex]]:
        """Arrange flat data row-major, appending the structural zero when present.

        Returns:
            list[list[Fraction | complex]]: ``m×n`` data.

        """
        values = list(u.values) + ([Fraction(0)] if self.zero_last else [])
        return [values[i * self.n : (i + 1) * self.n] for i in range(self.m)]

    def critical_system(self, u: DataVector, rng: np.random.Generator) -> CriticalSystem:  # noqa: ARG002
        """Build the rank system for flat row-major data.

        Returns:
            CriticalSystem: Rank system.

        """
        _check_data(u, self.coordinate_count, "Rank model")
        return build_rank_system(self.m, self.n, self.r, self.data_matrix(u), zero_last=self.zero_last)

    def restricted(self, coord: int) -> RankSpec:
        """Restrict to the last coordinate hyperplane.

        Returns:
            RankSpec: Same model with a structural zero in the last entry.

        Raises:
            InputError: For any coordinate other than the last one.

        """
        if self.zero_last or coord != self.m * self.n - 1:
            msg = "Rank models restrict only the last entry; permute rows and columns to move the entry there"
            raise InputError(msg)
        return RankSpec(self.m, self.n, self.r, zero_last=True)


@dataclass(frozen=True, slots=True)
class SymmetricRankSpec:
    """Symmetric ``n×n`` matrices of rank at most ``r``, coordinates in upper-triangular order."""

    n: int
    r: int

    @property
    def coordinate_count(self) -> int:
        """Number of upper-triangular entries."""
        return self.n * (self.n + 1) // 2

    def data_matrix(self, u: DataVector) -> list[list[Fraction | complex]]:
        """Expand upper-triangular data to a symmetric matrix.

        Returns:
            list[list[Fraction | complex]]: Symmetric ``n×n`` data.

        """
        _check_data(u, self.coordinate_count, "Symmetric rank model")
        matrix: list[list[Fraction | complex]] = [[Fraction(0)] * self.n for _ in range(self.n)]
        for value, (i, j) in zip(u.values, symmetric_index_pairs(self.n), strict=True):
            matrix[i][j] = matrix[j][i] = value
        return matrix

    def critical_system(self, u: DataVector, rng: np.random.Generator) -> CriticalSystem:  # noqa: ARG002
        """Build the symmetric rank system.

        Returns:
            CriticalSystem: Symmetric rank system.

        """
        return build_symmetric_rank_system(self.n, self.r, self.data_matrix(u))


# -- toric models ---------------------------------------------------------------


def validate_toric_matrix(A: IntMatrix) -> int:
    """Check that ``A`` has a ones last row and full row rank.

    Returns:
        int: The torus dimension ``d`` (rows minus one).

    Raises:
        InputError: If the last row is not all ones or the rank is deficient.

    """
    if not A or len({len(row) for row in A}) != 1:
        msg = "Toric matrix must be rectangular and non-empty"
        raise InputError(msg)
    if any(entry != 1 for entry in A[-1]):
        msg = "Last row of a toric matrix must be all ones"
        raise InputError(msg)
    rank = sympy.Matrix(A).rank()
    if rank != len(A):
        msg = f"Toric matrix has rank {rank}, expected {len(A)}; remove redundant rows"
        raise InputError(msg)
    return len(A) - 1


def shifted_exponents(A: IntMatrix) -> list[tuple[int, ...]]:
    """Return the columns of ``A`` without the ones row, shifted to be non-negative.

    Returns:
        list[tuple[int, ...]]: Exponent vector per column.

    """
    d = len(A) - 1
    mins = [min(A[k]) for k in range(d)]
    return [tuple(A[k][i] - mins[k] for k in range(d)) for i in range(len(A[0]))]


def build_toric_system(A: IntMatrix, c: Sequence[Coefficient], u: DataVector) -> CriticalSystem:
    """Build ``f(x) b_j - Σ_i c_i ã_ij x^{ã_i} = 0`` in torus coordinates.

    ``f(x) = Σ c_i x^{ã_i}`` and ``b = Ã u / u_+``; shifting the columns of ``Ã`` by a constant
    vector multiplies ``f`` by a monomial and leaves the solutions in the torus unchanged.

    Returns:
        CriticalSystem: ``d`` equations in the torus unknowns ``x_1..x_d``.

    Raises:
        InputError: If ``A`` is invalid, ``c`` has zeros, or the data has the wrong size.

    """
    d = validate_toric_matrix(A)
    size = len(A[0])
    if len(c) != size or any(ci == 0 for ci in c):
        msg = f"Toric model needs {size} nonzero coefficients c"
        raise InputError(msg)
    _check_data(u, size, "Toric model")
    exponents = shifted_exponents(A)
    monomials = [SparsePoly.monomial(exp, ci) for exp, ci in zip(exponents, c, strict=True)]
    f = sum(monomials, SparsePoly.zero(d))
    weights = _normalized(u)
    equations: list[SparsePoly] = []
    for j in range(d):
        b_j = sum((exponents[i][j] * weights[i] for i in range(size)), Fraction(0))
        weighted = sum((monomials[i] * exponents[i][j] for i in range(size)), SparsePoly.zero(d))
        equations.append(f * b_j - weighted)
    return CriticalSystem(
        equations=tuple(equations),
        roles=(UnknownRole.TORUS,) * d,
        coordinates=tuple(monomials),
        variable_groups=(tuple(range(d)),),
        provenance="toric",
        data=u,
    )


# -- parametric models ------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ParametricSpec:
    """A model ``p_i = f_i(θ)`` given by polynomials in ``d`` parameters."""

    polys: tuple[SparsePoly, ...]
    name: str = "parametric"

    def __post_init__(self) -> None:
        """Validate the parametrization.

        Raises:
            InputError: If the polynomials are in different rings or their sum is zero.

        """
        if len(self.polys) < 2:  # noqa: PLR2004
            msg = "A parametric model needs at least two coordinates"
            raise InputError(msg)
        if len({p.nvars for p in self.polys}) != 1 or self.polys[0].nvars == 0:
            msg = "Parametrizing polynomials must share a non-empty parameter ring"
            raise InputError(msg)
        if any(p.is_zero for p in self.polys) or self.total.is_zero:
            msg = "Coordinates and their sum must be nonzero polynomials"
            raise InputError(msg)

    @property
    def parameters(self) -> int:
        """Number of parameters ``d``."""
        return self.polys[0].nvars

    @property
    def total(self) -> SparsePoly:
        """The sum ``f_+`` of all coordinates."""
        return sum(self.polys, SparsePoly.zero(self.polys[0].nvars))

    @property
    def coordinate_count(self) -> int:
        """Number of coordinates."""
        return len(self.polys)

    def critical_system(self, u: DataVector, rng: np.random.Generator) -> CriticalSystem:  # noqa: ARG002
        """Build the parametric system.

        Returns:
            CriticalSystem: Parametric system.

        """
        return build_parametric_system(self, u)


def build_parametric_system(spec: ParametricSpec, u: DataVector) -> CriticalSystem:
    """Build ``q_i f_i = 1`` and ``Σ_i (u_i / u_+) q_i ∂_k f_i - q_+ ∂_k f_+ = 0``.

    Unknowns are ``θ_1..θ_d``, then ``q_0..q_n``, then ``q_+`` unless ``f_+`` is constant
    (in which case its term vanishes from the derivative equations).

    Returns:
        CriticalSystem: Square system whose solutions are critical parameters.

    Raises:
        InputError: If the data has the wrong size.

    """
    _check_data(u, spec.coordinate_count, spec.name)
    d = spec.parameters
    count = spec.coordinate_count
    total = spec.total
    with_total = total.degree > 0
    nvars = d + count + (1 if with_total else 0)
    positions = list(range(d))
    f = [poly.embed(nvars, positions) for poly in spec.polys]
    q = [SparsePoly.variable(nvars, d + i) for i in range(count)]
    equations = [q[i] * f[i] - 1 for i in range(count)]
    f_plus = total.embed(nvars, positions)
    q_plus = SparsePoly.variable(nvars, nvars - 1) if with_total else None
    if q_plus is not None:
        equations.append(q_plus * f_plus - 1)
    weights = _normalized(u)
    for k in range(d):
        row = SparsePoly.zero(nvars)
        for i in range(count):
            row += q[i] * f[i].diff(k) * weights[i]
        if q_plus is not None:
            row -= q_plus * f_plus.diff(k)
        equations.append(row)
    roles = (UnknownRole.PARAMETER,) * d + (UnknownRole.RECIPROCAL,) * (nvars - d)
    return CriticalSystem(
        equations=tuple(equations),
        roles=roles,
        coordinates=tuple(f),
        variable_groups=(tuple(range(d)), tuple(range(d, nvars))),
        provenance=spec.name,
        data=u,
    )


# -- residual checks ----------------------------------------------------------------


def jacobian_rank(generators: Sequence[SparsePoly], point: Sequence[complex], *, rtol: float = 1e-8) -> int:
    """Numerical rank of the generators' Jacobian at ``point``.

    Returns:
        int: Number of singular values above ``rtol`` times the largest.

    """
    if not generators:
        return 0
    jac = np.array(
        [[complex(g.diff(i).evaluate(point)) for i in range(len(point))] for g in generators], dtype=np.complex128
    )
    singular_values = np.linalg.svd(jac, compute_uv=False)
    if singular_values.size == 0 or singular_values[0] == 0:
        return 0
    return int(np.sum(singular_values > rtol * singular_values[0]))


def dlog_residual(generators: Sequence[SparsePoly], u: DataVector, point: Sequence[complex]) -> float:
    """Relative distance of ``(u_i/p_i - u_+/p_+)`` from the row space of the generators' Jacobian.

    A critical point of the log-likelihood on ``X`` has residual zero.

    Returns:
        float: Residual norm divided by the norm of ``(u_i / p_i)``.

    """
    p = np.asarray(point, dtype=np.complex128)
    data = u.as_complex()
    ratios = data / p
    target = ratios - complex(sum(data)) / complex(np.sum(p))
    scale = max(float(np.linalg.norm(ratios)), np.finfo(float).tiny)
    if not generators:
        return float(np.linalg.norm(target)) / scale
    jac = np.array(
        [[complex(g.diff(i).evaluate(list(p))) for i in range(len(p))] for g in generators], dtype=np.complex128
    )
    coefficients, *_ = np.linalg.lstsq(jac.T, target, rcond=None)
    residual = target - jac.T @ coefficients
    return float(np.linalg.norm(residual)) / scale


def coefficient_list(values: Sequence[object]) -> tuple[Coefficient, ...]:
    """Convert JSON-ish values to polynomial coefficients (rationals, or complex for ``[re, im]``).

    Returns:
        tuple[Coefficient, ...]: Converted coefficients.

    """
    out: list[Coefficient] = []
    for value in values:
        if isinstance(value, list):
            pair = cast("list[float]", value)
            out.append(complex(pair[0], pair[1]))
        else:
            out.append(coerce_rational(value))
    return tuple(out)
