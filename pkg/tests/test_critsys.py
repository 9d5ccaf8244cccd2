# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Tests for critical-system builders and model specs."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from lg_toolkit.critsys import (
    CriticalModel,
    CriticalSystem,
    DataVector,
    ParametricSpec,
    RankSpec,
    RestrictableModel,
    SymmetricRankSpec,
    UnknownRole,
    VarietySpec,
    build_lagrange_system,
    build_parametric_system,
    build_plane_curve_system,
    build_rank_system,
    build_symmetric_rank_system,
    build_toric_system,
    chart_coefficients,
    coefficient_list,
    dlog_residual,
    jacobian_rank,
    shifted_exponents,
    symmetric_index_pairs,
    validate_toric_matrix,
)
from lg_toolkit.errors import InputError
from lg_toolkit.polyarith import SparsePoly, parse_poly

HW = parse_poly("4*p0*p2 - p1^2")
HW_DATA = DataVector.of([3, 5, 7])
# theta = (2*u0 + u1) / (2*u_+) = 11/30
HW_MLE = (Fraction(121, 900), Fraction(418, 900), Fraction(361, 900))


def test_data_vector_basics() -> None:
    """Data vectors coerce entries and expose totals and edits."""
    u = DataVector.of([1, "1/2", 3])
    assert u.u_plus == Fraction(9, 2)
    assert u.is_exact
    assert u.with_zero(0).values == (0, Fraction(1, 2), 3)
    assert u.drop(1).values == (1, 3)
    assert u.to_json() == ["1", "1/2", "3"]
    assert not DataVector.of([1j, 2]).is_exact


@pytest.mark.parametrize(
    "values",
    [pytest.param([], id="empty"), pytest.param([0, 0], id="zero")],
)
def test_data_vector_rejects_degenerate(values: list[int]) -> None:
    """Empty and zero data are input errors."""
    with pytest.raises(InputError, match="Data vector is"):
        DataVector.of(values)


def test_generic_data_is_in_range() -> None:
    """Generic data is positive integer data in the configured range."""
    u = DataVector.generic(50, np.random.default_rng(1), low=5, high=9)
    assert all(5 <= v <= 9 and v.denominator == 1 for v in u.values)  # noqa: PLR2004


def test_chart_coefficients_are_seeded() -> None:
    """Charts start with one and repeat under the same seed."""
    first = chart_coefficients(5, np.random.default_rng(3))
    second = chart_coefficients(5, np.random.default_rng(3))
    assert first == second
    assert first[0] == 1
    assert all(c != 0 for c in first)


def test_critical_system_must_be_square() -> None:
    """Systems with mismatched equations and unknowns are rejected."""
    x = SparsePoly.variable(2, 0)
    with pytest.raises(InputError, match="1 equations in 2 unknowns"):
        CriticalSystem(
            equations=(x,),
            roles=(UnknownRole.COORDINATE,) * 2,
            coordinates=(),
            variable_groups=((0, 1),),
            provenance="test",
            data=DataVector.of([1]),
        )


def test_critical_system_groups_must_partition() -> None:
    """Variable groups cover every unknown exactly once."""
    x = SparsePoly.variable(2, 0)
    with pytest.raises(InputError, match="partition"):
        CriticalSystem(
            equations=(x, x),
            roles=(UnknownRole.COORDINATE,) * 2,
            coordinates=(),
            variable_groups=((0,), (0,)),
            provenance="test",
            data=DataVector.of([1]),
        )


@pytest.mark.parametrize(
    ("text", "message"),
    [
        pytest.param("p0*p1 + p0*p2", "divisible by p0", id="coordinate-factor"),
        pytest.param("(p0 + p1 + p2)*(p0 - p1)", r"divisible by p_\+", id="sum-factor"),
        pytest.param("p0 + p1^2 + p2^2", "not a non-constant homogeneous", id="inhomogeneous"),
    ],
)
def test_variety_spec_rejects_bad_generators(text: str, message: str) -> None:
    """Generators must be homogeneous and avoid the arrangement."""
    with pytest.raises(InputError, match=message):
        VarietySpec.hypersurface(parse_poly(text, nvars=3))


def test_variety_spec_json_round_trip() -> None:
    """Specs serialize generators as text and read them back."""
    spec = VarietySpec.hypersurface(HW)
    assert VarietySpec.from_json(spec.to_json()) == spec
    assert spec.dimension == 1
    assert spec.is_plane_curve


@pytest.mark.parametrize(
    ("payload", "message"),
    [
        pytest.param({"generators": ["p0"]}, "missing 'n'", id="missing-n"),
        pytest.param({"n": 2, "generators": ["p0 +"]}, "Invalid variety spec", id="bad-polynomial"),
        pytest.param([1, 2], "JSON object", id="not-object"),
    ],
)
def test_variety_spec_from_json_errors(payload: object, message: str) -> None:
    """Malformed payloads raise InputError."""
    with pytest.raises(InputError, match=message):
        VarietySpec.from_json(payload)  # type: ignore[arg-type]


def test_variety_spec_restriction_and_slicing() -> None:
    """Restriction drops a coordinate; slicing adds generic hyperplanes."""
    spec = VarietySpec.hypersurface(parse_poly("p0^2 + p1^2 + p2^2 + p3^2"))
    restricted = spec.restricted(2)
    assert restricted.n == 2  # noqa: PLR2004
    assert restricted.generators == (parse_poly("p0^2 + p1^2 + p2^2"),)
    sliced = spec.with_hyperplanes(2, np.random.default_rng(0))
    assert sliced.codim == 3  # noqa: PLR2004
    assert all(g.degree == 1 for g in sliced.generators[1:])
    with pytest.raises(InputError, match="Cannot slice"):
        spec.with_hyperplanes(3, np.random.default_rng(0))
    with pytest.raises(InputError, match="out of range"):
        spec.restricted(4)


def test_models_satisfy_protocols() -> None:
    """Specs are recognized as critical models; varieties restrict."""
    assert isinstance(VarietySpec.hypersurface(HW), RestrictableModel)
    assert isinstance(RankSpec(2, 2, 1), RestrictableModel)
    assert isinstance(SymmetricRankSpec(3, 2), CriticalModel)


def test_variety_dispatches_by_shape() -> None:
    """Plane curves use the determinant system; other varieties use multipliers."""
    rng = np.random.default_rng(0)
    curve = VarietySpec.hypersurface(HW).critical_system(HW_DATA, rng)
    surface = VarietySpec.hypersurface(parse_poly("p0*p1 - p2*p3")).critical_system(DataVector.of([1, 2, 3, 4]), rng)
    assert curve.provenance == "plane-curve"
    assert surface.provenance == "lagrange"
    assert surface.nunknowns == 6  # noqa: PLR2004


def test_lagrange_system_vanishes_at_hardy_weinberg_mle() -> None:
    """The closed-form estimate with its multipliers solves the system exactly."""
    system = build_lagrange_system(VarietySpec.hypersurface(HW), HW_DATA, chart=(Fraction(1), Fraction(1), Fraction(1)))
    p0, _, p2 = HW_MLE
    # Euler's relation forces lambda_0 = 1 on the chart p_+ = 1
    lam1 = (Fraction(1, 5) / p0 - 1) / (4 * p2)
    point = [*HW_MLE, Fraction(1), lam1]
    assert system.nunknowns == 5  # noqa: PLR2004
    assert all(eq.evaluate(point) == 0 for eq in system.equations)
    assert system.group_degrees()[0] == (2, 1)


def test_lagrange_system_rejects_non_complete_intersection() -> None:
    """Codimension must equal the number of generators."""
    spec = VarietySpec(3, (parse_poly("p0*p1 - p2*p3"), parse_poly("p0^2 - p1*p2", nvars=4)), 1)
    with pytest.raises(InputError, match="complete intersection"):
        build_lagrange_system(spec, DataVector.of([1, 2, 3, 4]))


def test_plane_curve_system_vanishes_at_hardy_weinberg_mle() -> None:
    """Curve, determinant and chart all vanish at the estimate."""
    system = build_plane_curve_system(HW, HW_DATA, chart=(Fraction(1), Fraction(1), Fraction(1)))
    assert system.degrees() == (2, 3, 1)
    assert all(eq.evaluate(list(HW_MLE)) == 0 for eq in system.equations)


def test_plane_curve_system_rejects_wrong_ring() -> None:
    """Plane curves live in three variables."""
    with pytest.raises(InputError, match="trivariate"):
        build_plane_curve_system(parse_poly("p0*p1 - p2*p3"), DataVector.of([1, 2, 3, 4]))


def test_dlog_residual_separates_critical_points() -> None:
    """The residual is zero at the estimate and large elsewhere."""
    estimate = [complex(v) for v in HW_MLE]
    assert dlog_residual([HW], HW_DATA, estimate) < 1e-12  # noqa: PLR2004
    assert dlog_residual([HW], HW_DATA, [0.25, 0.5, 0.25]) > 0.1  # noqa: PLR2004


def test_jacobian_rank() -> None:
    """Smooth points have full rank; the origin has none."""
    assert jacobian_rank([HW], [0.25, 0.5, 0.25]) == 1
    assert jacobian_rank([HW], [0, 0, 0]) == 0


def test_toric_system_for_hardy_weinberg() -> None:
    """The toric formulation vanishes at the estimate x = b / (2 - b)."""
    A = ((0, 1, 2), (1, 1, 1))
    system = build_toric_system(A, (1, 2, 1), HW_DATA)
    assert system.nunknowns == 1
    assert system.roles == (UnknownRole.TORUS,)
    assert system.equations[0].evaluate([Fraction(19, 11)]) == 0


def test_toric_matrix_validation() -> None:
    """Toric matrices need a ones row and full rank."""
    assert validate_toric_matrix(((0, 1, 2), (1, 1, 1))) == 1
    with pytest.raises(InputError, match="all ones"):
        validate_toric_matrix(((0, 1, 2), (1, 1, 2)))
    with pytest.raises(InputError, match="rank 2, expected 3"):
        validate_toric_matrix(((0, 1, 2), (0, 2, 4), (1, 1, 1)))
    assert shifted_exponents(((-1, 0, 1), (1, 1, 1))) == [(0,), (1,), (2,)]


def test_rank_system_vanishes_at_independence_estimate() -> None:
    """For 2x2 rank one the margins product with its normal multiplier is an exact solution."""
    system = build_rank_system(2, 2, 1, [[1, 2], [3, 4]])
    # P1 = 12/100, R1 = 3/2, L1 = 7/3, Lambda = -1/21
    point = [Fraction(12, 100), Fraction(3, 2), Fraction(7, 3), Fraction(-1, 21)]
    assert all(eq.evaluate(point) == 0 for eq in system.equations)
    assert [c.evaluate(point) for c in system.coordinates] == [
        Fraction(12, 100),
        Fraction(18, 100),
        Fraction(28, 100),
        Fraction(42, 100),
    ]


def test_rank_system_shapes() -> None:
    """Tall matrices are transposed internally; the structural zero drops a coordinate."""
    tall = build_rank_system(3, 2, 1, [[1, 2], [3, 4], [5, 6]])
    assert tall.metadata["shape"] == (3, 2)
    assert len(tall.coordinates) == 6  # noqa: PLR2004
    zeroed = build_rank_system(2, 2, 1, [[1, 2], [3, 4]], zero_last=True)
    assert len(zeroed.coordinates) == 3  # noqa: PLR2004
    assert zeroed.data.size == 3  # noqa: PLR2004


@pytest.mark.parametrize(
    ("m", "n", "r", "data", "message"),
    [
        pytest.param(2, 2, 3, [[1, 2], [3, 4]], "out of range", id="rank-too-large"),
        pytest.param(2, 3, 1, [[1, 2], [3, 4]], "must be 2x3", id="wrong-shape"),
        pytest.param(2, 2, 1, [[1, -1], [1, -1]], "nonzero total", id="zero-total"),
    ],
)
def test_rank_system_errors(m: int, n: int, r: int, data: list[list[int]], message: str) -> None:
    """Bad ranks, shapes and totals raise InputError."""
    with pytest.raises(InputError, match=message):
        build_rank_system(m, n, r, data)


def test_rank_spec_restricts_last_entry_only() -> None:
    """Only the last entry can be restricted."""
    spec = RankSpec(3, 3, 2)
    assert spec.restricted(8) == RankSpec(3, 3, 2, zero_last=True)
    assert spec.restricted(8).coordinate_count == 8  # noqa: PLR2004
    with pytest.raises(InputError, match="restrict only the last entry"):
        spec.restricted(0)


def test_symmetric_rank_system() -> None:
    """Symmetric systems use upper-triangular coordinates and reject asymmetric data."""
    assert symmetric_index_pairs(2) == [(0, 0), (0, 1), (1, 1)]
    system = build_symmetric_rank_system(3, 2, [[2, 1, 1], [1, 2, 1], [1, 1, 2]])
    assert system.nunknowns == 6  # noqa: PLR2004
    assert len(system.coordinates) == 6  # noqa: PLR2004
    with pytest.raises(InputError, match="symmetric matrix"):
        build_symmetric_rank_system(2, 1, [[1, 2], [3, 4]])
    spec = SymmetricRankSpec(3, 2)
    assert spec.data_matrix(DataVector.of([1, 2, 3, 4, 5, 6])) == [[1, 2, 3], [2, 4, 5], [3, 5, 6]]


def test_parametric_system_for_a_coin() -> None:
    """The coin model (t, 1 - t) has its critical point at t = u0 / u_+."""
    t = SparsePoly.variable(1, 0)
    spec = ParametricSpec((t, 1 - t), name="coin")
    system = build_parametric_system(spec, DataVector.of([2, 3]))
    assert system.nunknowns == 3  # noqa: PLR2004
    assert system.provenance == "coin"
    point = [Fraction(2, 5), Fraction(5, 2), Fraction(5, 3)]
    assert all(eq.evaluate(point) == 0 for eq in system.equations)


def test_parametric_system_adds_total_reciprocal() -> None:
    """A non-constant coordinate sum gets its own reciprocal unknown."""
    t = SparsePoly.variable(1, 0)
    system = build_parametric_system(ParametricSpec((t, t * t)), DataVector.of([1, 1]))
    assert system.roles == (UnknownRole.PARAMETER,) + (UnknownRole.RECIPROCAL,) * 3


def test_parametric_spec_validation() -> None:
    """Parametrizations need two coordinates and a nonzero sum."""
    t = SparsePoly.variable(1, 0)
    with pytest.raises(InputError, match="at least two"):
        ParametricSpec((t,))
    with pytest.raises(InputError, match="sum must be nonzero"):
        ParametricSpec((t, -t))


def test_coefficient_list() -> None:
    """Pairs become complex numbers, everything else rationals."""
    assert coefficient_list([1, "1/2", [0, 1]]) == (Fraction(1), Fraction(1, 2), 1j)
