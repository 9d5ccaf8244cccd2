# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Tests for compiled evaluation, path tracking and endpoint classification."""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np
import pytest

from lg_toolkit.config import StartKind
from lg_toolkit.critsys import CriticalSystem, DataVector, UnknownRole, build_plane_curve_system
from lg_toolkit.errors import InputError
from lg_toolkit.polyarith import SparsePoly, parse_poly
from lg_toolkit.tracker import (
    CompiledSystem,
    PathStats,
    PathStatus,
    PointClass,
    TrackerConfig,
    parameter_homotopy,
    refine,
    row_scales_of,
    solve,
)

HW = parse_poly("4*p0*p2 - p1^2")
ONES = (Fraction(1), Fraction(1), Fraction(1))


def _univariate(poly: SparsePoly) -> CriticalSystem:
    x = SparsePoly.variable(1, 0)
    return CriticalSystem(
        equations=(poly,),
        roles=(UnknownRole.COORDINATE,),
        coordinates=(x, SparsePoly.constant(1, 1)),
        variable_groups=((0,),),
        provenance="univariate",
        data=DataVector.of([1]),
    )


def _hw_system(u: DataVector) -> CriticalSystem:
    return build_plane_curve_system(HW, u, chart=ONES)


def test_compiled_system_matches_exact_evaluation() -> None:
    """Batched values and Jacobians agree with the exact polynomials after row scaling."""
    polys = [parse_poly("3*p0^2*p1 - p1 + 2"), parse_poly("p0*p1^3 - 5*p0", nvars=2)]
    compiled = CompiledSystem.from_polys(polys)
    X = np.array([[0.5 + 0.1j, -1.5j], [2.0, 3.0]])
    values, jac = compiled.evaluate_and_jacobian(X)
    scales = row_scales_of(polys)
    for b, point in enumerate(X):
        for i, poly in enumerate(polys):
            assert values[b, i] * scales[i] == pytest.approx(complex(poly.evaluate(list(point))))
            for j in range(2):
                assert jac[b, i, j] * scales[i] == pytest.approx(complex(poly.diff(j).evaluate(list(point))))


def test_compiled_system_rejects_mixed_rings() -> None:
    """Polynomials must share a ring."""
    with pytest.raises(InputError, match="one ring"):
        CompiledSystem.from_polys([parse_poly("p0"), parse_poly("p1")])


def test_relative_residual_vanishes_at_roots() -> None:
    """The backward error is zero at an exact root."""
    compiled = CompiledSystem.from_polys([parse_poly("p0^2 - 4")])
    residual = compiled.relative_residual(np.array([[2.0 + 0j], [1.0 + 0j]]))
    assert residual[0] == 0
    assert residual[1] == pytest.approx(3 / 5)


def test_row_scales() -> None:
    """Row scales are the largest coefficient moduli, one for zero rows."""
    scales = row_scales_of([parse_poly("3*p0 - 7"), SparsePoly.zero(1)])
    np.testing.assert_allclose(scales, [7.0, 1.0])


@pytest.mark.parametrize(
    ("overrides", "message"),
    [
        pytest.param({"min_step": 0.5}, "min_step", id="step-order"),
        pytest.param({"endpoint_tol": 0.0}, "endpoint_tol must be positive", id="tolerance"),
        pytest.param({"threads": 0}, "must be positive", id="threads"),
        pytest.param({"gamma": 2 + 0j}, "unit circle", id="gamma"),
    ],
)
def test_tracker_config_validation(overrides: dict[str, object], message: str) -> None:
    """Inconsistent settings raise InputError."""
    with pytest.raises(InputError, match=message):
        TrackerConfig(**overrides)  # type: ignore[arg-type]


def test_gamma_is_seeded_and_unimodular() -> None:
    """Gamma comes from the seed, lies on the unit circle and changes per attempt."""
    config = TrackerConfig(seed=4)
    gamma = config.resolved_gamma()
    assert gamma == TrackerConfig(seed=4).resolved_gamma()
    assert abs(gamma) == pytest.approx(1.0)
    assert config.resolved_gamma(1) != gamma
    fixed = TrackerConfig(gamma=1j)
    assert fixed.resolved_gamma() == 1j
    assert fixed.with_seed(3).gamma is None


def test_refine_converges_to_simple_root() -> None:
    """Newton refinement reaches a simple root to machine precision."""
    result = refine([1.9 + 0.05j], _univariate(parse_poly("p0^2 - 4")))
    assert result.converged
    assert result.point[0] == pytest.approx(2.0)
    assert result.condition < 10  # noqa: PLR2004


def test_solve_univariate_quadratic() -> None:
    """Both roots are found, regular and in canonical order."""
    result = solve(_univariate(parse_poly("p0^2 - 4")), TrackerConfig(threads=1, start_kind=StartKind.TOTAL_DEGREE))
    regular = result.of_kind(PointClass.OFF_H_REGULAR)
    assert [point.values[0] for point in regular] == [pytest.approx(-2.0), pytest.approx(2.0)]
    assert result.path_stats.tracked == 2  # noqa: PLR2004
    assert result.path_stats.failed == 0
    assert result.start_kind is StartKind.TOTAL_DEGREE


def test_solve_marks_roots_on_coordinate_hyperplanes() -> None:
    """A root at a vanishing coordinate is on the arrangement, not regular."""
    result = solve(_univariate(parse_poly("p0^2 - 3*p0")), TrackerConfig(threads=1))
    assert result.count(PointClass.OFF_H_REGULAR) == 1
    assert result.count(PointClass.ON_H) == 1


def test_solve_hardy_weinberg_finds_the_estimate() -> None:
    """The plane-curve system of the Hardy-Weinberg curve has one regular critical point."""
    result = solve(_hw_system(DataVector.of([3, 5, 7])), TrackerConfig(threads=1))
    (point,) = result.of_kind(PointClass.OFF_H_REGULAR)
    expected = [121 / 900, 418 / 900, 361 / 900]
    np.testing.assert_allclose([z.real for z in point.coordinates], expected, atol=1e-9)
    np.testing.assert_allclose([z.imag for z in point.coordinates], [0, 0, 0], atol=1e-9)
    assert result.path_stats.converged + result.path_stats.failed == result.path_stats.tracked


def test_solution_set_json_is_serializable() -> None:
    """Solution sets serialize to plain JSON."""
    result = solve(_univariate(parse_poly("p0^2 - 4")), TrackerConfig(threads=1))
    payload = json.loads(json.dumps(result.to_json()))
    assert payload["pathStats"]["tracked"] == 2  # noqa: PLR2004
    assert payload["pathStats"]["diverged"] == 0
    assert {point["class"] for point in payload["points"]} == {"offH_regular"}


def test_path_stats_count_diverged_paths_as_converged() -> None:
    """Diverged paths reached an endpoint at infinity: they count as converged and are reported apart."""
    statuses = np.array([PathStatus.DONE, PathStatus.DIVERGED, PathStatus.FAILED, PathStatus.DONE, PathStatus.DIVERGED])
    stats = PathStats.from_statuses(statuses, crossings=1)
    assert stats == PathStats(tracked=5, converged=4, failed=1, crossings=1, diverged=2)
    assert stats.converged + stats.failed == stats.tracked
    assert PathStats.from_statuses(np.array([], dtype=int)) == PathStats(0, 0, 0)


@pytest.mark.parametrize(
    "system",
    [
        pytest.param(_hw_system(DataVector.of([3, 5, 7])), id="hardy-weinberg"),
        pytest.param(_univariate(parse_poly("p0^3 - 6*p0^2 + 11*p0 - 6")), id="cubic"),
    ],
)
def test_solve_is_deterministic_per_seed(system: CriticalSystem) -> None:
    """One seed gives byte-identical output; another seed gives the same counts."""
    first = json.dumps(solve(system, TrackerConfig(threads=1, seed=7)).to_json(), sort_keys=True)
    again = json.dumps(solve(system, TrackerConfig(threads=1, seed=7)).to_json(), sort_keys=True)
    assert first == again

    other = solve(system, TrackerConfig(threads=1, seed=8))
    baseline = solve(system, TrackerConfig(threads=1, seed=7))
    assert other.count(PointClass.OFF_H_REGULAR) == baseline.count(PointClass.OFF_H_REGULAR)
    assert other.path_stats.tracked == baseline.path_stats.tracked


def test_parameter_homotopy_moves_the_estimate() -> None:
    """Tracking from one data vector to another reaches the new estimate."""
    config = TrackerConfig(threads=1)
    u0, u1 = DataVector.of([3, 5, 7]), DataVector.of([1, 1, 1])
    start = solve(_hw_system(u0), config)
    moved = parameter_homotopy(_hw_system, u0, start, u1, config)
    # theta = 1/2 for u = (1, 1, 1)
    (point,) = moved.of_kind(PointClass.OFF_H_REGULAR)
    np.testing.assert_allclose([z.real for z in point.coordinates], [0.25, 0.5, 0.25], atol=1e-9)
    assert parameter_homotopy(_hw_system, u0, start, u0, config) is start
