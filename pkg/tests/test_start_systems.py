# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Tests for total-degree and multihomogeneous start systems."""

from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np
import pytest

from lg_toolkit.config import StartKind
from lg_toolkit.critsys import DataVector, VarietySpec, build_lagrange_system, build_plane_curve_system
from lg_toolkit.errors import InputError, PathOverflowError
from lg_toolkit.polyarith import parse_poly
from lg_toolkit.start_systems import (
    bezout_number,
    multihom_start,
    multihomogeneous_bezout,
    start_system,
    total_degree_start,
)

if TYPE_CHECKING:
    from lg_toolkit.critsys import CriticalSystem

CHART = (Fraction(1), Fraction(2), Fraction(-3))


def _curve_system() -> CriticalSystem:
    return build_plane_curve_system(parse_poly("4*p0*p2 - p1^2"), DataVector.of([3, 5, 7]), chart=CHART)


def _surface_system() -> CriticalSystem:
    spec = VarietySpec.hypersurface(parse_poly("p0*p1 - p2*p3"))
    return build_lagrange_system(spec, DataVector.of([2, 3, 5, 7]), chart=(*CHART, Fraction(5)))


def test_bezout_number() -> None:
    """The total-degree count is the product of degrees."""
    assert bezout_number([2, 3, 1]) == 6  # noqa: PLR2004
    assert bezout_number([]) == 1


@pytest.mark.parametrize(
    ("table", "sizes", "expected"),
    [
        pytest.param([[1, 1], [1, 1]], [1, 1], 2, id="bilinear"),
        pytest.param([[1, 1], [1, 0], [0, 1]], [2, 1], 1, id="forced"),
        pytest.param([[2], [3]], [2], 6, id="single-group"),
    ],
)
def test_multihomogeneous_bezout(table: list[list[int]], sizes: list[int], expected: int) -> None:
    """Assignments use each group exactly as often as its size."""
    assert multihomogeneous_bezout(table, sizes) == expected


def test_multihomogeneous_bezout_rejects_bad_table() -> None:
    """The table needs one row per unknown and one column per group."""
    with pytest.raises(InputError, match="one row per unknown"):
        multihomogeneous_bezout([[1, 1]], [1, 1])


def test_total_degree_start_solutions_solve_start_system() -> None:
    """Every start solution is a root of the start system."""
    start = total_degree_start(_curve_system(), np.random.default_rng(0))
    assert start.path_count == 6  # noqa: PLR2004
    assert start.kind is StartKind.TOTAL_DEGREE
    assert np.abs(start.system.evaluate(start.solutions)).max() < 1e-12  # noqa: PLR2004
    assert len({tuple(np.round(s, 8)) for s in start.solutions}) == start.path_count


def test_total_degree_start_respects_cap() -> None:
    """Too many paths raise PathOverflowError with the count."""
    with pytest.raises(PathOverflowError, match="6 paths") as info:
        total_degree_start(_curve_system(), np.random.default_rng(0), max_paths=5)
    assert info.value.path_count == 6  # noqa: PLR2004


def test_multihom_start_counts_match_bezout() -> None:
    """The multihomogeneous start has exactly the multihomogeneous Bezout number of roots."""
    system = _surface_system()
    start = multihom_start(system, np.random.default_rng(1))
    sizes = [len(group) for group in system.variable_groups]
    assert start.path_count == multihomogeneous_bezout(system.group_degrees(), sizes)
    assert start.path_count < bezout_number(system.degrees())
    assert np.abs(start.system.evaluate(start.solutions)).max() < 1e-9  # noqa: PLR2004


def test_linear_product_jacobian_matches_finite_differences() -> None:
    """Analytic Jacobians agree with central differences."""
    start = multihom_start(_surface_system(), np.random.default_rng(2))
    x = np.random.default_rng(3).normal(size=(1, start.system.nvars)) + 0j
    _, jac = start.system.evaluate_and_jacobian(x)
    step = 1e-6
    for j in range(start.system.nvars):
        e = np.zeros_like(x)
        e[0, j] = step
        numeric = (start.system.evaluate(x + e) - start.system.evaluate(x - e)) / (2 * step)
        np.testing.assert_allclose(jac[0, :, j], numeric[0], rtol=1e-5, atol=1e-7)


def test_start_system_dispatch() -> None:
    """The start kind selects the builder."""
    rng = np.random.default_rng(0)
    assert start_system(_curve_system(), StartKind.TOTAL_DEGREE, rng).kind is StartKind.TOTAL_DEGREE
    assert start_system(_curve_system(), StartKind.MULTIHOMOGENEOUS, rng).kind is StartKind.MULTIHOMOGENEOUS
