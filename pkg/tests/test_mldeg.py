# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Tests for ML degree counts and closed forms."""

from __future__ import annotations

import pytest

from lg_toolkit.catalog import load_model
from lg_toolkit.critsys import VarietySpec
from lg_toolkit.errors import InputError, UnstableCountError
from lg_toolkit.linmatroid import LinearModel
from lg_toolkit.mldeg import (
    Confidence,
    MLReport,
    generic_ci_ml_degree,
    generic_hypersurface_sectional,
    generic_map_ml_degree,
    ml_bidegree,
    ml_degree,
    plane_curve_formula,
    restriction_split_check,
    sectional_ml_degree,
)
from lg_toolkit.polyarith import BinaryForm, involution_b_from_s, parse_poly
from lg_toolkit.tracker import TrackerConfig

CONFIG = TrackerConfig(seed=7, threads=1)
HARDY_WEINBERG = VarietySpec.hypersurface(parse_poly("4*p0*p2 - p1^2"))


@pytest.mark.parametrize(
    ("counts", "expected", "confidence"),
    [
        pytest.param([4, 4, 4], 4, Confidence.STABLE, id="agree"),
        pytest.param([4, 3, 3], 3, Confidence.UNSTABLE, id="mode"),
        pytest.param([4, 3], 3, Confidence.UNSTABLE, id="tie-takes-smaller"),
    ],
)
def test_report_takes_the_mode(counts: list[int], expected: int, confidence: Confidence) -> None:
    """Reports summarize trials by their mode and flag disagreement."""
    report = MLReport.from_trials(counts, [0] * len(counts), list(range(len(counts))))
    assert report.ml_degree == expected
    assert report.confidence is confidence


def test_unstable_report_refuses_require_stable() -> None:
    """Disagreeing trials raise when a stable value is required."""
    report = MLReport.from_trials([2, 3], [0, 1], [11, 12])
    with pytest.raises(UnstableCountError, match=r"\[2, 3\]"):
        report.require_stable()
    assert report.to_json() == {
        "mlDegree": 2,
        "perTrialCounts": [2, 3],
        "pathFailures": [0, 1],
        "confidence": "unstable",
        "seeds": [11, 12],
    }


@pytest.mark.parametrize(
    ("n", "degrees", "expected"),
    [
        pytest.param(2, (2,), 6, id="conic"),
        pytest.param(2, (3,), 12, id="plane-cubic"),
        pytest.param(2, (4,), 20, id="plane-quartic"),
        pytest.param(3, (2,), 14, id="quadric-surface"),
        pytest.param(2, (2, 1), 2, id="conic-and-line"),
        pytest.param(4, (1, 1), 6, id="linear-plane"),
    ],
)
def test_generic_ci_ml_degree(n: int, degrees: tuple[int, ...], expected: int) -> None:
    """The complete-intersection formula reproduces the known counts."""
    assert generic_ci_ml_degree(n, degrees) == expected


def test_generic_ci_ml_degree_rejects_bad_input() -> None:
    """Too many equations or zero degrees are rejected."""
    with pytest.raises(InputError, match="1 <= r <= n"):
        generic_ci_ml_degree(1, (2, 2))
    with pytest.raises(InputError, match="positive degrees"):
        generic_ci_ml_degree(3, (0,))


@pytest.mark.parametrize(
    ("d", "degrees", "expected"),
    [
        pytest.param(1, (1, 1), 1, id="coin"),
        pytest.param(1, (3, 3, 3, 3), 11, id="cubic-curve"),
        pytest.param(2, (2, 2, 2, 2), 25, id="quartic-surface"),
    ],
)
def test_generic_map_ml_degree(d: int, degrees: tuple[int, ...], expected: int) -> None:
    """The generating-function coefficient gives the ML degree of generic maps."""
    assert generic_map_ml_degree(d, degrees) == expected


def test_generic_hypersurface_sectional() -> None:
    """Sections of a generic hypersurface are generic complete intersections."""
    assert generic_hypersurface_sectional(2, 2) == BinaryForm.of([6, 2, 0])
    assert generic_hypersurface_sectional(3, 2) == BinaryForm.of([14, 8, 2, 0])
    assert involution_b_from_s(BinaryForm.of([6, 2, 0])) == BinaryForm.of([6, 2, 0])


@pytest.mark.parametrize(
    ("text", "a", "expected"),
    [
        pytest.param("4*p0*p2 - p1^2", 3, 1, id="hardy-weinberg"),
        pytest.param("p0 + p1", 2, 0, id="line-through-corner"),
    ],
)
def test_plane_curve_formula(text: str, a: int, expected: int) -> None:
    """Boundary points are counted exactly, corners once."""
    report = plane_curve_formula(parse_poly(text, nvars=3))
    assert report.a == a
    assert report.formula_ml_degree == expected
    assert report.to_json()["formulaMLdeg"] == expected


def test_plane_curve_formula_rejects_boundary_lines() -> None:
    """A curve containing a line of the arrangement has no formula value."""
    with pytest.raises(InputError, match="contains line 0"):
        plane_curve_formula(parse_poly("p0*p1 + p0*p2"))
    with pytest.raises(InputError, match="ternary"):
        plane_curve_formula(parse_poly("p0*p1 - p2*p3"))


def test_ml_degree_of_hardy_weinberg() -> None:
    """The Hardy-Weinberg curve has rational MLE, so ML degree one."""
    report = ml_degree(HARDY_WEINBERG, CONFIG, trials=2)
    assert report.ml_degree == 1
    assert report.stable
    assert len(set(report.seeds)) == 2  # noqa: PLR2004


def test_ml_degree_is_reproducible() -> None:
    """The same seed gives the same seeds and counts."""
    first = ml_degree(HARDY_WEINBERG, CONFIG, trials=1)
    second = ml_degree(HARDY_WEINBERG, CONFIG, trials=1)
    assert first == second


def test_ml_degree_of_line_through_corner() -> None:
    """All critical points of V(p0 + p1) lie on the arrangement."""
    report = ml_degree(VarietySpec.hypersurface(parse_poly("p0 + p1", nvars=3)), CONFIG, trials=2)
    assert report.ml_degree == 0


def test_ml_degree_needs_a_trial() -> None:
    """Zero trials are an input error."""
    with pytest.raises(InputError, match="at least one trial"):
        ml_degree(HARDY_WEINBERG, CONFIG, trials=0)


def test_sectional_and_bidegree_of_hardy_weinberg() -> None:
    """The curve and its two-point section give S = p^2 + 2pu and B = S."""
    sectional = sectional_ml_degree(HARDY_WEINBERG, CONFIG, trials=2)
    assert sectional.form == BinaryForm.of([1, 2, 0])
    assert sectional.stable
    bidegree = ml_bidegree(HARDY_WEINBERG, CONFIG, trials=2)
    assert bidegree.form == BinaryForm.of([1, 2, 0])
    assert bidegree.conjectural
    assert bidegree.holds is None
    assert bidegree.to_json()["form"]["text"] == "p^2 + 2pu"


def test_split_check_for_generic_conic() -> None:
    """Six critical points split into two on the line and four with u_2 = 0."""
    check = restriction_split_check(load_model("generic-quadric"), CONFIG, coord=2, trials=2)
    assert (check.total.ml_degree, check.sliced.ml_degree, check.data_zero.ml_degree) == (6, 2, 4)
    assert check.holds
    assert check.to_json()["mlTotal"] == 6  # noqa: PLR2004


def test_split_check_rejects_bad_coordinate() -> None:
    """Coordinates outside the model are rejected before any tracking."""
    with pytest.raises(InputError, match="out of range"):
        restriction_split_check(HARDY_WEINBERG, CONFIG, coord=3)


@pytest.mark.slow
def test_bidegree_of_linear_plane_is_cross_checked() -> None:
    """Linear spaces get a matroid cross-check that confirms the numerical bidegree."""
    model = load_model("catalog:linear-2-plane")
    assert isinstance(model, LinearModel)
    report = ml_bidegree(model.as_variety(), CONFIG, trials=2)
    assert report.form == BinaryForm.of([6, 3, 1, 0, 0])
    assert report.holds
    assert not report.conjectural
