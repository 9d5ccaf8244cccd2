# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Tests for rank-constrained critical points, duality, EM and supermodularity."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from lg_toolkit.errors import InputError
from lg_toolkit.rankdual import (
    MatrixPoint,
    duality_pairing,
    em_mixture,
    format_omega,
    omega_matrix,
    rank_critical_points,
    supermodular_222,
    verify_critical_rank,
)
from lg_toolkit.tracker import TrackerConfig

U22 = [[1, 2], [3, 4]]
INDEPENDENCE_MLE = np.array([[0.12, 0.18], [0.28, 0.42]])
CONFIG = TrackerConfig(seed=3, threads=1)


def test_omega_matrix() -> None:
    """Omega is u_ij u_i+ u_+j / u_++^3, exactly."""
    omega = omega_matrix(U22)
    assert omega[0][0] == Fraction(3, 250)
    assert format_omega(omega) == [["3/250", "9/250"], ["21/250", "21/125"]]
    with pytest.raises(InputError, match="nonzero total"):
        omega_matrix([[1, -1], [0, 0]])
    with pytest.raises(InputError, match="rational data"):
        omega_matrix([[1j, 1], [1, 1]])


def test_matrix_point_helpers() -> None:
    """Normalization, numerical rank and reality flags."""
    point = MatrixPoint.normalized(np.array([[12, 18], [28, 42]], dtype=complex))
    np.testing.assert_allclose(point.P, INDEPENDENCE_MLE)
    assert point.shape == (2, 2)
    assert point.numerical_rank() == 1
    assert point.is_real
    assert point.is_positive
    assert not MatrixPoint.normalized(np.array([[1, 1j], [2, 3]])).is_real
    with pytest.raises(InputError, match="sum to zero"):
        MatrixPoint.normalized(np.array([[1, -1], [2, -2]], dtype=complex))


def test_rank_one_critical_point_is_independence_mle() -> None:
    """Rank one has a unique critical point, the product of the margins."""
    (point,) = rank_critical_points(2, 2, 1, U22, CONFIG, trials=2)
    np.testing.assert_allclose(point.P, INDEPENDENCE_MLE, atol=1e-9)
    assert verify_critical_rank(point.P, U22, 1)


def test_full_rank_critical_point_is_empirical() -> None:
    """Without a rank constraint the critical point is U / u_++."""
    (point,) = rank_critical_points(2, 2, 2, U22, CONFIG)
    np.testing.assert_allclose(point.P, np.array(U22) / 10, atol=1e-9)


def test_rank_range_is_checked() -> None:
    """Ranks above min(m, n) are rejected."""
    with pytest.raises(InputError, match="out of range"):
        rank_critical_points(2, 2, 3, U22, CONFIG)


def test_duality_pairing_of_two_by_two() -> None:
    """The rank one and rank two critical points multiply to Omega."""
    rank_one = [MatrixPoint.normalized(INDEPENDENCE_MLE.astype(complex))]
    rank_two = [MatrixPoint.normalized(np.array(U22, dtype=complex))]
    report = duality_pairing(rank_one, rank_two, U22)
    assert report.pairs == ((0, 0),)
    assert report.residuals[0] < 1e-12  # noqa: PLR2004
    assert report.holds
    assert report.to_json()["realityPreserved"] is True


def test_duality_pairing_reports_mismatch() -> None:
    """Size mismatches and wrong partners are reported, not raised."""
    rank_one = [MatrixPoint.normalized(INDEPENDENCE_MLE.astype(complex))]
    assert not duality_pairing(rank_one, [], U22).perfect
    assert duality_pairing([], [], U22).holds
    wrong = [MatrixPoint.normalized(np.array([[1, 1], [1, 1]], dtype=complex))]
    report = duality_pairing(rank_one, wrong, U22)
    assert not report.perfect
    assert not report.holds
    complex_partner = [MatrixPoint.normalized(np.array(U22, dtype=complex) + np.array([[1j, 0], [0, 0]]))]
    assert not duality_pairing(rank_one, complex_partner, U22).reality_preserved


def test_verify_critical_rank() -> None:
    """Critical points pass and other rank-one points fail."""
    assert verify_critical_rank(INDEPENDENCE_MLE, U22, 1)
    assert verify_critical_rank(np.array(U22) / 10, U22, 2)
    assert not verify_critical_rank(np.outer([1, 2], [1, 1]) / 6, U22, 1)


@pytest.mark.parametrize(
    ("P", "r", "message"),
    [
        pytest.param(np.array(U22) / 10, 1, "clean rank 1", id="rank-too-high"),
        pytest.param(np.array([[0.5, 0.0], [0.25, 0.25]]), 2, "coordinate hyperplanes", id="zero-entry"),
        pytest.param(np.ones((2, 3)), 1, "shape", id="shape"),
    ],
)
def test_verify_critical_rank_errors(P: np.ndarray, r: int, message: str) -> None:
    """Points without a clean rank or off the torus are rejected."""
    with pytest.raises(InputError, match=message):
        verify_critical_rank(P, U22, r)


def test_em_rank_one_is_independence() -> None:
    """With one component EM lands on the product of margins after one update."""
    result = em_mixture(U22, 1, rng=np.random.default_rng(4))
    np.testing.assert_allclose(result.P, INDEPENDENCE_MLE, atol=1e-12)
    np.testing.assert_allclose(result.weights, [1.0])
    assert result.converged
    assert result.iterations == 2  # noqa: PLR2004


def test_em_log_likelihood_never_decreases() -> None:
    """EM updates are monotone and keep the parameters stochastic."""
    U = [[10, 1, 3], [2, 8, 4], [1, 5, 9]]
    result = em_mixture(U, 2, rng=np.random.default_rng(1), max_iters=500)
    trace = np.array(result.log_likelihood)
    assert np.all(np.diff(trace) >= -1e-9)  # noqa: PLR2004
    np.testing.assert_allclose(result.A.sum(axis=0), [1.0, 1.0])
    np.testing.assert_allclose(result.B.sum(axis=1), [1.0, 1.0])
    assert result.weights.sum() == pytest.approx(1.0)
    assert result.P.sum() == pytest.approx(1.0)
    assert result.to_json()["iterations"] == result.iterations


def test_em_accepts_explicit_start() -> None:
    """A valid starting point is used as given."""
    init = (np.array([[0.5], [0.5]]), np.array([1.0]), np.array([[0.5, 0.5]]))
    result = em_mixture(U22, 1, init)
    np.testing.assert_allclose(result.P, INDEPENDENCE_MLE, atol=1e-12)


@pytest.mark.parametrize(
    ("r", "init", "message"),
    [
        pytest.param(0, None, "at least one component", id="rank-zero"),
        pytest.param(1, (np.ones((3, 1)) / 3, np.ones(1), np.ones((1, 2)) / 2), "shapes", id="shape"),
        pytest.param(1, (np.array([[1.0], [0.0]]), np.ones(1), np.ones((1, 2)) / 2), "strictly positive", id="zero"),
        pytest.param(1, (np.ones((2, 1)), np.ones(1), np.ones((1, 2)) / 2), "stochastic", id="not-stochastic"),
    ],
)
def test_em_rejects_bad_input(
    r: int, init: tuple[np.ndarray, np.ndarray, np.ndarray] | None, message: str
) -> None:
    """Ranks and starting points are validated."""
    with pytest.raises(InputError, match=message):
        em_mixture(U22, r, init)


def test_em_rejects_negative_counts() -> None:
    """Counts must be nonnegative."""
    with pytest.raises(InputError, match="nonnegative counts"):
        em_mixture([[1, -2], [3, 4]], 1)


def test_supermodular_222() -> None:
    """Product tensors are supermodular; the parity tensor is not under any relabeling."""
    assert supermodular_222(np.ones((2, 2, 2)))
    product = np.einsum("i,j,k->ijk", [0.3, 0.7], [0.6, 0.4], [0.2, 0.8])
    assert supermodular_222(product, tol=1e-15)
    parity = np.zeros((2, 2, 2))
    for index in [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]:
        parity[index] = 1.0
    assert not supermodular_222(parity)


def _supermodular_by_pairs(P: np.ndarray) -> bool:
    cube = list(itertools.product((0, 1), repeat=3))
    for flip in cube:
        Q = {x: P[tuple(xi ^ fi for xi, fi in zip(x, flip, strict=True))] for x in cube}
        if all(
            Q[tuple(map(max, x, y))] * Q[tuple(map(min, x, y))] >= Q[x] * Q[y]
            for x, y in itertools.combinations(cube, 2)
            if any(a < b for a, b in zip(x, y, strict=True)) and any(a > b for a, b in zip(x, y, strict=True))
        ):
            return True
    return False


@pytest.mark.parametrize("seed", range(20))
def test_supermodular_222_agrees_with_pairwise_check(seed: int) -> None:
    """Random tensors get the same verdict as a check of every incomparable pair under all eight relabelings."""
    rng = np.random.default_rng(seed)
    P = rng.dirichlet(np.ones(8)).reshape(2, 2, 2)
    assert supermodular_222(P) == _supermodular_by_pairs(P)

    # exp(a.x + sum b_ij x_i x_j) with b_ij > 0 is strictly log-supermodular
    a, b = rng.normal(size=3), rng.uniform(0.5, 1.0, size=3)
    flip = rng.integers(0, 2, size=3).tolist()
    relabeled = np.zeros((2, 2, 2))
    for x in itertools.product((0, 1), repeat=3):
        exponent = np.dot(a, x) + b[0] * x[0] * x[1] + b[1] * x[0] * x[2] + b[2] * x[1] * x[2]
        relabeled[tuple(xi ^ fi for xi, fi in zip(x, flip, strict=True))] = np.exp(exponent)
    assert _supermodular_by_pairs(relabeled)
    assert supermodular_222(relabeled / relabeled.sum())


def test_supermodular_222_validation() -> None:
    """Only nonnegative 2x2x2 tensors are accepted."""
    with pytest.raises(InputError, match="2x2x2"):
        supermodular_222(np.ones((2, 2)))
    with pytest.raises(InputError, match="nonnegative"):
        supermodular_222(-np.ones((2, 2, 2)))


@pytest.mark.slow
def test_three_by_three_rank_two_is_self_dual() -> None:
    """Ten critical points of rank two pair with themselves through Omega."""
    U = [[10, 9, 1], [7, 1, 3], [2, 5, 10]]
    points = rank_critical_points(3, 3, 2, U, CONFIG, trials=2)
    assert len(points) == 10  # noqa: PLR2004
    report = duality_pairing(points, points, U)
    assert report.holds
