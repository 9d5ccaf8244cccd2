# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Determinantal models: rank-constrained critical points, duality, EM and supermodularity.

For data ``U`` the critical points of rank ``r`` and of rank ``m - r + 1`` are in bijection,
with matched pairs satisfying ``P ⋆ Q = Ω_U`` where ``Ω_U[i][j] = u_ij u_i+ u_+j / u_++^3``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, NamedTuple

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import xlogy

from lg_toolkit.critsys import build_rank_system, data_rows
from lg_toolkit.errors import InputError, UnstableCountError
from lg_toolkit.parsing import format_rational
from lg_toolkit.tracker import TrackerConfig, solve

if TYPE_CHECKING:
    from collections.abc import Sequence

    from lg_toolkit.lg_types import ComplexArray, FloatArray, JSONDict, RationalMatrix

__all__ = [
    "DualityReport",
    "EMResult",
    "MatrixPoint",
    "duality_pairing",
    "em_mixture",
    "format_omega",
    "omega_matrix",
    "rank_critical_points",
    "supermodular_222",
    "verify_critical_rank",
]

LOGGER = logging.getLogger("lg_toolkit.rankdual")

RANK_GAP = 1e-6
REAL_TOL = 1e-8
DEFAULT_PAIRING_TOL = 1e-6
DEFAULT_CRITICAL_TOL = 1e-6
DEFAULT_EM_ITERS = 10_000
DEFAULT_EM_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class MatrixPoint:
    """An ``m×n`` complex matrix normalized to ``p_++ = 1``."""

    P: ComplexArray

    @classmethod
    def normalized(cls, values: ComplexArray) -> MatrixPoint:
        """Scale a matrix so its entries sum to one.

        Returns:
            MatrixPoint: Normalized point.

        Raises:
            InputError: If the entries sum to zero.

        """
        total = complex(np.sum(values))
        if total == 0:
            msg = "Matrix entries sum to zero; cannot normalize"
            raise InputError(msg)
        return cls(np.asarray(values, dtype=np.complex128) / total)

    @property
    def shape(self) -> tuple[int, int]:
        """``(m, n)``."""
        m, n = self.P.shape
        return int(m), int(n)

    def singular_values(self) -> FloatArray:
        """Singular values in decreasing order.

        Returns:
            FloatArray: ``min(m, n)`` values.

        """
        return np.linalg.svd(self.P, compute_uv=False)

    def numerical_rank(self, gap: float = RANK_GAP) -> int:
        """Number of singular values before the first relative drop below ``gap``.

        Returns:
            int: Numerical rank.

        """
        sigma = self.singular_values()
        for k in range(1, len(sigma)):
            if sigma[k] < gap * sigma[k - 1]:
                return k
        return len(sigma)

    @property
    def is_real(self) -> bool:
        """Whether every entry is real up to ``1e-8``."""
        return bool(np.max(np.abs(self.P.imag)) <= REAL_TOL * max(1.0, float(np.max(np.abs(self.P)))))

    @property
    def is_positive(self) -> bool:
        """Whether the point is real with positive entries."""
        return self.is_real and bool(np.all(self.P.real > 0))

    def to_json(self) -> JSONDict:
        """Return ``{"re", "im", "real", "positive"}``.

        Returns:
            JSONDict: Serializable point.

        """
        return {
            "re": self.P.real.tolist(),
            "im": self.P.imag.tolist(),
            "real": self.is_real,
            "positive": self.is_positive,
        }


def rank_critical_points(
    m: int,
    n: int,
    r: int,
    U: Sequence[Sequence[object]],
    config: TrackerConfig | None = None,
    *,
    trials: int = 1,
) -> list[MatrixPoint]:
    """Critical points of the likelihood of ``U`` on ``m×n`` matrices of rank ``r``.

    With ``trials > 1`` the system is re-solved with fresh seeds and the counts must agree.

    Returns:
        list[MatrixPoint]: Regular critical points of rank exactly ``r``, in canonical order.

    Raises:
        UnstableCountError: If repeated solves disagree on the count.

    """
    config = config or TrackerConfig()
    system = build_rank_system(m, n, r, U)
    counts: list[int] = []
    points: list[MatrixPoint] = []
    for trial in range(max(1, trials)):
        result = solve(system, config.with_seed(config.seed + trial))
        found: list[MatrixPoint] = []
        for point in result.of_kind():
            candidate = MatrixPoint.normalized(np.array(point.coordinates, dtype=np.complex128).reshape(m, n))
            if candidate.numerical_rank() == r:
                found.append(candidate)
            else:
                LOGGER.debug("dropping a critical point of numerical rank %s", candidate.numerical_rank())
        counts.append(len(found))
        if trial == 0:
            points = found
    if len(set(counts)) > 1:
        msg = f"Rank {r} critical point counts disagree across solves: {counts}"
        raise UnstableCountError(msg)
    LOGGER.info("%sx%s rank %s: %s critical points", m, n, r, len(points))
    return points


def omega_matrix(U: Sequence[Sequence[object]]) -> RationalMatrix:
    """Return ``Ω_U[i][j] = u_ij u_i+ u_+j / u_++^3`` exactly.

    Returns:
        RationalMatrix: ``m×n`` rationals.

    Raises:
        InputError: If ``U`` is not rational or ``u_++ = 0``.

    """
    exact: list[list[Fraction]] = []
    for row in data_rows(U):
        if any(not isinstance(v, Fraction) for v in row):
            msg = "Omega needs rational data"
            raise InputError(msg)
        exact.append([v for v in row if isinstance(v, Fraction)])
    total = sum((v for row in exact for v in row), Fraction(0))
    if total == 0:
        msg = "Data must have a nonzero total u_++"
        raise InputError(msg)
    row_sums = [sum(row, Fraction(0)) for row in exact]
    col_sums = [sum(col, Fraction(0)) for col in zip(*exact, strict=True)]
    return tuple(
        tuple(v * row_sums[i] * col_sums[j] / total**3 for j, v in enumerate(row)) for i, row in enumerate(exact)
    )


class DualityReport(NamedTuple):
    """Matching between critical points of ranks ``r`` and ``m - r + 1``.

    ``pairs`` lists ``(i, j)`` with ``sols_r[i]`` matched to ``sols_s[j]``.
    """

    pairs: tuple[tuple[int, int], ...]
    residuals: tuple[float, ...]
    perfect: bool
    reality_preserved: bool

    @property
    def holds(self) -> bool:
        """Whether the matching is perfect and preserves reality."""
        return self.perfect and self.reality_preserved

    def to_json(self) -> JSONDict:
        """Return ``{"pairs", "residuals", "perfect", "realityPreserved", "holds"}``.

        Returns:
            JSONDict: Serializable report.

        """
        return {
            "pairs": [list(pair) for pair in self.pairs],
            "residuals": list(self.residuals),
            "perfect": self.perfect,
            "realityPreserved": self.reality_preserved,
            "holds": self.holds,
        }


def duality_pairing(
    sols_r: Sequence[MatrixPoint],
    sols_s: Sequence[MatrixPoint],
    U: Sequence[Sequence[object]],
    tol: float = DEFAULT_PAIRING_TOL,
) -> DualityReport:
    """Match ``P_i`` to ``Q_j`` minimizing ``max |P_i ⋆ Q_j - Ω_U|`` over perfect matchings.

    A matching that is not perfect (different sizes or a residual above ``tol``) is reported,
    never raised.

    Returns:
        DualityReport: Matched pairs and their residuals.

    """
    omega = np.array([[float(v) for v in row] for row in omega_matrix(U)], dtype=np.complex128)
    scale = float(np.max(np.abs(omega))) or 1.0
    if not sols_r or not sols_s:
        perfect = len(sols_r) == len(sols_s)
        return DualityReport((), (), perfect=perfect, reality_preserved=True)
    cost = np.empty((len(sols_r), len(sols_s)))
    for i, P in enumerate(sols_r):
        for j, Q in enumerate(sols_s):
            cost[i, j] = float(np.max(np.abs(P.P * Q.P - omega))) / scale
    rows, cols = linear_sum_assignment(cost)
    pairs = tuple((int(i), int(j)) for i, j in zip(rows, cols, strict=True))
    residuals = tuple(float(cost[i, j]) for i, j in pairs)
    perfect = len(sols_r) == len(sols_s) and all(res < tol for res in residuals)
    reality = all(sols_r[i].is_real == sols_s[j].is_real for i, j in pairs)
    if not perfect:
        LOGGER.warning(
            "duality matching is not perfect: sizes %s/%s, residuals %s", len(sols_r), len(sols_s), residuals
        )
    return DualityReport(pairs, residuals, perfect=perfect, reality_preserved=reality)


def verify_critical_rank(
    P: ComplexArray, U: Sequence[Sequence[object]], r: int, tol: float = DEFAULT_CRITICAL_TOL
) -> bool:
    """Check that ``Z = [u_ij / p_ij - u_++ / p_++]`` is orthogonal to the tangent space at ``P``.

    With ``P = C W`` of rank ``r`` the conditions are ``Cᵀ Z = 0`` and ``Z Wᵀ = 0``, tested
    relative to the norms of the factors.

    Returns:
        bool: Whether ``P`` is critical on the rank-``r`` variety.

    Raises:
        InputError: If ``P`` does not have a clean numerical rank ``r`` or has a zero entry.

    """
    matrix = np.asarray(P, dtype=np.complex128)
    data = np.array([[complex(v) for v in row] for row in data_rows(U)], dtype=np.complex128)
    if matrix.shape != data.shape:
        msg = f"Point has shape {matrix.shape}, data has shape {data.shape}"
        raise InputError(msg)
    if np.any(matrix == 0):
        msg = "Criticality is only defined off the coordinate hyperplanes"
        raise InputError(msg)
    left, sigma, right = np.linalg.svd(matrix)
    if len(sigma) > r and sigma[r] >= RANK_GAP * sigma[r - 1]:
        msg = f"Point does not have a clean rank {r}: singular values {sigma.tolist()}"
        raise InputError(msg)
    if sigma[r - 1] < RANK_GAP * sigma[0]:
        msg = f"Point has rank below {r}: singular values {sigma.tolist()}"
        raise InputError(msg)
    Z = data / matrix - data.sum() / matrix.sum()
    C = left[:, :r]
    W = right[:r, :]
    size = float(np.linalg.norm(Z)) or 1.0
    return bool(np.linalg.norm(C.T @ Z) / size < tol and np.linalg.norm(Z @ W.T) / size < tol)


class EMResult(NamedTuple):
    """Outcome of :func:`em_mixture`.

    ``A`` is ``m×r`` with columns in the simplex, ``weights`` the mixing distribution and ``B``
    is ``r×n`` with rows in the simplex; ``P = A diag(weights) B``.
    """

    A: FloatArray
    weights: FloatArray
    B: FloatArray
    P: FloatArray
    log_likelihood: tuple[float, ...]
    converged: bool

    @property
    def iterations(self) -> int:
        """Number of EM updates performed."""
        return len(self.log_likelihood) - 1

    def to_json(self) -> JSONDict:
        """Return ``{"A", "weights", "B", "P", "logLikelihood", "iterations", "converged"}``.

        Returns:
            JSONDict: Serializable result.

        """
        return {
            "A": self.A.tolist(),
            "weights": self.weights.tolist(),
            "B": self.B.tolist(),
            "P": self.P.tolist(),
            "logLikelihood": list(self.log_likelihood),
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _random_init(m: int, n: int, r: int, rng: np.random.Generator) -> tuple[FloatArray, FloatArray, FloatArray]:
    A = rng.dirichlet(np.ones(m), size=r).T
    weights = rng.dirichlet(np.ones(r))
    B = rng.dirichlet(np.ones(n), size=r)
    return A, weights, B


def _check_init(init: tuple[FloatArray, FloatArray, FloatArray], m: int, n: int, r: int) -> None:
    A, weights, B = (np.asarray(block, dtype=np.float64) for block in init)
    if A.shape != (m, r) or weights.shape != (r,) or B.shape != (r, n):
        msg = f"Initial parameters must have shapes ({m}, {r}), ({r},), ({r}, {n})"
        raise InputError(msg)
    if np.any(A <= 0) or np.any(weights <= 0) or np.any(B <= 0):
        msg = "Initial parameters must be strictly positive"
        raise InputError(msg)
    if not (np.allclose(A.sum(axis=0), 1) and np.isclose(weights.sum(), 1) and np.allclose(B.sum(axis=1), 1)):
        msg = "Initial parameters must be stochastic: columns of A, weights and rows of B sum to one"
        raise InputError(msg)


def em_mixture(
    U: Sequence[Sequence[object]],
    r: int,
    init: tuple[FloatArray, FloatArray, FloatArray] | None = None,
    *,
    rng: np.random.Generator | None = None,
    max_iters: int = DEFAULT_EM_ITERS,
    tol: float = DEFAULT_EM_TOL,
) -> EMResult:
    """Fit the mixture of ``r`` independence models to ``U`` by expectation-maximization.

    Stops when the log-likelihood gains less than ``tol`` relative to its size, or after
    ``max_iters`` updates. Zero counts contribute ``0 · log 0 = 0``.

    Returns:
        EMResult: Final parameters and the log-likelihood trace.

    Raises:
        InputError: For a non-positive rank, negative data or a malformed initial point.

    """
    data = np.array([[float(v) for v in row] for row in data_rows(U)], dtype=np.float64)
    m, n = data.shape
    if r < 1:
        msg = f"Mixture needs at least one component, got {r}"
        raise InputError(msg)
    if np.any(data < 0) or data.sum() <= 0:
        msg = "EM needs nonnegative counts with a positive total"
        raise InputError(msg)
    if init is None:
        A, weights, B = _random_init(m, n, r, rng or np.random.default_rng(0))
    else:
        _check_init(init, m, n, r)
        A, weights, B = (np.array(block, dtype=np.float64) for block in init)
    total = data.sum()

    def model(left: FloatArray, mix: FloatArray, right: FloatArray) -> FloatArray:
        return (left * mix) @ right

    def log_likelihood(P: FloatArray) -> float:
        return float(np.sum(xlogy(data, P)) - total * np.log(P.sum()))

    P = model(A, weights, B)
    trace = [log_likelihood(P)]
    converged = False
    for _ in range(max_iters):
        ratio = np.divide(data, P, out=np.zeros_like(data), where=P > 0)
        # expected counts per component, shape (r, m, n)
        expected = (A.T * weights[:, None])[:, :, None] * B[:, None, :] * ratio[None, :, :]
        mass = expected.sum(axis=(1, 2))
        weights = mass / total
        A = (expected.sum(axis=2) / mass[:, None]).T
        B = expected.sum(axis=1) / mass[:, None]
        P = model(A, weights, B)
        trace.append(log_likelihood(P))
        if trace[-1] - trace[-2] <= tol * abs(trace[-1]):
            converged = True
            break
    LOGGER.debug("EM rank %s: %s iterations, log-likelihood %s", r, len(trace) - 1, trace[-1])
    return EMResult(A, weights, B, P, tuple(trace), converged)


_NINE_INEQUALITIES = (
    ((0, 0, 0), (1, 1, 1), (0, 0, 1), (1, 1, 0)),
    ((0, 0, 0), (1, 1, 1), (0, 1, 0), (1, 0, 1)),
    ((0, 0, 0), (1, 1, 1), (1, 0, 0), (0, 1, 1)),
    ((0, 0, 1), (1, 1, 1), (0, 1, 1), (1, 0, 1)),
    ((0, 1, 0), (1, 1, 1), (0, 1, 1), (1, 1, 0)),
    ((1, 0, 0), (1, 1, 1), (1, 0, 1), (1, 1, 0)),
    ((0, 0, 0), (0, 1, 1), (0, 0, 1), (0, 1, 0)),
    ((0, 0, 0), (1, 0, 1), (0, 0, 1), (1, 0, 0)),
    ((0, 0, 0), (1, 1, 0), (0, 1, 0), (1, 0, 0)),
)


def supermodular_222(P: Sequence[Sequence[Sequence[object]]] | FloatArray, *, tol: float = 0.0) -> bool:
    """Whether a nonnegative ``2×2×2`` tensor is supermodular after some relabeling.

    Each inequality reads ``p[a] p[b] >= p[c] p[d]``; all nine must hold for one of the eight
    label swaps ``1 ↔ 2`` applied independently per factor.

    Returns:
        bool: Membership of the tensor in the supermodular cells.

    Raises:
        InputError: If the tensor is not ``2×2×2`` or has a negative entry.

    """
    tensor = np.asarray(P, dtype=np.float64)
    if tensor.shape != (2, 2, 2):
        msg = f"Expected a 2x2x2 tensor, got shape {tensor.shape}"
        raise InputError(msg)
    if np.any(tensor < 0):
        msg = "Supermodularity is defined for nonnegative tensors"
        raise InputError(msg)
    for flips in itertools.product((0, 1), repeat=3):
        swapped = tensor
        for axis, flip in enumerate(flips):
            if flip:
                swapped = np.flip(swapped, axis=axis)
        if all(swapped[a] * swapped[b] >= swapped[c] * swapped[d] - tol for a, b, c, d in _NINE_INEQUALITIES):
            return True
    return False


def format_omega(omega: RationalMatrix) -> list[list[str]]:
    """Render ``Ω_U`` entries as ``"num/den"`` strings.

    Returns:
        list[list[str]]: Formatted matrix.

    """
    return [[format_rational(v) for v in row] for row in omega]
