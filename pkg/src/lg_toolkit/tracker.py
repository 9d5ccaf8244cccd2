# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Homotopy continuation for critical systems.

The homotopy is ``H(x, t) = (1 - t) F(x) + t γ G(x)`` with ``G`` a linear-product start
system (or, for parameter homotopies, the same family at other data). Paths run from
``t = 1`` to ``t = 0`` in vectorised batches: a fourth-order Runge–Kutta predictor on
``dx/dt = -H_x^{-1} H_t`` followed by at most three Newton corrections. Endpoints are
refined by Newton on ``F``, classified through the system's coordinate map, clustered and
sorted canonically so that a fixed seed reproduces the same :class:`SolutionSet`.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import IntEnum, StrEnum
from typing import TYPE_CHECKING, NamedTuple, Protocol, Self

import numpy as np
from scipy import sparse

from lg_toolkit.config import DEFAULT_COND_THRESHOLD, DEFAULT_MAX_PATHS, DEFAULT_TAU, StartKind, env_int
from lg_toolkit.critsys import SingularPolicy, jacobian_rank
from lg_toolkit.errors import InputError
from lg_toolkit.start_systems import start_system

if TYPE_CHECKING:
    from lg_toolkit.config import Settings
    from lg_toolkit.critsys import CriticalSystem, DataVector
    from lg_toolkit.lg_types import ComplexArray, FloatArray, JSONDict
    from lg_toolkit.polyarith import SparsePoly

__all__ = [
    "CompiledSystem",
    "Homotopy",
    "PathStats",
    "PathStatus",
    "PointClass",
    "RefineResult",
    "SolutionPoint",
    "SolutionSet",
    "TrackerConfig",
    "parameter_homotopy",
    "refine",
    "solve",
    "track_paths",
]

LOGGER = logging.getLogger("lg_toolkit.tracker")

CORRECTOR_STEPS = 3
GROWTH_STREAK = 5
GAMMA_ATTEMPTS = 3
SORT_DIGITS = 8
_NEWTON_FLOOR = 1e-14


class PointClass(StrEnum):
    """Classification of a refined endpoint."""

    OFF_H_REGULAR = "offH_regular"
    ON_H = "onH"
    SINGULAR = "singular"
    AT_INFINITY = "atInfinity"


class PathStatus(IntEnum):
    """Tracking state of a single path."""

    ACTIVE = 0
    DONE = 1
    FAILED = 2
    DIVERGED = 3


def _default_threads() -> int:
    return max(1, env_int("LG_THREADS", default=1) or 1)


@dataclass(frozen=True, slots=True)
class TrackerConfig:
    """Numerical settings for path tracking and endpoint classification."""

    seed: int = 0
    gamma: complex | None = None
    initial_step: float = 0.05
    min_step: float = 1e-10
    max_step: float = 0.1
    corrector_tol: float = 1e-8
    endpoint_tol: float = 1e-8
    max_newton_iters: int = 10
    boundary_tau: float = DEFAULT_TAU
    singular_cond_threshold: float = DEFAULT_COND_THRESHOLD
    start_kind: StartKind = StartKind.MULTIHOMOGENEOUS
    max_paths: int = DEFAULT_MAX_PATHS
    threads: int = field(default_factory=_default_threads)
    max_steps: int = 20_000
    infinity_norm: float = 1e8
    cluster_tol: float = 1e-6

    def __post_init__(self) -> None:
        """Validate step sizes and tolerances.

        Raises:
            InputError: If the step bounds are out of order or a tolerance is not positive.

        """
        if not 0 < self.min_step <= self.initial_step <= self.max_step < 1:
            msg = (
                f"Need 0 < min_step <= initial_step <= max_step < 1, got "
                f"{self.min_step}, {self.initial_step}, {self.max_step}"
            )
            raise InputError(msg)
        tolerances = {
            "corrector_tol": self.corrector_tol,
            "endpoint_tol": self.endpoint_tol,
            "boundary_tau": self.boundary_tau,
            "singular_cond_threshold": self.singular_cond_threshold,
            "infinity_norm": self.infinity_norm,
            "cluster_tol": self.cluster_tol,
        }
        for name, value in tolerances.items():
            if not value > 0:
                msg = f"{name} must be positive, got {value}"
                raise InputError(msg)
        if self.max_newton_iters < 1 or self.max_paths < 1 or self.threads < 1 or self.max_steps < 1:
            msg = "max_newton_iters, max_paths, threads and max_steps must be positive"
            raise InputError(msg)
        if self.gamma is not None and not math.isclose(abs(self.gamma), 1.0, rel_tol=1e-9):
            msg = f"gamma must lie on the unit circle, got {self.gamma}"
            raise InputError(msg)

    @classmethod
    def from_settings(cls, settings: Settings, **overrides: object) -> Self:
        """Build a config from environment settings, with keyword overrides.

        Returns:
            Self: Tracker configuration.

        """
        base = cls(
            seed=settings.seed,
            boundary_tau=settings.tau,
            singular_cond_threshold=settings.cond_threshold,
            start_kind=settings.start,
            max_paths=settings.max_paths,
            threads=settings.threads,
        )
        return replace(base, **overrides) if overrides else base

    def with_seed(self, seed: int) -> TrackerConfig:
        """Return a copy with a new seed and a gamma drawn from it.

        Returns:
            TrackerConfig: Reseeded configuration.

        """
        return replace(self, seed=seed, gamma=None)

    def resolved_gamma(self, attempt: int = 0) -> complex:
        """Return the configured gamma, or a seeded random point on the unit circle.

        Returns:
            complex: Gamma for the given attempt.

        """
        if self.gamma is not None and attempt == 0:
            return self.gamma
        rng = np.random.default_rng((self.seed, 0x9A77A, attempt))
        return complex(np.exp(2j * np.pi * rng.random()))

    def rng(self) -> np.random.Generator:
        """Return a generator seeded from :attr:`seed`.

        Returns:
            np.random.Generator: Fresh generator.

        """
        return np.random.default_rng(self.seed)


# -- compiled evaluation ------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class _TermTable:
    exponents: np.ndarray
    coeffs: ComplexArray
    rows: sparse.csr_array

    @classmethod
    def build(cls, entries: Sequence[tuple[int, tuple[int, ...], complex]], nvars: int, nrows: int) -> _TermTable:
        count = len(entries)
        exponents = np.zeros((count, nvars), dtype=np.int64)
        coeffs = np.zeros(count, dtype=np.complex128)
        row_index = np.zeros(count, dtype=np.int64)
        for k, (row, exponent, coeff) in enumerate(entries):
            exponents[k] = exponent
            coeffs[k] = coeff
            row_index[k] = row
        rows = sparse.csr_array((np.ones(count), (row_index, np.arange(count))), shape=(nrows, count))
        return cls(exponents, coeffs, rows)

    def monomials(self, powers: ComplexArray) -> ComplexArray:
        values = np.ones((powers.shape[0], self.exponents.shape[0]), dtype=np.complex128)
        for i in range(self.exponents.shape[1]):
            values *= powers[:, i, self.exponents[:, i]]
        return values * self.coeffs[None, :]

    def apply(self, terms: ComplexArray) -> ComplexArray:
        return np.asarray(self.rows @ terms.T).T


@dataclass(frozen=True, slots=True)
class CompiledSystem:
    """Polynomials compiled to exponent tables for batched numpy evaluation.

    Each equation is divided by its row scale (the largest coefficient modulus).
    """

    nvars: int
    nequations: int
    max_degree: int
    values: _TermTable
    jacobian_terms: _TermTable
    scales: FloatArray

    @classmethod
    def from_polys(cls, polys: Sequence[SparsePoly], scales: Sequence[float] | FloatArray | None = None) -> Self:
        """Compile polynomials sharing one ring.

        Args:
            polys: Polynomials to compile.
            scales: Row divisors; defaults to ``max |coefficient|`` per polynomial.

        Returns:
            Self: Compiled system.

        Raises:
            InputError: If the polynomials do not share a ring.

        """
        if not polys or len({p.nvars for p in polys}) != 1:
            msg = "Compiled systems need polynomials over one ring"
            raise InputError(msg)
        nvars = polys[0].nvars
        row_scales = np.array(scales if scales is not None else row_scales_of(polys), dtype=np.float64)
        value_entries: list[tuple[int, tuple[int, ...], complex]] = []
        jacobian_entries: list[tuple[int, tuple[int, ...], complex]] = []
        for row, poly in enumerate(polys):
            for exponent, coeff in poly.terms.items():
                scaled = complex(coeff) / row_scales[row]
                value_entries.append((row, exponent, scaled))
                for var, power in enumerate(exponent):
                    if power:
                        lowered = exponent[:var] + (power - 1,) + exponent[var + 1 :]
                        jacobian_entries.append((row * nvars + var, lowered, scaled * power))
        max_degree = max((p.degree for p in polys), default=0)
        return cls(
            nvars=nvars,
            nequations=len(polys),
            max_degree=max(max_degree, 1),
            values=_TermTable.build(value_entries, nvars, len(polys)),
            jacobian_terms=_TermTable.build(jacobian_entries, nvars, len(polys) * nvars),
            scales=row_scales,
        )

    def _powers(self, X: ComplexArray) -> ComplexArray:
        powers = np.empty((X.shape[0], self.nvars, self.max_degree + 1), dtype=np.complex128)
        powers[:, :, 0] = 1
        for e in range(1, self.max_degree + 1):
            powers[:, :, e] = powers[:, :, e - 1] * X
        return powers

    def evaluate(self, X: ComplexArray) -> ComplexArray:
        """Evaluate at a batch of points ``(B, n)``.

        Returns:
            ComplexArray: Values ``(B, neq)``.

        """
        return self.values.apply(self.values.monomials(self._powers(X)))

    def evaluate_and_jacobian(self, X: ComplexArray) -> tuple[ComplexArray, ComplexArray]:
        """Evaluate values and Jacobians at a batch of points.

        Returns:
            tuple[ComplexArray, ComplexArray]: Values ``(B, neq)`` and Jacobians ``(B, neq, n)``.

        """
        powers = self._powers(X)
        values = self.values.apply(self.values.monomials(powers))
        jac = self.jacobian_terms.apply(self.jacobian_terms.monomials(powers))
        return values, jac.reshape(X.shape[0], self.nequations, self.nvars)

    def relative_residual(self, X: ComplexArray) -> FloatArray:
        """Return ``max_i |F_i(x)| / sum_t |c_t x^t|`` per point, a backward-error measure.

        Returns:
            FloatArray: Residual per point.

        """
        terms = self.values.monomials(self._powers(X))
        values = np.abs(self.values.apply(terms))
        magnitudes = self.values.apply(np.abs(terms)).real
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(magnitudes > 0, values / magnitudes, values)
        return np.max(ratio, axis=1)


def row_scales_of(polys: Sequence[SparsePoly]) -> FloatArray:
    """Return the largest coefficient modulus of each polynomial (one for the zero polynomial).

    Returns:
        FloatArray: Row scales.

    """
    scales = [max((abs(complex(c)) for c in p.terms.values()), default=1.0) for p in polys]
    return np.array([s if s > 0 else 1.0 for s in scales], dtype=np.float64)


class BatchSystem(Protocol):
    """Anything evaluable on batches of points with Jacobians."""

    def evaluate_and_jacobian(self, X: ComplexArray) -> tuple[ComplexArray, ComplexArray]:
        """Evaluate values ``(B, neq)`` and Jacobians ``(B, neq, n)``."""
        ...


def _batch_solve(A: ComplexArray, b: ComplexArray) -> ComplexArray:
    """Solve ``A x = b`` for a batch; singular members fall back to least squares."""
    try:
        return np.linalg.solve(A, b[..., None])[..., 0]
    except np.linalg.LinAlgError:
        out = np.empty_like(b)
        for k in range(A.shape[0]):
            out[k] = np.linalg.lstsq(A[k], b[k], rcond=None)[0]
        return out


@dataclass(frozen=True, slots=True)
class Homotopy:
    """``H(x, t) = (1 - t) target(x) + t γ start(x)``."""

    target: BatchSystem
    start: BatchSystem
    gamma: complex

    def pieces(self, X: ComplexArray, t: FloatArray) -> tuple[ComplexArray, ComplexArray, ComplexArray]:
        """Return ``H``, ``H_x`` and ``H_t`` at a batch of ``(x, t)``.

        Returns:
            tuple[ComplexArray, ComplexArray, ComplexArray]: Values, Jacobians, t-derivatives.

        """
        F, JF = self.target.evaluate_and_jacobian(X)
        G, JG = self.start.evaluate_and_jacobian(X)
        a = (1 - t)[:, None]
        b = (t * self.gamma)[:, None]
        return a * F + b * G, a[..., None] * JF + b[..., None] * JG, self.gamma * G - F

    def velocity(self, X: ComplexArray, t: FloatArray) -> ComplexArray:
        """Davidenko right-hand side ``-H_x^{-1} H_t``.

        Returns:
            ComplexArray: ``dx/dt`` per point.

        """
        _, Hx, Ht = self.pieces(X, t)
        return -_batch_solve(Hx, Ht)


def _rk4(homotopy: Homotopy, X: ComplexArray, t: FloatArray, dt: FloatArray) -> ComplexArray:
    step = dt[:, None]
    k1 = homotopy.velocity(X, t)
    k2 = homotopy.velocity(X + step * k1 / 2, t + dt / 2)
    k3 = homotopy.velocity(X + step * k2 / 2, t + dt / 2)
    k4 = homotopy.velocity(X + step * k3, t + dt)
    return X + step * (k1 + 2 * k2 + 2 * k3 + k4) / 6


def _correct(homotopy: Homotopy, X: ComplexArray, t: FloatArray, tol: float) -> tuple[ComplexArray, np.ndarray]:
    X = X.copy()
    converged = np.zeros(X.shape[0], dtype=bool)
    for _ in range(CORRECTOR_STEPS):
        H, Hx, _ = homotopy.pieces(X, t)
        dx = _batch_solve(Hx, -H)
        X += dx
        converged = np.linalg.norm(dx, axis=1) <= tol * (1 + np.linalg.norm(X, axis=1))
        if converged.all():
            break
    return X, converged


class TrackResult(NamedTuple):
    """Endpoints and statuses of a batch of paths."""

    endpoints: ComplexArray
    statuses: np.ndarray
    steps: np.ndarray


def track_paths(homotopy: Homotopy, starts: ComplexArray, config: TrackerConfig) -> TrackResult:
    """Track every start point from ``t = 1`` to ``t = 0``.

    Each path keeps its own step size: it doubles after :data:`GROWTH_STREAK` consecutive
    accepted steps and halves on a rejected one. A step is rejected when the corrector
    fails to converge or moves the point further than the predictor did (a jump guard).
    Converged, diverged and failed paths are frozen.

    Returns:
        TrackResult: Endpoints, :class:`PathStatus` codes and step counts.

    """
    X = np.array(starts, dtype=np.complex128, copy=True)
    count = X.shape[0]
    t = np.ones(count)
    h = np.full(count, config.initial_step)
    streak = np.zeros(count, dtype=np.int64)
    steps = np.zeros(count, dtype=np.int64)
    status = np.full(count, PathStatus.ACTIVE, dtype=np.int64)
    while True:
        active = np.flatnonzero(status == PathStatus.ACTIVE)
        if active.size == 0:
            break
        x0, t0 = X[active], t[active]
        t1 = np.maximum(t0 - h[active], 0.0)
        with np.errstate(all="ignore"):
            predicted = _rk4(homotopy, x0, t0, t1 - t0)
            corrected, ok = _correct(homotopy, predicted, t1, config.corrector_tol)
            scale = 1 + np.linalg.norm(corrected, axis=1)
            displacement = np.linalg.norm(predicted - x0, axis=1)
            correction = np.linalg.norm(corrected - predicted, axis=1)
            ok &= np.isfinite(corrected).all(axis=1)
            ok &= correction <= displacement / 2 + config.corrector_tol * scale

        accepted, rejected = active[ok], active[~ok]
        X[accepted] = corrected[ok]
        t[accepted] = t1[ok]
        streak[accepted] += 1
        grow = accepted[streak[accepted] >= GROWTH_STREAK]
        h[grow] = np.minimum(2 * h[grow], config.max_step)
        streak[grow] = 0
        h[rejected] /= 2
        streak[rejected] = 0
        steps[active] += 1

        status[accepted[t[accepted] <= 0]] = PathStatus.DONE
        status[accepted[np.linalg.norm(X[accepted], axis=1) > config.infinity_norm]] = PathStatus.DIVERGED
        status[rejected[h[rejected] < config.min_step]] = PathStatus.FAILED
        exhausted = active[(steps[active] >= config.max_steps) & (status[active] == PathStatus.ACTIVE)]
        status[exhausted] = PathStatus.FAILED
    return TrackResult(X, status, steps)


# -- refinement -------------------------------------------------------------------------


def _newton(compiled: CompiledSystem, X: ComplexArray, max_iters: int) -> tuple[ComplexArray, np.ndarray]:
    """Monotone Newton: a step that increases the residual is undone and the point frozen.

    Returns:
        tuple[ComplexArray, np.ndarray]: Refined points and iteration counts.

    """
    X = np.array(X, dtype=np.complex128, copy=True)
    iterations = np.zeros(X.shape[0], dtype=np.int64)
    with np.errstate(all="ignore"):
        residual = np.linalg.norm(compiled.evaluate(X), axis=1)
        active = np.isfinite(X).all(axis=1)
        for _ in range(max_iters):
            index = np.flatnonzero(active)
            if index.size == 0:
                break
            F, J = compiled.evaluate_and_jacobian(X[index])
            dx = _batch_solve(J, -F)
            trial = X[index] + dx
            trial_residual = np.linalg.norm(compiled.evaluate(trial), axis=1)
            better = np.isfinite(trial).all(axis=1) & (trial_residual <= residual[index])
            moved = index[better]
            X[moved] = trial[better]
            residual[moved] = trial_residual[better]
            iterations[moved] += 1
            tiny = np.linalg.norm(dx, axis=1) <= _NEWTON_FLOOR * (1 + np.linalg.norm(trial, axis=1))
            active[index[~better | tiny]] = False
    return X, iterations


def _conditions(compiled: CompiledSystem, X: ComplexArray) -> FloatArray:
    out = np.full(X.shape[0], np.inf)
    if X.shape[0] == 0:
        return out
    with np.errstate(all="ignore"):
        _, J = compiled.evaluate_and_jacobian(X)
        finite = np.isfinite(J).all(axis=(1, 2))
        if finite.any():
            out[finite] = np.linalg.cond(J[finite])
    out[~np.isfinite(out)] = np.inf
    return out


def _newton_steps(compiled: CompiledSystem, X: ComplexArray) -> FloatArray:
    """Relative size of one more Newton step: tiny at regular roots, about half the error at singular ones."""
    out = np.full(X.shape[0], np.inf)
    if X.shape[0] == 0:
        return out
    with np.errstate(all="ignore"):
        F, J = compiled.evaluate_and_jacobian(X)
        finite = np.isfinite(F).all(axis=1) & np.isfinite(J).all(axis=(1, 2))
        if finite.any():
            dx = _batch_solve(J[finite], -F[finite])
            out[finite] = np.linalg.norm(dx, axis=1) / (1 + np.linalg.norm(X[finite], axis=1))
    out[~np.isfinite(out)] = np.inf
    return out


class RefineResult(NamedTuple):
    """Outcome of refining a single point."""

    point: tuple[complex, ...]
    residual: float
    condition: float
    converged: bool
    iterations: int


def refine(
    point: Sequence[complex], system: CriticalSystem, tol: float = 1e-12, *, max_iters: int = 50
) -> RefineResult:
    """Refine ``point`` by Newton's method on ``system``.

    ``converged`` is set when the relative residual drops below ``tol``. Near singular
    solutions Newton converges slowly, so the flag typically stays false there and the
    condition estimate is large.

    Returns:
        RefineResult: Refined point with residual and condition estimate.

    """
    compiled = CompiledSystem.from_polys(system.equations)
    X = np.array([point], dtype=np.complex128)
    refined, iterations = _newton(compiled, X, max_iters)
    residual = float(compiled.relative_residual(refined)[0])
    condition = float(_conditions(compiled, refined)[0])
    return RefineResult(
        tuple(complex(z) for z in refined[0]),
        residual,
        condition,
        bool(residual < tol and np.isfinite(refined).all()),
        int(iterations[0]),
    )


# -- solution sets ----------------------------------------------------------------------


class SolutionPoint(NamedTuple):
    """A classified endpoint."""

    values: tuple[complex, ...]
    coordinates: tuple[complex, ...]
    residual: float
    condition: float
    kind: PointClass
    cluster: int
    multiplicity: int

    def to_json(self) -> JSONDict:
        """Return ``{"re", "im", "p", "residual", "condition", "class", "cluster", "multiplicity"}``.

        Returns:
            JSONDict: Serializable point.

        """
        return {
            "re": [z.real for z in self.values],
            "im": [z.imag for z in self.values],
            "p": {"re": [z.real for z in self.coordinates], "im": [z.imag for z in self.coordinates]},
            "residual": self.residual if math.isfinite(self.residual) else None,
            "condition": self.condition if math.isfinite(self.condition) else None,
            "class": self.kind.value,
            "cluster": self.cluster,
            "multiplicity": self.multiplicity,
        }


class PathStats(NamedTuple):
    """Path accounting: ``converged + failed == tracked``.

    ``converged`` counts every path that reached an endpoint, including the ``diverged`` ones
    whose endpoint lies at infinity.
    """

    tracked: int
    converged: int
    failed: int
    crossings: int = 0
    diverged: int = 0

    @classmethod
    def from_statuses(cls, statuses: np.ndarray, crossings: int = 0) -> Self:
        """Count final path statuses.

        Returns:
            PathStats: Accounting for ``statuses``.

        """
        diverged = int(np.sum(statuses == PathStatus.DIVERGED))
        converged = int(np.sum(statuses == PathStatus.DONE)) + diverged
        return cls(statuses.size, converged, statuses.size - converged, crossings, diverged)


@dataclass(frozen=True, slots=True)
class SolutionSet:
    """Classified, deduplicated and canonically sorted endpoints."""

    points: tuple[SolutionPoint, ...]
    path_stats: PathStats
    start_kind: StartKind | None = None
    gamma: complex | None = None

    def count(self, kind: PointClass = PointClass.OFF_H_REGULAR) -> int:
        """Number of distinct points of one class.

        Returns:
            int: Point count.

        """
        return sum(1 for point in self.points if point.kind is kind)

    def of_kind(self, kind: PointClass = PointClass.OFF_H_REGULAR) -> tuple[SolutionPoint, ...]:
        """Points of one class, in canonical order.

        Returns:
            tuple[SolutionPoint, ...]: Matching points.

        """
        return tuple(point for point in self.points if point.kind is kind)

    def regular_values(self) -> ComplexArray:
        """Unknown values of the regular off-H points as an array ``(k, n)``.

        Returns:
            ComplexArray: Stacked values.

        """
        regular = self.of_kind()
        if not regular:
            return np.zeros((0, 0), dtype=np.complex128)
        return np.array([point.values for point in regular], dtype=np.complex128)

    def to_json(self) -> JSONDict:
        """Return ``{"points", "pathStats"}``.

        Returns:
            JSONDict: Serializable solution set.

        """
        return {
            "points": [point.to_json() for point in self.points],
            "pathStats": {
                "tracked": self.path_stats.tracked,
                "converged": self.path_stats.converged,
                "failed": self.path_stats.failed,
                "crossings": self.path_stats.crossings,
                "diverged": self.path_stats.diverged,
            },
        }


def _classify(
    system: CriticalSystem,
    compiled: CompiledSystem,
    coordinates: CompiledSystem,
    endpoints: ComplexArray,
    statuses: np.ndarray,
    config: TrackerConfig,
) -> SolutionSet:
    count = endpoints.shape[0]
    with np.errstate(all="ignore"):
        norms = np.linalg.norm(endpoints, axis=1)
        finite = np.isfinite(endpoints).all(axis=1)
        at_infinity = ~finite | (statuses == PathStatus.DIVERGED) | (norms > config.infinity_norm)
        safe = np.where(at_infinity[:, None], 0, endpoints)
        residuals = compiled.relative_residual(safe)
        conditions = _conditions(compiled, safe)
        forward = _newton_steps(compiled, safe)
        p = coordinates.evaluate(safe)
        p_norm = np.linalg.norm(p, axis=1)
        p_min = np.min(np.abs(p), axis=1) if p.shape[1] else np.zeros(count)
        p_plus = np.abs(np.sum(p, axis=1))
        on_h = (p_min < config.boundary_tau * p_norm) | (p_plus < config.boundary_tau * p_norm) | (p_norm == 0)

    kinds: list[PointClass] = []
    for k in range(count):
        if at_infinity[k]:
            kinds.append(PointClass.AT_INFINITY)
        elif on_h[k]:
            kinds.append(PointClass.ON_H)
        elif (
            conditions[k] > config.singular_cond_threshold
            or residuals[k] > config.endpoint_tol
            or forward[k] > config.endpoint_tol
        ):
            kinds.append(PointClass.SINGULAR)
        elif _rank_drops(system, p[k]):
            kinds.append(PointClass.SINGULAR)
        else:
            kinds.append(PointClass.OFF_H_REGULAR)

    # greedy clustering: lowest residual first, at-infinity endpoints are never merged
    order = sorted(range(count), key=lambda k: (residuals[k] if np.isfinite(residuals[k]) else np.inf, k))
    representatives: list[int] = []
    members: dict[int, int] = {}
    for k in order:
        if kinds[k] is PointClass.AT_INFINITY:
            representatives.append(k)
            members[k] = 1
            continue
        radius = config.cluster_tol * (1 + norms[k])
        for rep in representatives:
            if kinds[rep] is not PointClass.AT_INFINITY and np.linalg.norm(endpoints[rep] - endpoints[k]) <= radius:
                members[rep] += 1
                break
        else:
            representatives.append(k)
            members[k] = 1

    def sort_key(k: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
        values = safe[k]
        return (
            tuple(round(float(z.real), SORT_DIGITS) for z in values),
            tuple(round(float(z.imag), SORT_DIGITS) for z in values),
        )

    representatives.sort(key=lambda k: (kinds[k] is PointClass.AT_INFINITY, sort_key(k)))
    points = tuple(
        SolutionPoint(
            values=tuple(complex(z) for z in endpoints[k]),
            coordinates=tuple(complex(z) for z in p[k]) if not at_infinity[k] else (),
            residual=float(residuals[k]) if not at_infinity[k] else math.inf,
            condition=float(conditions[k]) if not at_infinity[k] else math.inf,
            kind=kinds[k],
            cluster=index,
            multiplicity=members[k],
        )
        for index, k in enumerate(representatives)
    )
    crossings = sum(1 for point in points if point.kind is PointClass.OFF_H_REGULAR and point.multiplicity > 1)
    stats = PathStats.from_statuses(statuses, crossings)
    return SolutionSet(points, stats)


def _rank_drops(system: CriticalSystem, p: ComplexArray) -> bool:
    if system.singular_policy is not SingularPolicy.FILTER or not system.generators:
        return False
    return jacobian_rank(system.generators, [complex(z) for z in p]) < system.codim


def _track_all(homotopy: Homotopy, starts: ComplexArray, config: TrackerConfig) -> TrackResult:
    if config.threads <= 1 or starts.shape[0] < 2 * config.threads:  # noqa: PLR2004
        return track_paths(homotopy, starts, config)
    chunks = np.array_split(starts, config.threads)
    with ProcessPoolExecutor(max_workers=config.threads) as pool:
        results = list(pool.map(track_paths, [homotopy] * len(chunks), chunks, [config] * len(chunks)))
    return TrackResult(
        np.concatenate([r.endpoints for r in results]),
        np.concatenate([r.statuses for r in results]),
        np.concatenate([r.steps for r in results]),
    )


def _finish(
    system: CriticalSystem, compiled: CompiledSystem, tracked: TrackResult, config: TrackerConfig
) -> SolutionSet:
    endpoints = tracked.endpoints.copy()
    refinable = np.flatnonzero(
        (tracked.statuses != PathStatus.DIVERGED) & np.isfinite(endpoints).all(axis=1)
    )
    if refinable.size:
        endpoints[refinable], _ = _newton(compiled, endpoints[refinable], config.max_newton_iters)
    coordinates = CompiledSystem.from_polys(system.coordinates, scales=np.ones(len(system.coordinates)))
    return _classify(system, compiled, coordinates, endpoints, tracked.statuses, config)


def solve(system: CriticalSystem, config: TrackerConfig | None = None) -> SolutionSet:
    """Solve a critical system from scratch with a total-degree or multihomogeneous start.

    Returns:
        SolutionSet: Classified endpoints.

    Raises:
        PathOverflowError: If a total-degree start exceeds ``config.max_paths``.

    """  # noqa: DOC502 - raised by the start-system builder
    config = config or TrackerConfig()
    rng = config.rng()
    start = start_system(system, config.start_kind, rng, max_paths=config.max_paths)
    compiled = CompiledSystem.from_polys(system.equations)
    gamma = config.resolved_gamma()
    homotopy = Homotopy(compiled, start.system, gamma)
    LOGGER.info("%s: tracking %s paths (%s start)", system.provenance, start.path_count, start.kind.value)
    tracked = _track_all(homotopy, start.solutions, config)
    LOGGER.debug("%s: %s steps in total", system.provenance, int(np.sum(tracked.steps)))
    result = _finish(system, compiled, tracked, config)
    LOGGER.info(
        "%s: %s regular, %s on H, %s singular, %s at infinity, %s failed paths",
        system.provenance,
        result.count(PointClass.OFF_H_REGULAR),
        result.count(PointClass.ON_H),
        result.count(PointClass.SINGULAR),
        result.count(PointClass.AT_INFINITY),
        result.path_stats.failed,
    )
    return replace(result, start_kind=start.kind, gamma=gamma)


type SystemFamily = Callable[[DataVector], CriticalSystem]


def parameter_homotopy(
    family: SystemFamily,
    u0: DataVector,
    solutions0: SolutionSet,
    u1: DataVector,
    config: TrackerConfig | None = None,
) -> SolutionSet:
    """Move the regular solutions at data ``u0`` to data ``u1``.

    ``family`` must build systems of identical structure for every data vector (same chart
    and unknown layout); the two systems share row scales so the homotopy between them is
    a straight line in the data. A nonzero crossing count triggers a retry with a new gamma,
    up to :data:`GAMMA_ATTEMPTS` attempts in total.

    Returns:
        SolutionSet: Endpoints at ``u1``; ``solutions0`` itself when ``u1 == u0``.

    Raises:
        InputError: If the two systems differ in shape.

    """
    config = config or TrackerConfig()
    if u1.values == u0.values:
        return solutions0
    system0, system1 = family(u0), family(u1)
    if system0.nunknowns != system1.nunknowns:
        msg = "Parameter homotopy needs systems of identical shape"
        raise InputError(msg)
    scales = row_scales_of(system1.equations)
    target = CompiledSystem.from_polys(system1.equations, scales=scales)
    start = CompiledSystem.from_polys(system0.equations, scales=scales)
    starts = solutions0.regular_values()
    if starts.shape[0] == 0:
        return SolutionSet((), PathStats(0, 0, 0), gamma=None)

    def attempt(gamma: complex) -> SolutionSet:
        tracked = _track_all(Homotopy(target, start, gamma), starts, config)
        return replace(_finish(system1, target, tracked, config), gamma=gamma)

    result = attempt(config.resolved_gamma(0))
    for retry in range(1, GAMMA_ATTEMPTS):
        if result.path_stats.crossings == 0:
            break
        LOGGER.warning(
            "%s: %s path crossings with gamma=%s, retrying",
            system1.provenance,
            result.path_stats.crossings,
            result.gamma,
        )
        result = attempt(config.resolved_gamma(retry))
    return result
