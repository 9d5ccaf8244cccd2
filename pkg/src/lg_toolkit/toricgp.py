# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Toric models: maximum likelihood as a geometric program, ML degrees and degrees.

A toric model is fixed by an integer matrix ``A`` whose last row is all ones and a scaling
vector ``c``. With ``ã_i`` the columns of ``A`` minus the ones row, the model is the closure of
``x ↦ (c_0 x^{ã_0} : ... : c_n x^{ã_n})`` and ``f(x) = Σ c_i x^{ã_i}``.

For positive ``c`` and ``u`` the MLE minimizes ``|u| log f(e^y) - b·y`` with ``b = Ã u``, a
smooth convex function of ``y = log x``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, NamedTuple, Self

import numpy as np
import sympy
from scipy.spatial import ConvexHull
from scipy.special import logsumexp, softmax
from sympy.matrices.normalforms import smith_normal_form

from lg_toolkit.critsys import (
    DataVector,
    build_toric_system,
    coefficient_list,
    shifted_exponents,
    validate_toric_matrix,
)
from lg_toolkit.errors import ConvergenceError, InputError
from lg_toolkit.mldeg import DEFAULT_TRIALS, MLReport, ml_degree
from lg_toolkit.parsing import coerce_int_matrix, format_rational
from lg_toolkit.polyarith import BinaryForm

if TYPE_CHECKING:
    from collections.abc import Sequence

    from lg_toolkit.critsys import CriticalSystem
    from lg_toolkit.lg_types import Coefficient, FloatArray, IntMatrix, JSONDict, JSONValue
    from lg_toolkit.tracker import TrackerConfig

__all__ = [
    "BirchResult",
    "GPState",
    "ToricModel",
    "birch_mle",
    "normalized_volume",
    "toric_ml_bidegree",
    "toric_ml_degree",
]

LOGGER = logging.getLogger("lg_toolkit.toricgp")

DEFAULT_GP_TOL = 1e-10
MAX_NEWTON_ITERS = 200
MAX_HALVINGS = 60
ARMIJO = 1e-4
MAX_VOLUME_DIM = 3


def _coefficient_json(value: Coefficient) -> JSONValue:
    if isinstance(value, Fraction):
        return format_rational(value)
    return {"re": value.real, "im": value.imag}


@dataclass(frozen=True, slots=True)
class ToricModel:
    """Toric model ``X_c`` given by ``(A, c)``."""

    A: IntMatrix
    c: tuple[Coefficient, ...]

    def __post_init__(self) -> None:
        """Validate ``A`` and ``c``.

        Raises:
            InputError: If ``A`` is invalid or ``c`` has the wrong length or a zero entry.

        """
        validate_toric_matrix(self.A)
        if len(self.c) != len(self.A[0]) or any(ci == 0 for ci in self.c):
            msg = f"Toric model needs {len(self.A[0])} nonzero coefficients c, got {len(self.c)}"
            raise InputError(msg)

    @classmethod
    def of(cls, A: Sequence[Sequence[int]], c: Sequence[object] | None = None) -> Self:
        """Build a model from plain lists; ``c`` defaults to all ones.

        Returns:
            Self: New model.

        """
        matrix = coerce_int_matrix([list(row) for row in A])
        coeffs = coefficient_list(c) if c is not None else (Fraction(1),) * len(matrix[0])
        return cls(matrix, coeffs)

    @classmethod
    def from_json(cls, data: JSONValue) -> Self:
        """Decode ``{"A": [[...]], "c": [...]}``.

        Returns:
            Self: Decoded model.

        Raises:
            InputError: If ``A`` is missing.

        """
        if not isinstance(data, dict) or "A" not in data:
            msg = "Toric model JSON must be an object with an 'A' matrix"
            raise InputError(msg)
        c = data.get("c")
        if c is not None and not isinstance(c, list):
            msg = "Toric coefficients 'c' must be a list"
            raise InputError(msg)
        matrix = coerce_int_matrix(data["A"])
        return cls(matrix, coefficient_list(c) if c is not None else (Fraction(1),) * len(matrix[0]))

    @property
    def d(self) -> int:
        """Torus dimension."""
        return len(self.A) - 1

    @property
    def n(self) -> int:
        """Ambient projective dimension."""
        return len(self.A[0]) - 1

    @property
    def coordinate_count(self) -> int:
        """Number of coordinates ``n + 1``."""
        return len(self.A[0])

    @property
    def exponents(self) -> list[tuple[int, ...]]:
        """Shifted exponent vectors ``ã_i``."""
        return shifted_exponents(self.A)

    @property
    def is_positive(self) -> bool:
        """Whether every ``c_i`` is a positive rational."""
        return all(isinstance(ci, Fraction) and ci > 0 for ci in self.c)

    def critical_system(self, u: DataVector, rng: np.random.Generator) -> CriticalSystem:  # noqa: ARG002
        """Build the torus critical equations for data ``u``.

        Returns:
            CriticalSystem: ``d`` equations in ``x_1..x_d``.

        """
        return build_toric_system(self.A, self.c, u)

    def to_json(self) -> JSONDict:
        """Return ``{"A", "c"}``.

        Returns:
            JSONDict: Serializable model.

        """
        return {"A": [list(row) for row in self.A], "c": [_coefficient_json(ci) for ci in self.c]}


class GPState(NamedTuple):
    """One accepted Newton iterate of the geometric program."""

    y: tuple[float, ...]
    objective: float
    gradient_norm: float


class BirchResult(NamedTuple):
    """The MLE of a toric model and the Newton history that produced it."""

    p: FloatArray
    x: FloatArray
    history: tuple[GPState, ...]

    @property
    def iterations(self) -> int:
        """Number of accepted Newton steps."""
        return len(self.history) - 1

    def to_json(self) -> JSONDict:
        """Return ``{"p", "x", "iterations", "gradientNorm"}``.

        Returns:
            JSONDict: Serializable estimate.

        """
        return {
            "p": [float(v) for v in self.p],
            "x": [float(v) for v in self.x],
            "iterations": self.iterations,
            "gradientNorm": self.history[-1].gradient_norm,
        }


class _Objective:
    """``φ(y) = |u| log f(e^y) - b·y`` with its gradient and Hessian."""

    def __init__(self, exponents: FloatArray, log_c: FloatArray, total: float, b: FloatArray) -> None:
        self.exponents = exponents
        self.log_c = log_c
        self.total = total
        self.b = b

    def value(self, y: FloatArray) -> float:
        return float(self.total * logsumexp(self.log_c + self.exponents @ y) - self.b @ y)

    def probabilities(self, y: FloatArray) -> FloatArray:
        return softmax(self.log_c + self.exponents @ y)

    def derivatives(self, y: FloatArray) -> tuple[FloatArray, FloatArray]:
        p = self.probabilities(y)
        mean = self.exponents.T @ p
        gradient = self.total * mean - self.b
        hessian = self.total * ((self.exponents.T * p) @ self.exponents - np.outer(mean, mean))
        return gradient, hessian


def birch_mle(model: ToricModel, u: DataVector, tol: float = DEFAULT_GP_TOL) -> BirchResult:
    """Maximum likelihood estimate of a toric model with positive ``c``.

    Damped Newton with Armijo backtracking on the convex objective in ``y = log x``, started at
    ``y = 0``. Stops when ``‖∇φ‖ / |u| < tol``.

    Returns:
        BirchResult: ``p̂`` in the simplex with ``Ã p̂ = Ã u / |u|``.

    Raises:
        InputError: If ``c`` or ``u`` has a nonpositive entry or ``u`` has the wrong size.
        ConvergenceError: If the tolerance is not met within the iteration budget.

    """
    if not model.is_positive:
        msg = "Geometric programming needs positive rational c"
        raise InputError(msg)
    if u.size != model.coordinate_count or any(not isinstance(v, Fraction) or v <= 0 for v in u.values):
        msg = f"Toric MLE needs {model.coordinate_count} positive data entries"
        raise InputError(msg)
    exponents = np.array(model.exponents, dtype=np.float64).reshape(model.coordinate_count, model.d)
    counts = np.array([float(v) for v in u.values])
    objective = _Objective(
        exponents,
        np.log(np.array([float(ci) for ci in model.c if isinstance(ci, Fraction)])),
        float(counts.sum()),
        exponents.T @ counts,
    )
    y = np.zeros(model.d)
    value = objective.value(y)
    gradient, hessian = objective.derivatives(y)
    history = [GPState(tuple(y), value, float(np.linalg.norm(gradient)))]
    for _ in range(MAX_NEWTON_ITERS):
        if history[-1].gradient_norm < tol * objective.total:
            break
        direction = np.linalg.solve(hessian, -gradient)
        slope = float(gradient @ direction)
        step = 1.0
        for _ in range(MAX_HALVINGS):
            candidate = y + step * direction
            candidate_value = objective.value(candidate)
            if candidate_value <= value + ARMIJO * step * slope:
                break
            step /= 2
        else:
            LOGGER.warning("line search stalled at gradient norm %s", history[-1].gradient_norm)
            break
        if candidate_value > value:
            msg = f"Objective increased from {value} to {candidate_value}"
            raise ConvergenceError(msg)
        y, value = candidate, candidate_value
        gradient, hessian = objective.derivatives(y)
        history.append(GPState(tuple(y), value, float(np.linalg.norm(gradient))))
        LOGGER.debug(
            "newton step %s: objective %s, gradient norm %s", len(history) - 1, value, history[-1].gradient_norm
        )
    if history[-1].gradient_norm >= tol * objective.total:
        msg = (
            f"Geometric program did not converge: gradient norm {history[-1].gradient_norm} "
            f"after {len(history) - 1} steps"
        )
        raise ConvergenceError(msg)
    p = objective.probabilities(y)
    return BirchResult(p / p.sum(), np.exp(y), tuple(history))


def toric_ml_degree(model: ToricModel, config: TrackerConfig | None = None, trials: int = DEFAULT_TRIALS) -> MLReport:
    """Count critical points in the torus off ``f = 0`` for generic data.

    Returns:
        MLReport: Counts per trial.

    """
    return ml_degree(model, config, trials)


def _lattice_index(points: Sequence[Sequence[int]]) -> int:
    base = points[0]
    differences = sympy.Matrix([[point[k] - base[k] for point in points[1:]] for k in range(len(base))])
    normal = smith_normal_form(differences, domain=sympy.ZZ)
    return abs(math.prod(int(normal[k, k]) for k in range(len(base))))


def normalized_volume(A: IntMatrix) -> int:
    """Normalized volume of ``conv(ã_0..ã_n)`` in the lattice the columns generate.

    Equals ``d!`` times the Euclidean volume, divided by the index of the lattice spanned by
    ``ã_i - ã_0`` in ``Z^d``. This is the degree of ``X_c``.

    Returns:
        int: Degree of the toric variety.

    Raises:
        InputError: If ``A`` is invalid or ``d > 3``.

    """
    d = validate_toric_matrix(A)
    if d > MAX_VOLUME_DIM:
        msg = f"Normalized volume is supported for d <= {MAX_VOLUME_DIM}, got d = {d}"
        raise InputError(msg)
    if d == 0:
        return 1
    points = shifted_exponents(A)
    index = _lattice_index(points)
    if d == 1:
        raw = max(point[0] for point in points) - min(point[0] for point in points)
    else:
        hull = ConvexHull(np.array(points, dtype=np.float64))
        raw = round(hull.volume * math.factorial(d))
    volume, rest = divmod(raw, index)
    if rest:
        msg = f"Volume {raw} is not divisible by the lattice index {index}"
        raise InputError(msg)
    return volume


def toric_ml_bidegree(model: ToricModel, degree: int | None = None) -> BinaryForm:
    """ML bidegree ``deg(X_c) · Σ_{i<=d} p^{n-i} u^i`` of a toric model with generic ``c``.

    ``degree`` defaults to :func:`normalized_volume`; pass it explicitly when ``d > 3``.

    Returns:
        BinaryForm: The bidegree.

    """
    degree = normalized_volume(model.A) if degree is None else degree
    return BinaryForm.of([degree] * (model.d + 1) + [0] * (model.n - model.d))
