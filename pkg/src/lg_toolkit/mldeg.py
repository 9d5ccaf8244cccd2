# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""ML degrees, sectional ML degrees and ML bidegrees.

Numerical counts come from repeated seeded trials: each trial draws generic integer data
(and, for sections, generic hyperplanes), solves the critical system and counts regular
points off the arrangement ``H``. The reported value is the mode; any disagreement marks
the report unstable. Closed forms for generic complete intersections, generic polynomial
maps and plane curves live here as well.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import TYPE_CHECKING, NamedTuple

import numpy as np
import sympy

from lg_toolkit.critsys import CriticalModel, DataVector, RestrictableModel, VarietySpec
from lg_toolkit.errors import InputError, UnstableCountError
from lg_toolkit.polyarith import BinaryForm, SparsePoly, involution_b_from_s
from lg_toolkit.tracker import PointClass, TrackerConfig, solve

if TYPE_CHECKING:
    from lg_toolkit.critsys import CriticalSystem
    from lg_toolkit.lg_types import JSONDict

__all__ = [
    "BidegreeReport",
    "Confidence",
    "MLReport",
    "PlaneCurveReport",
    "SectionalReport",
    "SplitCheck",
    "generic_ci_ml_degree",
    "generic_hypersurface_sectional",
    "generic_map_ml_degree",
    "ml_bidegree",
    "ml_degree",
    "plane_curve_formula",
    "restriction_split_check",
    "sectional_ml_degree",
]

LOGGER = logging.getLogger("lg_toolkit.mldeg")

DEFAULT_TRIALS = 3


class Confidence(StrEnum):
    """Whether independent trials agreed."""

    STABLE = "stable"
    UNSTABLE = "unstable"


@dataclass(frozen=True, slots=True)
class MLReport:
    """Counts of regular critical points over independent trials."""

    ml_degree: int
    per_trial_counts: tuple[int, ...]
    path_failures: tuple[int, ...]
    seeds: tuple[int, ...]
    confidence: Confidence

    @classmethod
    def from_trials(cls, counts: Sequence[int], failures: Sequence[int], seeds: Sequence[int]) -> MLReport:
        """Summarize trial counts by their mode (ties go to the smallest count).

        Returns:
            MLReport: Report with confidence set from agreement.

        """
        tally = Counter(counts)
        best = max(tally.values())
        mode = min(count for count, seen in tally.items() if seen == best)
        confidence = Confidence.STABLE if len(tally) == 1 else Confidence.UNSTABLE
        return cls(mode, tuple(counts), tuple(failures), tuple(seeds), confidence)

    @property
    def stable(self) -> bool:
        """Whether every trial produced the same count."""
        return self.confidence is Confidence.STABLE

    def require_stable(self) -> int:
        """Return the ML degree, or raise if trials disagreed.

        Returns:
            int: Stable ML degree.

        Raises:
            UnstableCountError: If the trials disagree.

        """
        if not self.stable:
            msg = f"Unstable ML degree counts {list(self.per_trial_counts)} (seeds {list(self.seeds)})"
            raise UnstableCountError(msg)
        return self.ml_degree

    def to_json(self) -> JSONDict:
        """Return ``{"mlDegree", "perTrialCounts", "pathFailures", "confidence", "seeds"}``.

        Returns:
            JSONDict: Serializable report.

        """
        return {
            "mlDegree": self.ml_degree,
            "perTrialCounts": list(self.per_trial_counts),
            "pathFailures": list(self.path_failures),
            "confidence": self.confidence.value,
            "seeds": list(self.seeds),
        }


def _trial_seed(config: TrackerConfig, *tags: int) -> int:
    return int(np.random.SeedSequence((config.seed, *tags)).generate_state(1)[0])


type SystemFactory = Callable[[np.random.Generator], CriticalSystem]


def _count(factory: SystemFactory, seed: int, config: TrackerConfig) -> tuple[int, int]:
    system = factory(np.random.default_rng(seed))
    result = solve(system, config.with_seed(seed))
    return result.count(PointClass.OFF_H_REGULAR), result.path_stats.failed


def _run_trials(factory: SystemFactory, config: TrackerConfig, trials: int, *tags: int) -> MLReport:
    if trials < 1:
        msg = f"Need at least one trial, got {trials}"
        raise InputError(msg)
    counts: list[int] = []
    failures: list[int] = []
    seeds: list[int] = []
    for trial in range(trials):
        seed = _trial_seed(config, *tags, trial)
        count, failed = _count(factory, seed, config)
        counts.append(count)
        failures.append(failed)
        seeds.append(seed)
        LOGGER.debug("trial %s (seed %s): %s regular points, %s failed paths", trial, seed, count, failed)
    report = MLReport.from_trials(counts, failures, seeds)
    if not report.stable:
        LOGGER.warning("unstable counts across trials: %s", counts)
    return report


def ml_degree(model: CriticalModel, config: TrackerConfig | None = None, trials: int = DEFAULT_TRIALS) -> MLReport:
    """Count regular critical points for fresh generic integer data in each trial.

    Returns:
        MLReport: Mode of the per-trial counts with the seeds used.

    """
    config = config or TrackerConfig()

    def factory(rng: np.random.Generator) -> CriticalSystem:
        u = DataVector.generic(model.coordinate_count, rng)
        return model.critical_system(u, rng)

    return _run_trials(factory, config, trials, 1)


# -- sections and bidegrees ----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class SectionalReport:
    """Sectional ML degree with one :class:`MLReport` per slice count."""

    form: BinaryForm
    slices: tuple[MLReport, ...]

    @property
    def stable(self) -> bool:
        """Whether every slice count was stable."""
        return all(report.stable for report in self.slices)

    def to_json(self) -> JSONDict:
        """Return ``{"form", "slices", "confidence"}``.

        Returns:
            JSONDict: Serializable report.

        """
        return {
            "form": self.form.to_json(),
            "slices": [report.to_json() for report in self.slices],
            "confidence": (Confidence.STABLE if self.stable else Confidence.UNSTABLE).value,
        }


def sectional_ml_degree(
    spec: VarietySpec, config: TrackerConfig | None = None, trials: int = DEFAULT_TRIALS
) -> SectionalReport:
    """Compute ``s_i = MLdegree(X ∩ L)`` for generic linear spaces ``L`` of codimension ``i``.

    Each ``s_i`` is the mode over ``trials`` independent slice and data draws. The form is
    ``(s_0 p^d + s_1 p^(d-1) u + ... + s_d u^d) p^(n-d)``.

    Returns:
        SectionalReport: Form and per-slice reports.

    """
    config = config or TrackerConfig()
    reports: list[MLReport] = []
    for i in range(spec.dimension + 1):

        def factory(rng: np.random.Generator, count: int = i) -> CriticalSystem:
            sliced = spec.with_hyperplanes(count, rng)
            u = DataVector.generic(sliced.coordinate_count, rng)
            return sliced.critical_system(u, rng)

        report = _run_trials(factory, config, trials, 2, i)
        LOGGER.info("s_%s = %s (%s)", i, report.ml_degree, report.confidence.value)
        reports.append(report)
    coeffs = [report.ml_degree for report in reports] + [0] * (spec.n - spec.dimension)
    return SectionalReport(BinaryForm.of(coeffs), tuple(reports))


@dataclass(frozen=True, slots=True)
class BidegreeReport:
    """ML bidegree derived from the sectional ML degree through the involution.

    ``conjectural`` is true unless a theorem-backed cross-check (linear spaces, via their
    matroid) confirmed the form.
    """

    form: BinaryForm
    sectional: SectionalReport
    conjectural: bool = True
    cross_check: BinaryForm | None = None
    metadata: dict[str, object] = field(default_factory=dict, compare=False)

    @property
    def stable(self) -> bool:
        """Whether the underlying sectional counts were stable."""
        return self.sectional.stable

    @property
    def holds(self) -> bool | None:
        """Agreement with the cross-check, ``None`` when there is none."""
        return None if self.cross_check is None else self.cross_check == self.form

    def to_json(self) -> JSONDict:
        """Return ``{"form", "sectional", "conjectural", "crossCheck", "holds"}``.

        Returns:
            JSONDict: Serializable report.

        """
        return {
            "form": self.form.to_json(),
            "sectional": self.sectional.to_json(),
            "conjectural": self.conjectural,
            "crossCheck": None if self.cross_check is None else self.cross_check.to_json(),
            "holds": self.holds,
        }


def ml_bidegree(
    spec: VarietySpec, config: TrackerConfig | None = None, trials: int = DEFAULT_TRIALS
) -> BidegreeReport:
    """Compute the ML bidegree as the involution of the sectional ML degree.

    For linear spaces the matroid formula gives an independent, proven value.

    Returns:
        BidegreeReport: Bidegree with provenance.

    Raises:
        InputError: If the sectional form is not in the image of the involution.

    """
    sectional = sectional_ml_degree(spec, config, trials)
    try:
        form = involution_b_from_s(sectional.form)
    except ValueError as exc:
        msg = f"Sectional ML degree {sectional.form} does not invert: {exc}"
        raise InputError(msg) from exc
    if spec.is_linear:
        from lg_toolkit.linmatroid import LinearModel, linear_ml_bidegree  # noqa: PLC0415 - avoids an import cycle

        check = linear_ml_bidegree(LinearModel.from_variety(spec))
        return BidegreeReport(form, sectional, conjectural=check != form, cross_check=check)
    return BidegreeReport(form, sectional)


# -- closed forms ------------------------------------------------------------------------------


def generic_ci_ml_degree(n: int, degrees: Sequence[int]) -> int:
    """ML degree ``D · d_1 ⋯ d_r`` of a generic complete intersection in ``P^n``.

    ``D`` is the sum of ``d_1^{i_1} ⋯ d_r^{i_r}`` over all ``i_1 + ... + i_r <= n - r``.

    Returns:
        int: Exact ML degree.

    Raises:
        InputError: If ``r`` is not in ``[1, n]`` or a degree is not positive.

    """
    r = len(degrees)
    if not 1 <= r <= n or any(d < 1 for d in degrees):
        msg = f"Need 1 <= r <= n and positive degrees, got n={n}, degrees={list(degrees)}"
        raise InputError(msg)
    total = 0
    for size in range(n - r + 1):
        for combo in combinations_with_replacement(degrees, size):
            total += math.prod(combo)
    return total * math.prod(degrees)


def generic_map_ml_degree(d: int, degrees: Sequence[int]) -> int:
    """Coefficient of ``z^d`` in ``(1 - z)^d / prod_i (1 - b_i z)``.

    This is the ML degree of the image of a generic polynomial map in ``d`` parameters
    with coordinate degrees ``b_i`` normalized to sum to one.

    Returns:
        int: Exact ML degree.

    Raises:
        InputError: For a negative dimension or non-positive degrees.

    """
    if d < 0 or any(b < 1 for b in degrees):
        msg = f"Need d >= 0 and positive degrees, got d={d}, degrees={list(degrees)}"
        raise InputError(msg)
    z = sympy.symbols("z")
    series = (1 - z) ** d
    for b in degrees:
        series *= sympy.series(1 / (1 - b * z), z, 0, d + 1).removeO()
    return int(sympy.Poly(sympy.expand(series), z).coeff_monomial(z**d))


def generic_hypersurface_sectional(n: int, d: int) -> BinaryForm:
    """Sectional ML degree of a generic degree-``d`` hypersurface in ``P^n``.

    ``s_i`` is the ML degree of the generic complete intersection of degrees ``(d, 1, ..., 1)``
    with ``i`` linear forms.

    Returns:
        BinaryForm: Sectional form of degree ``n``.

    """
    coeffs = [generic_ci_ml_degree(n, (d,) + (1,) * i) for i in range(n)]
    return BinaryForm.of([*coeffs, 0])


# -- plane curves ------------------------------------------------------------------------


class PlaneCurveReport(NamedTuple):
    """``MLdegree = d^2 - 3d + a`` for a smooth plane curve meeting ``H`` in ``a`` points."""

    d: int
    a: int
    formula_ml_degree: int

    def to_json(self) -> JSONDict:
        """Return ``{"d", "a", "formulaMLdeg"}``.

        Returns:
            JSONDict: Serializable report.

        """
        return {"d": self.d, "a": self.a, "formulaMLdeg": self.formula_ml_degree}


_S, _T = sympy.symbols("s t")
# parametrizations (as coordinates in s, t) of the lines p0 = 0, p1 = 0, p2 = 0, p+ = 0
_LINES: tuple[tuple[tuple[int, int], tuple[int, int], tuple[int, int]], ...] = (
    ((0, 0), (1, 0), (0, 1)),
    ((1, 0), (0, 0), (0, 1)),
    ((1, 0), (0, 1), (0, 0)),
    ((1, 0), (0, 1), (-1, -1)),
)
_CORNERS: tuple[tuple[int, int, int], ...] = ((0, 0, 1), (0, 1, 0), (1, 0, 0), (0, 1, -1), (1, 0, -1), (1, -1, 0))


def _to_sympy(poly: SparsePoly, symbols: Sequence[sympy.Symbol]) -> sympy.Expr:
    expr = sympy.Integer(0)
    for exponent, coeff in poly.terms.items():
        if not isinstance(coeff, Fraction):
            msg = "Exact (rational) coefficients are required"
            raise InputError(msg)
        term = sympy.Rational(coeff.numerator, coeff.denominator)
        for symbol, power in zip(symbols, exponent, strict=True):
            term *= symbol**power
        expr += term
    return expr


def _distinct_projective_roots(form: sympy.Expr, degree: int) -> int:
    affine = sympy.Poly(form.subs(_T, 1), _S)
    if affine.is_zero:
        return 0
    distinct = sympy.Poly(sympy.sqf_part(affine.as_expr()), _S).degree() if affine.degree() > 0 else 0
    return distinct + (1 if affine.degree() < degree else 0)


def plane_curve_formula(f: SparsePoly) -> PlaneCurveReport:
    """Count ``a = #(X ∩ H)`` exactly and return ``d^2 - 3d + a``.

    Each of the four lines of ``H`` is parametrized, the distinct roots of the restricted
    binary form are counted via its squarefree part, and the six pairwise intersection
    points of the lines are subtracted once when they lie on ``X``.

    Returns:
        PlaneCurveReport: Degree, boundary point count and formula value.

    Raises:
        InputError: If ``f`` is not a homogeneous ternary form or vanishes on a line of ``H``.

    """
    if f.nvars != 3 or not f.is_homogeneous() or f.degree == 0:  # noqa: PLR2004
        msg = "Plane curve formula needs a non-constant homogeneous ternary form"
        raise InputError(msg)
    d = f.degree
    symbols = sympy.symbols("p0 p1 p2")
    expr = _to_sympy(f, symbols)
    total = 0
    for index, line in enumerate(_LINES):
        substitution = {sym: a * _S + b * _T for sym, (a, b) in zip(symbols, line, strict=True)}
        restricted = sympy.expand(expr.subs(substitution, simultaneous=True))
        if restricted == 0:
            msg = f"Curve contains line {index} of the arrangement H"
            raise InputError(msg)
        total += _distinct_projective_roots(restricted, d)
    corners = sum(1 for corner in _CORNERS if f.evaluate(corner) == 0)
    a = total - corners
    return PlaneCurveReport(d, a, d * d - 3 * d + a)


# -- restriction / deletion -----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class SplitCheck:
    """``MLdegree(X) = MLdegree(X ∩ {p_k = 0}) + MLdegree(X | u_k = 0)``."""

    coord: int
    total: MLReport
    sliced: MLReport
    data_zero: MLReport

    @property
    def holds(self) -> bool:
        """Whether the identity held for the reported counts."""
        return self.total.ml_degree == self.sliced.ml_degree + self.data_zero.ml_degree

    @property
    def stable(self) -> bool:
        """Whether all three counts were stable."""
        return self.total.stable and self.sliced.stable and self.data_zero.stable

    def to_json(self) -> JSONDict:
        """Return ``{"coord", "mlTotal", "mlSlice", "mlDataZero", "holds", "reports"}``.

        Returns:
            JSONDict: Serializable check.

        """
        return {
            "coord": self.coord,
            "mlTotal": self.total.ml_degree,
            "mlSlice": self.sliced.ml_degree,
            "mlDataZero": self.data_zero.ml_degree,
            "holds": self.holds,
            "confidence": (Confidence.STABLE if self.stable else Confidence.UNSTABLE).value,
            "reports": {
                "total": self.total.to_json(),
                "slice": self.sliced.to_json(),
                "dataZero": self.data_zero.to_json(),
            },
        }


def restriction_split_check(
    model: RestrictableModel,
    config: TrackerConfig | None = None,
    coord: int | None = None,
    trials: int = DEFAULT_TRIALS,
) -> SplitCheck:
    """Compare the ML degree with the slice and data-zero counts at coordinate ``coord``.

    The data-zero count uses generic data with ``u_coord`` exactly zero; endpoints that
    limit onto ``p_coord = 0`` are classified on ``H`` and excluded.

    Returns:
        SplitCheck: The three reports and the ``holds`` flag.

    Raises:
        InputError: If ``coord`` is out of range.

    """
    config = config or TrackerConfig()
    size = model.coordinate_count
    coord = size - 1 if coord is None else coord
    if not 0 <= coord < size:
        msg = f"Coordinate {coord} out of range for {size} coordinates"
        raise InputError(msg)
    total = ml_degree(model, config, trials)
    restricted = model.restricted(coord)

    def slice_factory(rng: np.random.Generator) -> CriticalSystem:
        u = DataVector.generic(restricted.coordinate_count, rng)
        return restricted.critical_system(u, rng)

    def zero_factory(rng: np.random.Generator) -> CriticalSystem:
        u = DataVector.generic(size, rng).with_zero(coord)
        return model.critical_system(u, rng)

    sliced = _run_trials(slice_factory, config, trials, 3, coord)
    data_zero = _run_trials(zero_factory, config, trials, 4, coord)
    check = SplitCheck(coord, total, sliced, data_zero)
    LOGGER.info(
        "split check at p%s: %s = %s + %s (%s)",
        coord,
        total.ml_degree,
        sliced.ml_degree,
        data_zero.ml_degree,
        "holds" if check.holds else "fails",
    )
    return check
