# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Models of ML degree one through their Horn uniformization.

Such a model is given by an integer matrix ``B`` (rows ``j``, columns ``k``) and rational
``c``. With the linear forms ``x_j = Σ_i b_ji u_i`` the MLE is

    p̂_k = c_k · Π_j x_j^{b_jk}

and ``Σ_k p̂_k = 1``. The pair ``(B, c)`` can be read off a scaled discriminant
``1 - Σ_k c_k x^{b_k}``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Self

import numpy as np

from lg_toolkit.critsys import DataVector, VarietySpec
from lg_toolkit.errors import InputError, ResonanceError
from lg_toolkit.parsing import coerce_int_matrix, coerce_rational_list, format_rational
from lg_toolkit.polyarith import SparsePoly, parse_poly
from lg_toolkit.tracker import TrackerConfig, solve

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from lg_toolkit.lg_types import IntMatrix, JSONDict, JSONValue

__all__ = [
    "HORN_MODELS",
    "HornModel",
    "HornVerification",
    "chain222_model",
    "disc_cubic_model",
    "hardy_weinberg_model",
    "horn_mle",
    "horn_model",
    "indep22_model",
    "parse_scaled_discriminant",
    "verify_ml_degree_one",
]

LOGGER = logging.getLogger("lg_toolkit.horn")

MATCH_TOL = 1e-6
DEFAULT_VERIFY_TRIALS = 3


@dataclass(frozen=True, slots=True)
class HornModel:
    """Horn pair ``(B, c)`` with an optional implicit description of the model."""

    B: IntMatrix
    c: tuple[Fraction, ...]
    implicit: VarietySpec | None = None
    name: str = field(default="horn", compare=False)

    def __post_init__(self) -> None:
        """Validate shapes.

        Raises:
            InputError: If ``B`` is ragged, empty, or does not match ``c`` and the implicit spec.

        """
        if not self.B or len({len(row) for row in self.B}) != 1 or not self.B[0]:
            msg = "Horn matrix B must be rectangular and non-empty"
            raise InputError(msg)
        if len(self.c) != len(self.B[0]):
            msg = f"Horn model needs one coefficient per column of B ({len(self.B[0])}), got {len(self.c)}"
            raise InputError(msg)
        if self.implicit is not None and self.implicit.coordinate_count != len(self.c):
            msg = f"Implicit spec lives in P^{self.implicit.n}, Horn model in P^{len(self.c) - 1}"
            raise InputError(msg)

    @classmethod
    def from_json(cls, data: JSONValue) -> Self:
        """Decode ``{"B", "c", "implicit"?, "name"?}``.

        Returns:
            Self: Decoded model.

        Raises:
            InputError: If the payload is malformed.

        """
        if not isinstance(data, dict) or "B" not in data or "c" not in data:
            msg = "Horn model JSON must be an object with 'B' and 'c'"
            raise InputError(msg)
        implicit = data.get("implicit")
        try:
            B = coerce_int_matrix(data["B"])
            c = coerce_rational_list(data["c"])
        except ValueError as exc:
            msg = f"Invalid Horn model: {exc}"
            raise InputError(msg) from exc
        spec = VarietySpec.from_json(implicit) if implicit is not None else None
        return cls(B, c, spec, str(data.get("name", "horn")))

    @property
    def coordinate_count(self) -> int:
        """Number of coordinates ``n + 1``."""
        return len(self.c)

    def linear_forms(self, u: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Evaluate ``x_j = Σ_i b_ji u_i`` for every row of ``B``.

        Returns:
            tuple[Fraction, ...]: One value per row.

        """
        return tuple(sum((b * ui for b, ui in zip(row, u, strict=True)), Fraction(0)) for row in self.B)

    def to_json(self) -> JSONDict:
        """Return the JSON form read by :meth:`from_json`.

        Returns:
            JSONDict: Serializable model.

        """
        data: JSONDict = {
            "name": self.name,
            "B": [list(row) for row in self.B],
            "c": [format_rational(ci) for ci in self.c],
        }
        if self.implicit is not None:
            data["implicit"] = self.implicit.to_json()
        return data


def _exact_data(u: DataVector, size: int) -> tuple[Fraction, ...]:
    if u.size != size:
        msg = f"Horn model expects {size} data entries, got {u.size}"
        raise InputError(msg)
    values: list[Fraction] = []
    for value in u.values:
        if not isinstance(value, Fraction):
            msg = "Horn evaluation needs rational data"
            raise InputError(msg)
        values.append(value)
    return tuple(values)


def horn_mle(model: HornModel, u: DataVector) -> tuple[Fraction, ...]:
    """Evaluate ``p̂_k = c_k Π_j x_j^{b_jk}`` exactly.

    Returns:
        tuple[Fraction, ...]: The MLE, summing to one.

    Raises:
        ResonanceError: If a linear form ``x_j`` vanishes at ``u``.

    """
    forms = model.linear_forms(_exact_data(u, model.coordinate_count))
    for j, value in enumerate(forms):
        if value == 0:
            msg = f"Linear form {j} vanishes at u = {u.to_json()}; u lies on an exceptional locus"
            raise ResonanceError(msg, index=j)
    return tuple(
        ck * math.prod((forms[j] ** model.B[j][k] for j in range(len(forms))), start=Fraction(1))
        for k, ck in enumerate(model.c)
    )


def parse_scaled_discriminant(
    polynomial: SparsePoly, pivot: SparsePoly | None = None, *, name: str = "horn"
) -> HornModel:
    """Read ``(B, c)`` from ``polynomial / pivot = 1 - Σ_k c_k x^{b_k}``.

    ``pivot`` is a monomial (coefficient included) and defaults to ``1``. Columns of ``B`` are the
    exponent differences against the pivot, in the order of the polynomial's sorted terms.

    Returns:
        HornModel: Extracted model.

    Raises:
        InputError: If the pivot is not a monomial or the quotient's constant term is not one.

    """
    nvars = polynomial.nvars
    pivot = pivot if pivot is not None else SparsePoly.constant(nvars, 1)
    if len(pivot.terms) != 1 or pivot.nvars != nvars:
        msg = f"Pivot must be a single monomial in {nvars} variables, got {pivot}"
        raise InputError(msg)
    ((pivot_exponent, pivot_coeff),) = pivot.terms.items()
    constant = polynomial.coefficient(pivot_exponent) / pivot_coeff
    if constant != 1:
        msg = f"Scaled discriminant must have constant term 1 after division, got {constant}"
        raise InputError(msg)
    columns: list[tuple[int, ...]] = []
    coeffs: list[Fraction] = []
    for exponent, coeff in polynomial.sorted_terms():
        if exponent == pivot_exponent:
            continue
        scaled = -coeff / pivot_coeff
        if not isinstance(scaled, Fraction):
            msg = "Scaled discriminant must have rational coefficients"
            raise InputError(msg)
        columns.append(tuple(e - q for e, q in zip(exponent, pivot_exponent, strict=True)))
        coeffs.append(scaled)
    if not columns:
        msg = "Scaled discriminant has no terms besides the pivot"
        raise InputError(msg)
    B = tuple(tuple(column[j] for column in columns) for j in range(nvars))
    return HornModel(B, tuple(coeffs), name=name)


@dataclass(frozen=True, slots=True)
class HornVerification:
    """Outcome of :func:`verify_ml_degree_one`; truthy iff every check held."""

    holds: bool
    trials: int
    witness: tuple[Fraction, ...] | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        """Return :attr:`holds`."""
        return self.holds

    def to_json(self) -> JSONDict:
        """Return ``{"holds", "trials", "witness", "reason"}``.

        Returns:
            JSONDict: Serializable outcome.

        """
        return {
            "holds": self.holds,
            "trials": self.trials,
            "witness": [format_rational(v) for v in self.witness] if self.witness is not None else None,
            "reason": self.reason,
        }


def _check_once(model: HornModel, u: DataVector, config: TrackerConfig | None) -> str:
    try:
        p_hat = horn_mle(model, u)
    except ResonanceError as exc:
        return str(exc)
    if sum(p_hat, Fraction(0)) != 1:
        return f"estimate sums to {sum(p_hat, Fraction(0))}"
    try:
        fixed = horn_mle(model, DataVector(p_hat))
    except ResonanceError as exc:
        return f"estimate lies on an exceptional locus: {exc}"
    if fixed != p_hat:
        return "estimate is not a fixed point of the estimator"
    if model.implicit is None:
        return ""
    for index, generator in enumerate(model.implicit.generators):
        if generator.evaluate(p_hat) != 0:
            return f"estimate is off generator {index}"
    if config is None:
        return ""
    result = solve(model.implicit.critical_system(u, config.rng()), config)
    regular = result.of_kind()
    if len(regular) != 1:
        return f"tracker found {len(regular)} regular critical points, expected 1"
    p = np.array(regular[0].coordinates, dtype=np.complex128)
    p /= p.sum()
    if np.max(np.abs(p - np.array([float(v) for v in p_hat]))) > MATCH_TOL:
        return "tracker critical point differs from the estimate"
    return ""


def verify_ml_degree_one(
    model: HornModel,
    trials: int = DEFAULT_VERIFY_TRIALS,
    config: TrackerConfig | None = None,
    *,
    track: bool = True,
) -> HornVerification:
    """Check the Horn estimator on random positive data.

    Each trial checks that the estimate sums to one exactly, is its own estimate, and lies on the
    implicit generators exactly. With ``track`` it must also be the unique regular critical point
    found by the tracker.

    Returns:
        HornVerification: Outcome with the first failing data vector as witness.

    Raises:
        InputError: If ``trials`` is not positive.

    """
    if trials < 1:
        msg = f"Need at least one trial, got {trials}"
        raise InputError(msg)
    config = config or TrackerConfig()
    rng = config.rng()
    for trial in range(trials):
        u = DataVector.generic(model.coordinate_count, rng)
        reason = _check_once(model, u, config.with_seed(config.seed + trial) if track else None)
        if reason:
            LOGGER.warning("%s: check failed at u=%s: %s", model.name, u.to_json(), reason)
            witness = _exact_data(u, model.coordinate_count)
            return HornVerification(holds=False, trials=trial + 1, witness=witness, reason=reason)
    return HornVerification(holds=True, trials=trials)


# -- catalog ---------------------------------------------------------------------


def hardy_weinberg_model() -> HornModel:
    """Hardy–Weinberg curve ``4 p0 p2 = p1^2``."""
    return HornModel(
        ((2, 1, 0), (0, 1, 2), (-2, -2, -2)),
        coerce_rational_list([1, 2, 1]),
        VarietySpec.hypersurface(parse_poly("4*p0*p2 - p1^2")),
        name="hardy-weinberg",
    )


def indep22_model() -> HornModel:
    """Independence of two binary variables, coordinates ``p00, p01, p10, p11``."""
    return HornModel(
        ((1, 1, 0, 0), (0, 0, 1, 1), (1, 0, 1, 0), (0, 1, 0, 1), (-2, -2, -2, -2)),
        coerce_rational_list([4, 4, 4, 4]),
        VarietySpec.hypersurface(parse_poly("p0*p3 - p1*p2")),
        name="indep22",
    )


def chain222_model() -> HornModel:
    """Conditional independence of the outer variables of a binary chain ``i - j - l``.

    Coordinate ``4i + 2j + l`` holds ``p_ijl``.
    """
    cells = [(i, j, k) for i in range(2) for j in range(2) for k in range(2)]
    rows: list[tuple[int, ...]] = []
    rows.extend(tuple(int((i, j) == (a, b)) for i, j, _ in cells) for a in range(2) for b in range(2))
    rows.extend(tuple(int((j, k) == (a, b)) for _, j, k in cells) for a in range(2) for b in range(2))
    rows.extend(tuple(-int(j == b) for _, j, _ in cells) for b in range(2))
    rows.append((-1,) * len(cells))
    generators = tuple(
        parse_poly(f"p{2 * j}*p{4 + 2 * j + 1} - p{2 * j + 1}*p{4 + 2 * j}", nvars=8) for j in range(2)
    )
    return HornModel(
        tuple(rows),
        coerce_rational_list([1] * len(cells)),
        VarietySpec(7, generators, 2),
        name="chain222",
    )


def disc_cubic_model() -> HornModel:
    """Curve from the discriminant of a binary cubic, cut out by two quadrics."""
    return HornModel(
        ((-1, -2, -1, -2), (1, 3, 0, 2), (1, 0, 3, 2), (-1, -1, -2, -2)),
        coerce_rational_list(["2/3", "-4/27", "-4/27", "1/27"]),
        VarietySpec(
            3,
            (parse_poly("9*p1*p2 - 8*p0*p3"), parse_poly("p0^2 - 12*(p0 + p1 + p2 + p3)*p3")),
            2,
        ),
        name="disc-cubic",
    )


HORN_MODELS: dict[str, Callable[[], HornModel]] = {
    "hardy-weinberg": hardy_weinberg_model,
    "indep22": indep22_model,
    "chain222": chain222_model,
    "disc-cubic": disc_cubic_model,
}


def horn_model(name: str) -> HornModel:
    """Return a catalog Horn model by name.

    Returns:
        HornModel: Fresh model.

    Raises:
        InputError: If the name is unknown.

    """
    try:
        factory = HORN_MODELS[name]
    except KeyError as exc:
        msg = f"Unknown Horn model {name!r}; choose from {', '.join(HORN_MODELS)}"
        raise InputError(msg) from exc
    return factory()
