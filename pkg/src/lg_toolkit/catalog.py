# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Named models with their known ML degrees, bidegrees and sectional ML degrees.

Every expected value carries a :class:`Provenance`: ``paper`` values are quoted from published papers,
``derived`` values follow from a closed formula evaluated by hand.
"""

from __future__ import annotations

import itertools
import logging
from enum import StrEnum
from fractions import Fraction
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from lg_toolkit.critsys import ParametricSpec, RankSpec, SymmetricRankSpec, VarietySpec
from lg_toolkit.errors import InputError
from lg_toolkit.linmatroid import LinearModel
from lg_toolkit.polyarith import BinaryForm, SparsePoly, parse_poly
from lg_toolkit.toricgp import ToricModel

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from lg_toolkit.lg_types import JSONDict

__all__ = [
    "CATALOG",
    "CUBIC_SURFACE_A",
    "KNOWN_BIDEGREE_PAIRS",
    "TORIC_FOURFOLD_A",
    "CatalogEntry",
    "CatalogModel",
    "Provenance",
    "catalog_entry",
    "catalog_names",
    "load_model",
    "random_form",
]

LOGGER = logging.getLogger("lg_toolkit.catalog")

type CatalogModel = VarietySpec | RankSpec | SymmetricRankSpec | ParametricSpec | ToricModel | LinearModel

# fixed seeds keep the "random" catalog members reproducible
_CURVE_SEED = 20_130_101
_PARAMETRIC_SEED = 1_304_007

CUBIC_SURFACE_A = ((0, 3, 0, 1), (0, 0, 3, 1), (1, 1, 1, 1))

# columns p11, p22, p33, p12, p13, p23; the kernel is (1, 1, 1, -1, -1, -1)
TORIC_FOURFOLD_A = (
    (1, 0, 0, 1, 0, 0),
    (0, 1, 0, 0, 1, 0),
    (1, 0, 0, 0, 1, 0),
    (0, 1, 0, 0, 0, 1),
    (1, 1, 1, 1, 1, 1),
)


class Provenance(StrEnum):
    """Where an expected value comes from."""

    PAPER = "paper"
    DERIVED = "derived"


class CatalogEntry(NamedTuple):
    """A named model with the values it is expected to reproduce."""

    name: str
    description: str
    build: Callable[[], CatalogModel]
    ml_degree: int | None
    provenance: Provenance
    bidegree: BinaryForm | None = None
    sectional: BinaryForm | None = None

    def to_json(self) -> JSONDict:
        """Return ``{"name", "description", "mlDegree", "bidegree", "sectional", "provenance"}``.

        Returns:
            JSONDict: Serializable entry.

        """
        return {
            "name": self.name,
            "description": self.description,
            "mlDegree": self.ml_degree,
            "bidegree": None if self.bidegree is None else self.bidegree.to_json(),
            "sectional": None if self.sectional is None else self.sectional.to_json(),
            "provenance": self.provenance.value,
        }


def _det3(rows: Sequence[Sequence[SparsePoly]]) -> SparsePoly:
    (a, b, c), (d, e, f), (g, h, i) = rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _matrix_det(text: Sequence[Sequence[str]], nvars: int) -> SparsePoly:
    return _det3([[parse_poly(entry, nvars=nvars) for entry in row] for row in text])


def random_form(nvars: int, degree: int, rng: np.random.Generator, *, affine: bool = False) -> SparsePoly:
    """Dense form with nonzero integer coefficients in ``[-20, 20]``.

    With ``affine`` all monomials of degree at most ``degree`` are used.
    """
    degrees = range(degree + 1) if affine else (degree,)
    terms: dict[tuple[int, ...], int] = {}
    for total in degrees:
        for combo in itertools.combinations_with_replacement(range(nvars), total):
            exponent = tuple(combo.count(k) for k in range(nvars))
            value = 0
            while value == 0:
                value = int(rng.integers(-20, 21))
            terms[exponent] = value
    return SparsePoly(nvars, terms)


def _plane_curve(degree: int) -> VarietySpec:
    rng = np.random.default_rng(_CURVE_SEED + degree)
    return VarietySpec.hypersurface(random_form(3, degree, rng))


def _singular_cubic(tangent_cone: str) -> VarietySpec:
    # singular point (1:1:1) with local coordinates x = p0 - p2, y = p1 - p2
    x, y = "(p0 - p2)", "(p1 - p2)"
    cone = tangent_cone.replace("x", x).replace("y", y)
    cubic = f"7*{x}^3 - 4*{x}^2*{y} + 6*{x}*{y}^2 + 5*{y}^3"
    return VarietySpec.hypersurface(parse_poly(f"({cone})*(2*p0 + 3*p1 + 5*p2) + {cubic}"))


def _twisted_cubic() -> ParametricSpec:
    rng = np.random.default_rng(_PARAMETRIC_SEED)
    image = rng.integers(-9, 10, size=(4, 4))
    while round(abs(np.linalg.det(image))) == 0:
        image = rng.integers(-9, 10, size=(4, 4))
    polys = tuple(SparsePoly(1, {(k,): int(image[i, k]) for k in range(4) if image[i, k]}) for i in range(4))
    return ParametricSpec(polys, name="twisted-cubic")


def _steiner_quartic() -> ParametricSpec:
    rng = np.random.default_rng(_PARAMETRIC_SEED + 1)
    quadrics = [random_form(2, 2, rng, affine=True) for _ in range(3)]
    first = SparsePoly.constant(2, 1) - sum(quadrics, SparsePoly.zero(2))
    return ParametricSpec((first, *quadrics), name="steiner-quartic")


def _linear_two_plane() -> LinearModel:
    # columns (1, t, t^2): any three of them and their sum are independent
    points = (1, 2, 3, 5, 8)
    return LinearModel(tuple(tuple(Fraction(t**k) for t in points) for k in range(3)))


def _generic_quadric_surface() -> VarietySpec:
    return VarietySpec.hypersurface(random_form(4, 2, np.random.default_rng(_CURVE_SEED + 10)))


def _entry(
    name: str,
    description: str,
    build: Callable[[], CatalogModel],
    ml_degree: int | None,
    provenance: Provenance,
    *,
    bidegree: Sequence[int] | None = None,
    sectional: Sequence[int] | None = None,
) -> CatalogEntry:
    return CatalogEntry(
        name,
        description,
        build,
        ml_degree,
        provenance,
        None if bidegree is None else BinaryForm.of(bidegree),
        None if sectional is None else BinaryForm.of(sectional),
    )


_ENTRIES = (
    _entry(
        "hardy-weinberg",
        "Hardy–Weinberg curve 4 p0 p2 = p1^2",
        lambda: VarietySpec.hypersurface(parse_poly("4*p0*p2 - p1^2")),
        1,
        Provenance.DERIVED,
        bidegree=(1, 2, 0),
        sectional=(1, 2, 0),
    ),
    _entry(
        "grassmannian-2-4",
        "Plücker quadric of G(2,4) in P^5",
        lambda: VarietySpec.hypersurface(parse_poly("p0*p5 - p1*p4 + p2*p3")),
        4,
        Provenance.PAPER,
        bidegree=(4, 6, 6, 6, 2, 0),
        sectional=(4, 20, 24, 12, 2, 0),
    ),
    _entry(
        "secant-quartic",
        "secant variety of the rational normal quartic (binomial mixture)",
        lambda: VarietySpec.hypersurface(
            _matrix_det([["12*p0", "3*p1", "2*p2"], ["3*p1", "2*p2", "3*p3"], ["2*p2", "3*p3", "12*p4"]], 5)
        ),
        12,
        Provenance.PAPER,
        bidegree=(12, 15, 12, 3, 0),
        sectional=(12, 30, 18, 3, 0),
    ),
    _entry(
        "symmetric-3x3",
        "mixture of two identically distributed ternary variables",
        lambda: VarietySpec.hypersurface(
            _matrix_det([["2*p0", "p1", "p2"], ["p1", "2*p3", "p4"], ["p2", "p4", "2*p5"]], 6)
        ),
        6,
        Provenance.PAPER,
        bidegree=(6, 12, 15, 12, 3, 0),
        sectional=(6, 42, 48, 21, 3, 0),
    ),
    _entry(
        "det-3x3",
        "3x3 determinant hypersurface in P^8",
        lambda: VarietySpec.hypersurface(
            _matrix_det([["p0", "p1", "p2"], ["p3", "p4", "p5"], ["p6", "p7", "p8"]], 9)
        ),
        10,
        Provenance.PAPER,
        bidegree=(10, 24, 33, 38, 39, 33, 12, 3, 0),
        sectional=(10, 182, 436, 518, 351, 138, 30, 3, 0),
    ),
    _entry(
        "toric-fourfold",
        "V(p11 p22 p33 - p12 p13 p23) as a toric model",
        lambda: ToricModel.of(TORIC_FOURFOLD_A),
        3,
        Provenance.PAPER,
        bidegree=(3, 3, 3, 3, 3, 0),
        sectional=(3, 12, 18, 12, 3, 0),
    ),
    _entry(
        "toric-fourfold-plus",
        "V(p11 p22 p33 + p12 p13 p23) as a toric model",
        lambda: ToricModel.of(TORIC_FOURFOLD_A, [1, 1, 1, -1, -1, -1]),
        2,
        Provenance.PAPER,
    ),
    _entry(
        "linear-2-plane",
        "generic 2-plane in P^4",
        _linear_two_plane,
        6,
        Provenance.PAPER,
        bidegree=(6, 3, 1, 0, 0),
        sectional=(6, 4, 1, 0, 0),
    ),
    _entry(
        "mix2-boundary",
        "boundary stratum of the 2x2x2 mixture model (pair only)",
        lambda: _no_model("mix2-boundary"),
        1,
        Provenance.PAPER,
        bidegree=(1, 2, 3, 3, 3, 3, 0, 0),
        sectional=(1, 14, 30, 30, 15, 3, 0, 0),
    ),
    _entry(
        "twisted-cubic",
        "linear image of the rational normal curve in P^3",
        _twisted_cubic,
        13,
        Provenance.PAPER,
    ),
    _entry(
        "steiner-quartic",
        "generic quadratic map of the plane with coordinate sum one",
        _steiner_quartic,
        25,
        Provenance.PAPER,
    ),
    _entry(
        "cubic-surface",
        "toric cubic surface with generic c",
        lambda: ToricModel.of(CUBIC_SURFACE_A, [2, 3, 5, 7]),
        3,
        Provenance.PAPER,
    ),
    _entry(
        "cubic-surface-special",
        "toric cubic surface with c = (1, 1, 1, -3)",
        lambda: ToricModel.of(CUBIC_SURFACE_A, [1, 1, 1, -3]),
        2,
        Provenance.PAPER,
    ),
    _entry("generic-quadric", "dense plane conic", lambda: _plane_curve(2), 6, Provenance.PAPER),
    _entry("generic-cubic", "dense plane cubic", lambda: _plane_curve(3), 12, Provenance.PAPER),
    _entry("generic-quartic", "dense plane quartic", lambda: _plane_curve(4), 20, Provenance.PAPER),
    _entry(
        "nodal-cubic",
        "plane cubic with a node at (1:1:1)",
        lambda: _singular_cubic("x^2 + 3*x*y - 2*y^2"),
        10,
        Provenance.PAPER,
    ),
    _entry(
        "cuspidal-cubic",
        "plane cubic with a cusp at (1:1:1)",
        lambda: _singular_cubic("(x + 2*y)^2"),
        9,
        Provenance.PAPER,
    ),
    _entry(
        "real-cusp-cubic",
        "cuspidal cubic with its cusp at (13:17:-31)",
        lambda: VarietySpec.hypersurface(
            parse_poly("(p0 + p1 + p2)*(7*p0 - 9*p1 - 2*p2)^2 - (3*p0 + 5*p1 + 4*p2)^3")
        ),
        7,
        Provenance.PAPER,
    ),
    _entry(
        "cautionary-cubic",
        "cuspidal cubic p2 (p1 - p2)^2 + (p0 - p2)^3",
        lambda: VarietySpec.hypersurface(parse_poly("p2*(p1 - p2)^2 + (p0 - p2)^3")),
        5,
        Provenance.PAPER,
    ),
    _entry(
        "degenerate-cubic",
        "cubic (p0 + p1 + p2)^3 + p0 p1 p2, degenerate fiber at u = (1, 1, 1)",
        lambda: VarietySpec.hypersurface(parse_poly("(p0 + p1 + p2)^3 + p0*p1*p2")),
        None,
        Provenance.PAPER,
    ),
    _entry(
        "line-p0-p1",
        "line V(p0 + p1) in P^2",
        lambda: VarietySpec.hypersurface(parse_poly("p0 + p1", nvars=3)),
        0,
        Provenance.PAPER,
    ),
    _entry("generic-quadric-surface", "dense quadric surface in P^3", _generic_quadric_surface, 14, Provenance.DERIVED),
    _entry("rank-3-3-1", "3x3 matrices of rank 1", lambda: RankSpec(3, 3, 1), 1, Provenance.PAPER),
    _entry("rank-3-3-2", "3x3 matrices of rank at most 2", lambda: RankSpec(3, 3, 2), 10, Provenance.PAPER),
    _entry("rank-3-4-2", "3x4 matrices of rank at most 2", lambda: RankSpec(3, 4, 2), 26, Provenance.PAPER),
    _entry(
        "symmetric-rank-3-2",
        "symmetric 3x3 matrices of rank at most 2",
        lambda: SymmetricRankSpec(3, 2),
        6,
        Provenance.PAPER,
    ),
)


def _no_model(name: str) -> CatalogModel:
    msg = f"Catalog entry {name!r} only records a bidegree pair"
    raise InputError(msg)


CATALOG: dict[str, CatalogEntry] = {entry.name: entry for entry in _ENTRIES}

KNOWN_BIDEGREE_PAIRS: dict[str, tuple[BinaryForm, BinaryForm]] = {
    entry.name: (entry.bidegree, entry.sectional)
    for entry in _ENTRIES
    if entry.bidegree is not None and entry.sectional is not None
}


def catalog_names() -> list[str]:
    """Names of all catalog entries, in catalog order.

    Returns:
        list[str]: Entry names.

    """
    return list(CATALOG)


def catalog_entry(name: str) -> CatalogEntry:
    """Look up an entry by name, with or without a ``catalog:`` prefix.

    Returns:
        CatalogEntry: The entry.

    Raises:
        InputError: If the name is unknown.

    """
    key = name.removeprefix("catalog:")
    try:
        return CATALOG[key]
    except KeyError as exc:
        msg = f"Unknown catalog model {key!r}; known models: {', '.join(CATALOG)}"
        raise InputError(msg) from exc


def load_model(name: str) -> CatalogModel:
    """Build the model of a catalog entry.

    Returns:
        CatalogModel: Fresh model.

    """
    entry = catalog_entry(name)
    LOGGER.debug("building catalog model %s", entry.name)
    return entry.build()
