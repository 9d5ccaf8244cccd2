# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Linear-product start systems and their Bézout counts.

Both start kinds are products of affine linear forms, so their solutions are found by
solving linear systems:

- total degree: equation ``i`` is ``x_i^{d_i} - c_i``, factored over its roots;
- multihomogeneous: equation ``i`` is a product of ``d_ij`` random affine forms in the
  variables of group ``j``, for every group ``j``.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from functools import cache
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from lg_toolkit.config import DEFAULT_MAX_PATHS, StartKind
from lg_toolkit.errors import InputError, PathOverflowError

if TYPE_CHECKING:
    from lg_toolkit.critsys import CriticalSystem
    from lg_toolkit.lg_types import ComplexArray

__all__ = [
    "LinearProductSystem",
    "StartSystem",
    "bezout_number",
    "multihom_start",
    "multihomogeneous_bezout",
    "start_system",
    "total_degree_start",
]

LOGGER = logging.getLogger("lg_toolkit.start_systems")


@dataclass(frozen=True, slots=True)
class LinearProductSystem:
    """Equations ``g_i(x) = prod_l (a_il · x + b_il)``.

    Attributes:
        factors: Linear parts ``a``, shape ``(neq, L, n)``.
        offsets: Constant parts ``b``, shape ``(neq, L)``. Unused factor slots hold ``a = 0, b = 1``.

    """

    factors: ComplexArray
    offsets: ComplexArray

    @property
    def nvars(self) -> int:
        """Number of unknowns."""
        return int(self.factors.shape[2])

    def _forms(self, X: ComplexArray) -> ComplexArray:
        return np.einsum("eln,bn->bel", self.factors, X) + self.offsets[None, :, :]

    def evaluate(self, X: ComplexArray) -> ComplexArray:
        """Evaluate at a batch of points ``(B, n)``.

        Returns:
            ComplexArray: Values, shape ``(B, neq)``.

        """
        return np.prod(self._forms(X), axis=2)

    def evaluate_and_jacobian(self, X: ComplexArray) -> tuple[ComplexArray, ComplexArray]:
        """Evaluate values and Jacobians at a batch of points.

        Returns:
            tuple[ComplexArray, ComplexArray]: Values ``(B, neq)`` and Jacobians ``(B, neq, n)``.

        """
        forms = self._forms(X)
        batch, neq, width = forms.shape
        prefix = np.ones((batch, neq, width + 1), dtype=np.complex128)
        suffix = np.ones((batch, neq, width + 1), dtype=np.complex128)
        for k in range(width):
            prefix[:, :, k + 1] = prefix[:, :, k] * forms[:, :, k]
            suffix[:, :, width - k - 1] = suffix[:, :, width - k] * forms[:, :, width - k - 1]
        others = prefix[:, :, :width] * suffix[:, :, 1:]
        jacobian = np.einsum("bel,eln->ben", others, self.factors)
        return prefix[:, :, width], jacobian


class StartSystem(NamedTuple):
    """A start system, its solutions, and the number of paths they seed."""

    system: LinearProductSystem
    solutions: ComplexArray
    path_count: int
    kind: StartKind


def bezout_number(degrees: Sequence[int]) -> int:
    """Return the total-degree Bézout number ``prod d_i``.

    Returns:
        int: Number of total-degree start solutions.

    """
    return math.prod(degrees)


def multihomogeneous_bezout(group_degrees: Sequence[Sequence[int]], group_sizes: Sequence[int]) -> int:
    """Return the multihomogeneous Bézout number.

    It is the sum, over assignments of equations to groups that use each group ``j``
    exactly ``|G_j|`` times, of the product of the assigned degrees.

    Returns:
        int: Number of multihomogeneous start solutions.

    Raises:
        InputError: If the degree table does not match the group sizes.

    """
    if len(group_degrees) != sum(group_sizes) or any(len(row) != len(group_sizes) for row in group_degrees):
        msg = "Degree table must have one row per unknown and one column per group"
        raise InputError(msg)
    table = tuple(tuple(row) for row in group_degrees)

    @cache
    def count(index: int, remaining: tuple[int, ...]) -> int:
        if index == len(table):
            return 1
        total = 0
        for group, left in enumerate(remaining):
            degree = table[index][group]
            if left and degree:
                rest = remaining[:group] + (left - 1,) + remaining[group + 1 :]
                total += degree * count(index + 1, rest)
        return total

    return count(0, tuple(group_sizes))


def total_degree_start(
    system: CriticalSystem, rng: np.random.Generator, *, max_paths: int = DEFAULT_MAX_PATHS
) -> StartSystem:
    """Build the start system ``x_i^{d_i} = c_i`` with random unit complex ``c_i``.

    Returns:
        StartSystem: Start system with ``prod d_i`` solutions.

    Raises:
        InputError: If an equation is constant.
        PathOverflowError: If the Bézout number exceeds ``max_paths``.

    """
    degrees = system.degrees()
    if any(d == 0 for d in degrees):
        msg = f"{system.provenance}: constant equation in the system"
        raise InputError(msg)
    path_count = bezout_number(degrees)
    if path_count > max_paths:
        raise PathOverflowError(path_count, max_paths)
    n = system.nunknowns
    width = max(degrees)
    factors = np.zeros((n, width, n), dtype=np.complex128)
    offsets = np.ones((n, width), dtype=np.complex128)
    roots: list[ComplexArray] = []
    for i, degree in enumerate(degrees):
        c = np.exp(2j * np.pi * rng.random())
        root = c ** (1 / degree) * np.exp(2j * np.pi * np.arange(degree) / degree)
        roots.append(root)
        factors[i, :degree, i] = 1
        offsets[i, :degree] = -root
    solutions = np.array(list(itertools.product(*roots)), dtype=np.complex128).reshape(path_count, n)
    LOGGER.info("%s: total-degree start with %s paths", system.provenance, path_count)
    return StartSystem(LinearProductSystem(factors, offsets), solutions, path_count, StartKind.TOTAL_DEGREE)


def _assignments(table: Sequence[Sequence[int]], sizes: Sequence[int]) -> Iterator[tuple[int, ...]]:
    def walk(index: int, remaining: list[int], chosen: list[int]) -> Iterator[tuple[int, ...]]:
        if index == len(table):
            yield tuple(chosen)
            return
        for group, left in enumerate(remaining):
            if left and table[index][group]:
                remaining[group] -= 1
                chosen.append(group)
                yield from walk(index + 1, remaining, chosen)
                chosen.pop()
                remaining[group] += 1

    yield from walk(0, list(sizes), [])


def multihom_start(system: CriticalSystem, rng: np.random.Generator) -> StartSystem:
    """Build a linear-product start system respecting the groupwise degrees.

    Equation ``i`` gets ``d_ij`` random affine forms in the variables of group ``j``. A start
    solution picks, for each equation, one factor; the factors picked within a group form a
    square linear system in that group's variables.

    Returns:
        StartSystem: Start system with the multihomogeneous Bézout number of solutions.

    Raises:
        InputError: If a group is empty or an equation is constant in every group.

    """
    groups = system.variable_groups
    if any(not group for group in groups):
        msg = f"{system.provenance}: empty variable group"
        raise InputError(msg)
    table = system.group_degrees()
    if any(sum(row) == 0 for row in table):
        msg = f"{system.provenance}: constant equation in the system"
        raise InputError(msg)
    n = system.nunknowns
    sizes = [len(group) for group in groups]
    width = max(sum(row) for row in table)
    factors = np.zeros((n, width, n), dtype=np.complex128)
    offsets = np.ones((n, width), dtype=np.complex128)
    # slot[i][j]: factor indices of equation i that live in group j
    slot: list[list[range]] = []
    for i, row in enumerate(table):
        cursor = 0
        ranges: list[range] = []
        for group, degree in zip(groups, row, strict=True):
            for k in range(cursor, cursor + degree):
                factors[i, k, list(group)] = rng.normal(size=len(group)) + 1j * rng.normal(size=len(group))
                offsets[i, k] = rng.normal() + 1j * rng.normal()
            ranges.append(range(cursor, cursor + degree))
            cursor += degree
        slot.append(ranges)

    solutions: list[ComplexArray] = []
    for assignment in _assignments(table, sizes):
        partial: list[list[tuple[tuple[int, ...], ComplexArray]]] = []
        for g, group in enumerate(groups):
            eqs = [i for i, chosen in enumerate(assignment) if chosen == g]
            columns = list(group)
            block: list[tuple[tuple[int, ...], ComplexArray]] = []
            for picks in itertools.product(*(slot[i][g] for i in eqs)):
                A = np.array([factors[i, k, columns] for i, k in zip(eqs, picks, strict=True)])
                b = np.array([offsets[i, k] for i, k in zip(eqs, picks, strict=True)])
                block.append((group, np.linalg.solve(A, -b)))
            partial.append(block)
        for combo in itertools.product(*partial):
            x = np.empty(n, dtype=np.complex128)
            for group, values in combo:
                x[list(group)] = values
            solutions.append(x)
    path_count = len(solutions)
    LOGGER.info(
        "%s: multihomogeneous start with %s paths (total degree %s)",
        system.provenance,
        path_count,
        bezout_number(system.degrees()),
    )
    return StartSystem(
        LinearProductSystem(factors, offsets),
        np.array(solutions, dtype=np.complex128).reshape(path_count, n),
        path_count,
        StartKind.MULTIHOMOGENEOUS,
    )


def start_system(
    system: CriticalSystem, kind: StartKind, rng: np.random.Generator, *, max_paths: int = DEFAULT_MAX_PATHS
) -> StartSystem:
    """Dispatch to :func:`total_degree_start` or :func:`multihom_start`.

    Returns:
        StartSystem: Requested start system.

    """
    if kind is StartKind.TOTAL_DEGREE:
        return total_degree_start(system, rng, max_paths=max_paths)
    return multihom_start(system, rng)
