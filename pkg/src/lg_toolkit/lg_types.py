# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Shared type aliases used across lg-toolkit."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import numpy.typing as npt

__all__ = [
    "Coefficient",
    "ComplexArray",
    "Exponent",
    "FloatArray",
    "IntMatrix",
    "JSONArray",
    "JSONDict",
    "JSONScalar",
    "JSONValue",
    "RationalMatrix",
]

type JSONScalar = str | int | float | bool | None
type JSONArray = list[JSONValue]
type JSONDict = dict[str, JSONValue]
type JSONValue = JSONScalar | JSONDict | JSONArray

type Exponent = tuple[int, ...]
type Coefficient = Fraction | complex
type IntMatrix = tuple[tuple[int, ...], ...]
type RationalMatrix = tuple[tuple[Fraction, ...], ...]
type ComplexArray = npt.NDArray[np.complex128]
type FloatArray = npt.NDArray[np.float64]
