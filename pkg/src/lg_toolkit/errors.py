# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Exception types raised by lg-toolkit.

Input problems derive from :class:`ValueError` so callers that only know about the
builtin still catch them; numerical conditions derive from :class:`RuntimeError`.
"""

from __future__ import annotations

__all__ = ["ConvergenceError", "InputError", "PathOverflowError", "ResonanceError", "UnstableCountError"]


class InputError(ValueError):
    """Malformed or out-of-range model input."""


class ResonanceError(InputError):
    """Data lies on an exceptional locus of the model.

    Attributes:
        index: Position of the vanishing linear form or offending coordinate.

    """

    def __init__(self, message: str, *, index: int) -> None:
        """Store the offending index alongside the message."""
        super().__init__(message)
        self.index = index


class PathOverflowError(RuntimeError):
    """The start system has more paths than the configured cap."""

    def __init__(self, path_count: int, cap: int) -> None:
        """Build the message from the offending count and the cap."""
        msg = (
            f"Start system has {path_count} paths, above the cap of {cap}; "
            "use the multihomogeneous start (--start mhom) or raise --max-paths"
        )
        super().__init__(msg)
        self.path_count = path_count
        self.cap = cap


class UnstableCountError(RuntimeError):
    """A count that must agree across trials did not."""


class ConvergenceError(RuntimeError):
    """An iterative solver stopped before meeting its tolerance."""
