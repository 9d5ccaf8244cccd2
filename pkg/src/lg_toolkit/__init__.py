# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Likelihood geometry toolkit: ML degrees, bidegrees and critical points of statistical models."""
