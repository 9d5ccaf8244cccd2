# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Tests for the copyright banner tool."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from tools.copyright_header import HeaderConfig, apply_header, build_header, find_missing, main

if TYPE_CHECKING:
    from pathlib import Path


def _banner(year: int, author: str = "Someone") -> str:
    return build_header(HeaderConfig(author=author, year=year))


def test_build_header_matches_source_banner() -> None:
    """The rendered banner is the one every module starts with."""
    header = _banner(2026, "TwilightSparkle42")
    lines = header.splitlines()
    assert len(lines) == 7  # noqa: PLR2004
    assert lines[1] == "#  Copyright (c) 2026  TwilightSparkle42"
    assert lines[3] == "#  This file is part of lg-toolkit."
    assert len(lines[0]) == 79  # noqa: PLR2004


def test_apply_header_inserts_banner(tmp_path: Path) -> None:
    """A file without a banner gets one, below its shebang."""
    path = tmp_path / "module.py"
    path.write_text("#!/usr/bin/env python\nVALUE = 1\n", encoding="utf-8")
    header = _banner(2026)

    assert apply_header([path], header) == [path]

    content = path.read_text(encoding="utf-8")
    assert content == f"#!/usr/bin/env python\n{header}\nVALUE = 1\n"


@pytest.mark.parametrize(
    ("existing", "updated"),
    [
        pytest.param(_banner(2026), False, id="same"),
        pytest.param(_banner(2025, "Another"), False, id="other-author"),
        pytest.param(_banner(2027), False, id="newer-year"),
        pytest.param(_banner(2025), True, id="older-year"),
    ],
)
def test_apply_header_existing_banner(tmp_path: Path, existing: str, updated: bool) -> None:  # noqa: FBT001
    """Only an older banner of the same author is bumped."""
    path = tmp_path / "module.py"
    path.write_text(f"{existing}\nVALUE = 2\n", encoding="utf-8")
    header = _banner(2026)

    assert bool(apply_header([path], header)) is updated

    content = path.read_text(encoding="utf-8")
    assert content.startswith(header if updated else existing)
    assert content.endswith("\nVALUE = 2\n")


def test_check_lists_missing_banners(tmp_path: Path) -> None:
    """``--check`` fails while some file has no banner and passes afterwards."""
    good = tmp_path / "good.py"
    good.write_text(_banner(2026) + "\nA = 1\n", encoding="utf-8")
    bad = tmp_path / "bad.py"
    bad.write_text("B = 2\n", encoding="utf-8")

    assert find_missing([good, bad]) == [bad]
    assert main(["--check", str(tmp_path)]) == 1
    assert main(["--author", "Someone", "--year", "2026", str(tmp_path)]) == 0
    assert main(["--check", str(tmp_path)]) == 0
