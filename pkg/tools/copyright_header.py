# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Apply the lg-toolkit BSD-3-Clause banner to source files.

Files without a banner get one; files whose banner names the same author with an older year
are bumped. Banners of other authors are left alone.
"""

from __future__ import annotations

import logging
import sys
import tomllib
from dataclasses import dataclass
from datetime import UTC, datetime
from pathlib import Path
from typing import TYPE_CHECKING

import click

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

__all__ = ["HeaderConfig", "apply_header", "build_header", "find_missing", "main"]

DEFAULT_EXCLUDE_DIRS = frozenset({".git", ".venv", ".uv-cache", ".mypy_cache", ".ruff_cache", "__pycache__"})
RULE = "# " + "-" * 77
HEADER_TEMPLATE = f"""{RULE}
#  Copyright (c) {{year}}  {{author}}
#
#  This file is part of {{project}}.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
{RULE}"""
ENCODING = "utf-8"
FALLBACK_NAME = "lg-toolkit"
LOGGER = logging.getLogger("tools.copyright_header")


@dataclass(frozen=True, slots=True)
class HeaderConfig:
    """Values substituted into the banner."""

    author: str
    year: int
    project: str = FALLBACK_NAME


def build_header(config: HeaderConfig) -> str:
    """Render the banner, ending with a newline.

    Returns:
        str: Banner text.

    """
    return HEADER_TEMPLATE.format(year=config.year, author=config.author, project=config.project) + "\n"


def _pyproject_defaults(pyproject_path: Path) -> tuple[str, str]:
    data = tomllib.loads(pyproject_path.read_text(encoding=ENCODING))
    project = data.get("project", {})
    authors = project.get("authors") or [{}]
    return project.get("name", FALLBACK_NAME), authors[0].get("name", FALLBACK_NAME)


def _iter_python_files(paths: Iterable[Path], exclude_dirs: frozenset[str]) -> Iterable[Path]:
    for base in paths:
        if base.is_file() and base.suffix == ".py":
            yield base
        elif base.is_dir():
            yield from (p for p in sorted(base.rglob("*.py")) if not exclude_dirs.intersection(p.parts))


def _banner_end(lines: Sequence[str]) -> int | None:
    if not lines or not lines[0].startswith("# ---"):
        return None
    return next((i for i, line in enumerate(lines[1:], start=1) if line.startswith("# ---")), None)


def _copyright(line: str) -> tuple[int, str] | None:
    # "#  Copyright (c) 2026  Author Name"
    parts = line.lstrip("#").split()
    if parts[:2] != ["Copyright", "(c)"] or len(parts) < 4 or not parts[2].isdigit():  # noqa: PLR2004
        return None
    return int(parts[2]), " ".join(parts[3:])


def _rewrite(body: list[str], header: str) -> list[str] | None:
    target = header.splitlines()
    end = _banner_end(body)
    if end is None:
        return [*target, "", *body]
    current = _copyright(body[1]) if end > 1 else None
    wanted = _copyright(target[1])
    if current is None or wanted is None or "\n".join(body[: end + 1]) + "\n" == header:
        return None
    (year, author), (new_year, new_author) = current, wanted
    if author != new_author or year >= new_year:
        return None
    return [*target, *body[end + 1 :]]


def apply_header(files: Iterable[Path], header: str) -> list[Path]:
    """Insert or bump the banner in each file.

    A shebang or coding line stays on top.

    Returns:
        list[Path]: Files that were written.

    """
    updated: list[Path] = []
    for path in files:
        text = path.read_text(encoding=ENCODING)
        lines = text.splitlines()
        keep = 0
        while keep < len(lines) and keep < 2 and lines[keep].startswith(("#!", "# -*- coding:")):  # noqa: PLR2004
            keep += 1
        body = _rewrite(lines[keep:], header)
        if body is None:
            continue
        path.write_text("\n".join([*lines[:keep], *body]) + ("\n" if text.endswith("\n") else ""), encoding=ENCODING)
        updated.append(path)
    return updated


def find_missing(files: Iterable[Path]) -> list[Path]:
    """Return the files that carry no banner at all.

    Returns:
        list[Path]: Files without a banner.

    """
    return [path for path in files if not path.read_text(encoding=ENCODING).lstrip().startswith("# ---")]


@click.command(help="Apply the BSD-3-Clause copyright banner.")
@click.option("--author", help="Author name (default: first pyproject author).")
@click.option("--year", type=int, help="Banner year (default: current year).")
@click.option("--project", help="Project name (default: from pyproject).")
@click.option("--exclude", multiple=True, default=sorted(DEFAULT_EXCLUDE_DIRS), help="Directory names to skip.")
@click.option("--check", is_flag=True, help="Only list files without a banner.")
@click.argument("paths", nargs=-1, type=click.Path(path_type=Path))
def cli(  # noqa: PLR0913
    author: str | None,
    year: int | None,
    project: str | None,
    exclude: tuple[str, ...],
    check: bool,  # noqa: FBT001
    paths: tuple[Path, ...],
) -> int:
    """Insert or check banners under ``paths`` (default ``src tests tools``)."""
    pyproject = Path("pyproject.toml")
    name, default_author = _pyproject_defaults(pyproject) if pyproject.exists() else (FALLBACK_NAME, FALLBACK_NAME)
    config = HeaderConfig(author or default_author, year or datetime.now(tz=UTC).year, project or name)
    files = list(_iter_python_files(paths or (Path("src"), Path("tests"), Path("tools")), frozenset(exclude)))
    if check:
        missing = find_missing(files)
        for path in missing:
            LOGGER.info("%s", path)
        return 1 if missing else 0
    for path in apply_header(files, build_header(config)):
        LOGGER.info("Added header: %s", path)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command and return its exit status.

    Returns:
        int: ``1`` when ``--check`` finds files without a banner.

    """
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    try:
        status = cli.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    return status if isinstance(status, int) else 0


if __name__ == "__main__":
    sys.exit(main())
