# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""Tests for environment helpers and settings."""

from __future__ import annotations

import pytest

from lg_toolkit.config import (
    DEFAULT_MAX_PATHS,
    Settings,
    StartKind,
    env_enum,
    env_float,
    env_int,
    env_str,
    get_env,
    load_settings,
    on_error_return_value,
)
from lg_toolkit.parsing import parse_int
from lg_toolkit.tracker import TrackerConfig


def test_get_env_returns_cast_value() -> None:
    """get_env returns the cast value when present."""
    assert get_env("LG_THREADS", cast=parse_int, env={"LG_THREADS": "4"}) == 4  # noqa: PLR2004


def test_get_env_missing_returns_default_without_on_error() -> None:
    """get_env returns the default when missing without invoking the error handler."""
    calls: list[str] = []

    def handler(name: str, _value: str | None, _cast: object) -> int:
        calls.append(name)
        return -1

    assert get_env("LG_SEED", cast=parse_int, default=7, env={}, on_error=handler) == 7  # noqa: PLR2004
    assert calls == []


def test_get_env_invalid_invokes_error_handler() -> None:
    """get_env calls the error handler with the raw value when casting fails."""
    seen: list[tuple[str, str | None]] = []

    def handler(name: str, value: str | None, _cast: object) -> int:
        seen.append((name, value))
        return 0

    assert get_env("LG_SEED", cast=parse_int, env={"LG_SEED": "abc"}, on_error=handler) == 0
    assert seen == [("LG_SEED", "abc")]


def test_get_env_missing_required_raises() -> None:
    """A missing variable without default raises ValueError naming it."""
    with pytest.raises(ValueError, match="Value is missing for 'LG_TAU'"):
        get_env("LG_TAU", cast=float, env={})


def test_on_error_return_value() -> None:
    """The returned handler ignores its arguments."""
    assert on_error_return_value(5)("NAME", "raw", None) == 5  # noqa: PLR2004


def test_env_helpers_parse_and_fall_back() -> None:
    """Typed helpers parse valid values and fall back to defaults on invalid ones."""
    env = {"B": "12", "C": "2.5", "D": "td", "E": "bad", "F": " text "}
    assert env_int("B", env=env) == 12  # noqa: PLR2004
    assert env_float("C", env=env) == pytest.approx(2.5)
    assert env_enum("D", StartKind, env=env) is StartKind.TOTAL_DEGREE
    assert env_int("E", default=3, env=env) == 3  # noqa: PLR2004
    assert env_str("F", env=env) == " text "
    assert env_str("MISSING", env=env) is None


def test_get_env_invalid_without_handler_raises() -> None:
    """Without an error handler an invalid value raises ValueError naming it."""
    with pytest.raises(ValueError, match="Invalid value for 'E'"):
        get_env("E", cast=parse_int, env={"E": "bad"})


def test_load_settings_defaults() -> None:
    """An empty environment yields the documented defaults."""
    settings = load_settings({})
    assert settings == Settings()
    assert settings.max_paths == DEFAULT_MAX_PATHS
    assert settings.start is StartKind.MULTIHOMOGENEOUS
    assert settings.log_level == "WARNING"


def test_load_settings_reads_every_variable() -> None:
    """Every LG_* variable reaches the settings."""
    env = {
        "LG_THREADS": "3",
        "LG_MAX_PATHS": "500",
        "LG_SEED": "11",
        "LG_TAU": "1e-6",
        "LG_COND_THRESHOLD": "1e8",
        "LG_START": "td",
        "LG_LOG_LEVEL": "debug",
    }
    settings = load_settings(env)
    assert settings.threads == 3  # noqa: PLR2004
    assert settings.max_paths == 500  # noqa: PLR2004
    assert settings.seed == 11  # noqa: PLR2004
    assert settings.tau == pytest.approx(1e-6)
    assert settings.cond_threshold == pytest.approx(1e8)
    assert settings.start is StartKind.TOTAL_DEGREE
    assert settings.log_level == "DEBUG"


def test_load_settings_ignores_invalid_values() -> None:
    """Invalid values fall back to defaults; thread counts are clamped to one."""
    settings = load_settings({"LG_THREADS": "-2", "LG_START": "bezout", "LG_SEED": "x"})
    assert settings.threads == 1
    assert settings.start is StartKind.MULTIHOMOGENEOUS
    assert settings.seed == 0


def test_tracker_config_from_settings_with_overrides() -> None:
    """Tracker configuration takes settings and keyword overrides."""
    settings = load_settings({"LG_SEED": "5", "LG_THREADS": "2", "LG_START": "td"})
    config = TrackerConfig.from_settings(settings, seed=9)
    assert config.seed == 9  # noqa: PLR2004
    assert config.threads == 2  # noqa: PLR2004
    assert config.start_kind is StartKind.TOTAL_DEGREE
