# -----------------------------------------------------------------------------
#  Copyright (c) 2026  TwilightSparkle42
#
#  This file is part of lg-toolkit.
#  It is licensed under the BSD 3-Clause License.
#  See the LICENSE file in the project root for full license text.
# -----------------------------------------------------------------------------
"""``lg`` command line: every subcommand prints one JSON document on stdout.

Exit codes: 0 success, 2 unstable count or non-convergence, 3 verification finding,
4 input error.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any, Final

import click

from lg_toolkit.catalog import CATALOG, catalog_entry, load_model
from lg_toolkit.config import StartKind, load_settings
from lg_toolkit.critsys import CriticalModel, DataVector, RestrictableModel, VarietySpec
from lg_toolkit.errors import ConvergenceError, InputError, PathOverflowError, UnstableCountError
from lg_toolkit.horn import HORN_MODELS, HornModel, horn_mle, horn_model, verify_ml_degree_one
from lg_toolkit.linmatroid import (
    LinearModel,
    arrangement_matroid,
    broken_circuit_hvector,
    characteristic_polynomial,
    linear_ml_bidegree,
    mle_linear,
)
from lg_toolkit.mldeg import (
    DEFAULT_TRIALS,
    generic_ci_ml_degree,
    generic_map_ml_degree,
    ml_bidegree,
    ml_degree,
    restriction_split_check,
    sectional_ml_degree,
)
from lg_toolkit.parsing import coerce_int_matrix, format_rational, parse_int_list, parse_json, parse_rational_list
from lg_toolkit.polyarith import parse_poly
from lg_toolkit.rankdual import (
    DEFAULT_EM_ITERS,
    DEFAULT_EM_TOL,
    duality_pairing,
    em_mixture,
    format_omega,
    omega_matrix,
    rank_critical_points,
    supermodular_222,
)
from lg_toolkit.reproduce import Tier, run_checks
from lg_toolkit.toricgp import DEFAULT_GP_TOL, ToricModel, birch_mle, normalized_volume, toric_ml_degree
from lg_toolkit.tracker import TrackerConfig, solve

if TYPE_CHECKING:
    from collections.abc import Sequence

    from lg_toolkit.lg_types import JSONValue

__all__ = ["EXIT_FINDING", "EXIT_INPUT", "EXIT_OK", "EXIT_UNSTABLE", "cli", "main"]

LOGGER = logging.getLogger("lg_toolkit.cli")

EXIT_OK: Final = 0
EXIT_UNSTABLE: Final = 2
EXIT_FINDING: Final = 3
EXIT_INPUT: Final = 4

CATALOG_PREFIX: Final = "catalog:"


class _LgGroup(click.Group):
    """Group that maps library exceptions to the documented exit codes."""

    def invoke(self, ctx: click.Context) -> Any:  # noqa: ANN401
        """Run the subcommand, translating failures into exit codes.

        Returns:
            Any: The subcommand's return value.

        Raises:
            click.exceptions.Exit: With the code matching the failure.
            click.UsageError: For malformed command lines, with the input-error code.

        """
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            exc.exit_code = EXIT_INPUT
            raise
        except (UnstableCountError, ConvergenceError) as exc:
            click.echo(f"error: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_UNSTABLE) from exc
        except (InputError, PathOverflowError, ValueError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_INPUT) from exc


def _emit(payload: JSONValue) -> None:
    click.echo(json.dumps(payload))


def _finish(*, unstable: bool = False, finding: bool = False) -> None:
    if unstable:
        raise click.exceptions.Exit(EXIT_UNSTABLE)
    if finding:
        raise click.exceptions.Exit(EXIT_FINDING)


def _read_json(source: str) -> JSONValue:
    """Decode ``source`` as a path to a JSON file, or as inline JSON."""
    path = Path(source)
    text = path.read_text(encoding="utf-8") if path.is_file() else source
    return parse_json(text)


def _load_model(source: str) -> object:
    """Resolve ``catalog:NAME``, a JSON file or inline JSON to a model."""
    if source.startswith(CATALOG_PREFIX):
        return load_model(source)
    data = _read_json(source)
    if isinstance(data, dict):
        if "A" in data:
            return ToricModel.from_json(data)
        if "B" in data:
            return HornModel.from_json(data)
        if "basis" in data:
            return LinearModel.from_json(data)
        return VarietySpec.from_json(data)
    if isinstance(data, str):
        return VarietySpec.hypersurface(parse_poly(data))
    msg = "Model JSON must be an object or a polynomial string"
    raise InputError(msg)


def _critical_model(source: str) -> CriticalModel:
    model = _load_model(source)
    if not isinstance(model, CriticalModel):
        msg = f"{source} does not describe a model with critical equations"
        raise InputError(msg)
    return model


def _variety(source: str) -> VarietySpec:
    model = _load_model(source)
    if not isinstance(model, VarietySpec):
        msg = f"{source} is not an implicitly given variety"
        raise InputError(msg)
    return model


def _data(source: str) -> DataVector:
    """Read data as ``"1,2,1"``, a JSON array or a JSON file."""
    stripped = source.strip()
    if stripped.startswith("[") or Path(stripped).is_file():
        raw = _read_json(stripped)
        if not isinstance(raw, list):
            msg = "Data must be a JSON array"
            raise InputError(msg)
        return DataVector.of(raw)
    return DataVector(parse_rational_list(stripped))


def _matrix(source: str) -> list[list[JSONValue]]:
    raw = _read_json(source)
    if not isinstance(raw, list) or not all(isinstance(row, list) for row in raw):
        msg = "Expected a JSON matrix (array of rows)"
        raise InputError(msg)
    return [list(row) for row in raw if isinstance(row, list)]


def _config(ctx: click.Context) -> TrackerConfig:
    config = ctx.find_object(TrackerConfig)
    return config if config is not None else TrackerConfig()


def _trials_option(func: Any) -> Any:  # noqa: ANN401
    return click.option(
        "--trials",
        type=click.IntRange(min=1),
        default=DEFAULT_TRIALS,
        show_default=True,
        help="Independent generic trials; the mode is reported.",
    )(func)


@click.group(cls=_LgGroup)
@click.option("--seed", type=int, default=None, help="Seed for every random choice [env LG_SEED].")
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Tracker worker processes [env LG_THREADS].")
@click.option(
    "--start",
    type=click.Choice([kind.value for kind in StartKind]),
    default=None,
    help="Start system: total degree or multihomogeneous [env LG_START].",
)
@click.option("--max-paths", type=click.IntRange(min=1), default=None, help="Path cap [env LG_MAX_PATHS].")
@click.option("--log-level", default=None, help="Logging level [env LG_LOG_LEVEL].")
@click.pass_context
def cli(
    ctx: click.Context,
    seed: int | None,
    threads: int | None,
    start: str | None,
    max_paths: int | None,
    log_level: str | None,
) -> None:
    """Likelihood geometry toolkit."""
    settings = load_settings()
    logging.basicConfig(
        level=(log_level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    overrides: dict[str, object] = {}
    if seed is not None:
        overrides["seed"] = seed
    if threads is not None:
        overrides["threads"] = threads
    if start is not None:
        overrides["start_kind"] = StartKind(start)
    if max_paths is not None:
        overrides["max_paths"] = max_paths
    ctx.obj = TrackerConfig.from_settings(settings, **overrides)
    LOGGER.debug("tracker config: %s", ctx.obj)


# -- ML degrees ---------------------------------------------------------------------------


@cli.command("mldegree")
@click.argument("model")
@_trials_option
@click.pass_context
def mldegree_command(ctx: click.Context, model: str, trials: int) -> None:
    """Count critical points of MODEL for generic data."""
    report = ml_degree(_critical_model(model), _config(ctx), trials)
    _emit(report.to_json())
    _finish(unstable=not report.stable)


@cli.command("mle")
@click.argument("model")
@click.option("--u", "data", required=True, help="Data as 1,2,1, a JSON array or a JSON file.")
@click.pass_context
def mle_command(ctx: click.Context, model: str, data: str) -> None:
    """All complex critical points of MODEL for the data U."""
    config = _config(ctx)
    resolved = _critical_model(model)
    u = _data(data)
    if isinstance(resolved, LinearModel):
        result = mle_linear(resolved, u, config)
    else:
        result = solve(resolved.critical_system(u, config.rng()), config)
    _emit(result.to_json())


@cli.command("sectional")
@click.argument("model")
@_trials_option
@click.pass_context
def sectional_command(ctx: click.Context, model: str, trials: int) -> None:
    """Sectional ML degree of an implicit MODEL."""
    report = sectional_ml_degree(_variety(model), _config(ctx), trials)
    _emit(report.to_json())
    _finish(unstable=not report.stable)


@cli.command("bidegree")
@click.argument("model")
@_trials_option
@click.pass_context
def bidegree_command(ctx: click.Context, model: str, trials: int) -> None:
    """ML bidegree of an implicit MODEL through the sectional ML degree."""
    report = ml_bidegree(_variety(model), _config(ctx), trials)
    _emit(report.to_json())
    _finish(unstable=not report.stable, finding=report.holds is False)


@cli.command("ci-formula")
@click.argument("n", type=click.IntRange(min=1))
@click.argument("degrees")
@click.option("--map", "as_map", is_flag=True, help="Image of a generic map of N parameters instead.")
def ci_formula_command(n: int, degrees: str, *, as_map: bool) -> None:
    """Closed-form ML degree for generic complete intersections of DEGREES in P^N."""
    values = list(parse_int_list(degrees))
    value = generic_map_ml_degree(n, values) if as_map else generic_ci_ml_degree(n, values)
    _emit({"n": n, "degrees": values, "map": as_map, "mlDegree": value})


@cli.command("split-check")
@click.argument("model")
@click.option("--coord", type=int, default=None, help="Coordinate to restrict (default: the last one).")
@_trials_option
@click.pass_context
def split_check_command(ctx: click.Context, model: str, coord: int | None, trials: int) -> None:
    """Check ML degree = slice count + data-zero count at one coordinate."""
    resolved = _load_model(model)
    if not isinstance(resolved, RestrictableModel):
        msg = f"{model} cannot be restricted to a coordinate hyperplane"
        raise InputError(msg)
    check = restriction_split_check(resolved, _config(ctx), coord, trials)
    _emit(check.to_json())
    _finish(unstable=not check.stable, finding=not check.holds)


@cli.command("matroid")
@click.argument("model")
def matroid_command(model: str) -> None:
    """Matroid invariants and ML bidegree of a linear MODEL."""
    resolved = _load_model(model)
    if isinstance(resolved, VarietySpec):
        resolved = LinearModel.from_variety(resolved)
    if not isinstance(resolved, LinearModel):
        msg = f"{model} is not a linear model"
        raise InputError(msg)
    matroid = arrangement_matroid(resolved)
    bidegree = linear_ml_bidegree(resolved)
    _emit({
        "rank": matroid.full_rank,
        "size": matroid.size,
        "characteristicPolynomial": characteristic_polynomial(matroid).to_text(),
        "hVector": list(broken_circuit_hvector(matroid)),
        "bidegree": bidegree.to_json(),
        "mlDegree": bidegree.leading,
    })


# -- toric -------------------------------------------------------------------------------


def _toric(source: str) -> ToricModel:
    model = _load_model(source)
    if not isinstance(model, ToricModel):
        msg = f"{source} is not a toric model"
        raise InputError(msg)
    return model


@cli.command("toric-mle")
@click.argument("model")
@click.option("--u", "data", required=True, help="Positive data.")
@click.option("--tol", type=float, default=DEFAULT_GP_TOL, show_default=True)
def toric_mle_command(model: str, data: str, tol: float) -> None:
    """MLE of a toric MODEL with positive coefficients by Birch's theorem."""
    _emit(birch_mle(_toric(model), _data(data), tol).to_json())


@cli.command("toric-mldeg")
@click.argument("model")
@_trials_option
@click.pass_context
def toric_mldeg_command(ctx: click.Context, model: str, trials: int) -> None:
    """ML degree of a toric MODEL with any nonzero coefficients."""
    report = toric_ml_degree(_toric(model), _config(ctx), trials)
    _emit(report.to_json())
    _finish(unstable=not report.stable)


@cli.command("toric-volume")
@click.argument("matrix")
def toric_volume_command(matrix: str) -> None:
    """Normalized volume of the polytope of the columns of MATRIX, divided by the lattice index."""
    _emit({"volume": normalized_volume(coerce_int_matrix(_matrix(matrix)))})


# -- Horn ---------------------------------------------------------------------------------


def _horn(source: str | None, name: str | None) -> HornModel:
    if name is not None:
        return horn_model(name)
    if source is None:
        msg = "Give a Horn model file or --model NAME"
        raise InputError(msg)
    model = _load_model(source)
    if not isinstance(model, HornModel):
        msg = f"{source} is not a Horn model"
        raise InputError(msg)
    return model


_HORN_NAMES = click.Choice(sorted(HORN_MODELS))


@cli.command("horn-mle")
@click.argument("model_file", required=False)
@click.option("--model", "name", type=_HORN_NAMES, default=None, help="Catalog Horn model.")
@click.option("--u", "data", required=True, help="Data as 1,2,1, a JSON array or a JSON file.")
def horn_mle_command(model_file: str | None, name: str | None, data: str) -> None:
    """Exact MLE of an ML-degree-one model."""
    estimate = horn_mle(_horn(model_file, name), _data(data))
    _emit([format_rational(v) for v in estimate])


@cli.command("horn-verify")
@click.argument("model_file", required=False)
@click.option("--model", "name", type=_HORN_NAMES, default=None, help="Catalog Horn model.")
@click.option("--trials", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--track/--no-track", default=True, show_default=True, help="Also confirm with the tracker.")
@click.pass_context
def horn_verify_command(
    ctx: click.Context, model_file: str | None, name: str | None, trials: int, *, track: bool
) -> None:
    """Verify that the Horn estimator is the unique critical point."""
    outcome = verify_ml_degree_one(_horn(model_file, name), trials, _config(ctx), track=track)
    _emit(outcome.to_json())
    _finish(finding=not outcome.holds)


# -- determinantal ------------------------------------------------------------------------


@cli.command("rank-critical")
@click.argument("m", type=click.IntRange(min=1))
@click.argument("n", type=click.IntRange(min=1))
@click.argument("r", type=click.IntRange(min=1))
@click.argument("data")
@click.option("--trials", type=click.IntRange(min=1), default=1, show_default=True)
@click.pass_context
def rank_critical_command(ctx: click.Context, m: int, n: int, r: int, data: str, trials: int) -> None:
    """Critical points on M×N matrices of rank R for the data matrix DATA."""
    points = rank_critical_points(m, n, r, _matrix(data), _config(ctx), trials=trials)
    _emit({"count": len(points), "points": [point.to_json() for point in points]})


@cli.command("duality")
@click.argument("m", type=click.IntRange(min=1))
@click.argument("n", type=click.IntRange(min=1))
@click.argument("r", type=click.IntRange(min=1))
@click.argument("data")
@click.pass_context
def duality_command(ctx: click.Context, m: int, n: int, r: int, data: str) -> None:
    """Pair rank-R and rank-(M-R+1) critical points through Ω_U."""
    if r > m or m - r + 1 > min(m, n):
        msg = f"Ranks {r} and {m - r + 1} must both fit {m}x{n} matrices"
        raise InputError(msg)
    U = _matrix(data)
    config = _config(ctx)
    sols_r = rank_critical_points(m, n, r, U, config)
    sols_s = rank_critical_points(m, n, m - r + 1, U, config)
    report = duality_pairing(sols_r, sols_s, U)
    payload = report.to_json()
    payload["counts"] = [len(sols_r), len(sols_s)]
    payload["omega"] = format_omega(omega_matrix(U))
    _emit(payload)
    _finish(finding=not report.holds)


@cli.command("em")
@click.argument("data")
@click.option("--rank", "r", type=click.IntRange(min=1), required=True)
@click.option("--max-iters", type=click.IntRange(min=1), default=DEFAULT_EM_ITERS, show_default=True)
@click.option("--tol", type=float, default=DEFAULT_EM_TOL, show_default=True)
@click.pass_context
def em_command(ctx: click.Context, data: str, r: int, max_iters: int, tol: float) -> None:
    """Fit a mixture of R independence models to DATA by EM."""
    result = em_mixture(_matrix(data), r, rng=_config(ctx).rng(), max_iters=max_iters, tol=tol)
    _emit(result.to_json())


@cli.command("supermodular")
@click.argument("tensor")
def supermodular_command(tensor: str) -> None:
    """Test a nonnegative 2×2×2 TENSOR for supermodularity up to label swaps."""
    raw = _read_json(tensor)
    if not isinstance(raw, list):
        msg = "Tensor must be a nested JSON array"
        raise InputError(msg)
    _emit({"supermodular": supermodular_222(raw)})


# -- catalog and acceptance -------------------------------------------------------------------


@cli.command("catalog")
@click.argument("name", required=False)
def catalog_command(name: str | None) -> None:
    """List catalog models, or show one."""
    if name is not None:
        _emit(catalog_entry(name).to_json())
        return
    _emit([entry.to_json() for entry in CATALOG.values()])


@cli.command("reproduce")
@click.option("--tier", type=click.Choice([tier.value for tier in Tier]), default=Tier.FAST.value, show_default=True)
@click.option("--only", multiple=True, help="Run only the named checks.")
@click.pass_context
def reproduce_command(ctx: click.Context, tier: str, only: Sequence[str]) -> None:
    """Run the acceptance checks up to TIER, one JSON row per check."""
    results = run_checks(Tier(tier), _config(ctx), only=only)
    for result in results:
        _emit(result.to_json())
    passed = sum(result.passed for result in results)
    click.echo(f"{passed}/{len(results)} checks passed", err=True)
    _finish(finding=passed != len(results))


def main(argv: Sequence[str] | None = None) -> int:
    """Console entry point.

    Returns:
        int: Process exit code.

    """
    try:
        result = cli.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.exceptions.Abort:
        return EXIT_INPUT
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
