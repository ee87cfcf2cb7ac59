"""Helpers shared by the CLI commands."""

from __future__ import annotations

from pathlib import Path
from typing import NoReturn

import structlog
import typer

from greedy_sbtm.evaluation.tables import TableFormat
from greedy_sbtm.ingestion import AdjacencyCube, discretize, read_cube, read_edge_list, validate
from greedy_sbtm.models.priors import PriorSettings
from greedy_sbtm.utils.config import ensure_directories, get_settings

logger = structlog.get_logger(__name__)

TABLE_FORMATS: tuple[TableFormat, ...] = ("csv", "parquet")


def fail(message: str, **context: object) -> NoReturn:
    """Log the failure, print it on stderr and exit with status 1."""
    logger.error("command_failed", error=message, **context)
    typer.echo(f"[FAIL] {message}", err=True)
    raise typer.Exit(code=1)


def resolve_output_dir(out: Path | None) -> Path:
    """``out`` if given, otherwise the configured output directory; created if missing."""
    if out is None:
        ensure_directories()
        out = Path(get_settings().output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def check_table_format(value: str) -> TableFormat:
    if value not in TABLE_FORMATS:
        raise typer.BadParameter(f"must be one of {', '.join(TABLE_FORMATS)}", param_hint="--table-format")
    return value  # type: ignore[return-value]


def load_priors(hyper: Path | None, jeffreys: bool = False) -> PriorSettings:
    """Jeffreys priors, optionally overridden by a key-value file."""
    if hyper is not None and jeffreys:
        raise typer.BadParameter("--hyper and --jeffreys are mutually exclusive", param_hint="--hyper")
    return PriorSettings() if hyper is None else PriorSettings.from_file(hyper)


def load_cube(
    cube: Path | None,
    activity: Path | None,
    edges: Path | None,
    frame_width: float | None,
    time_origin: float | None,
) -> AdjacencyCube:
    """
    Read the network from a cube file or discretise an edge list.

    Exactly one of ``cube`` and ``edges`` must be given; ``edges`` needs ``frame_width``.
    A network that fails :func:`greedy_sbtm.ingestion.validate` ends the command
    with status 1, naming the first violation.
    """
    if (cube is None) == (edges is None):
        raise typer.BadParameter("give exactly one of --cube and --edges", param_hint="--cube")
    if cube is not None:
        network = read_cube(cube, activity)
    elif frame_width is None:
        raise typer.BadParameter("--frame-width is required with --edges", param_hint="--frame-width")
    else:
        network = discretize(read_edge_list(edges, time_origin=time_origin), frame_width, time_origin=time_origin)

    report = validate(network)
    if not report.is_valid:
        first = report.violations[0]
        fail(
            f"{len(report)} violation(s) in the network, first: {first.kind} at t={first.t} "
            f"i={first.i} j={first.j}; run 'greedy-sbtm validate' for the full list",
            path=str(cube or edges),
        )
    return network


def input_paths(**paths: Path | None) -> dict[str, str]:
    return {role: str(p) for role, p in paths.items() if p is not None}
