"""Data commands: discretize, validate."""

from __future__ import annotations

from pathlib import Path

import structlog
import typer
from rich.console import Console
from rich.table import Table

from greedy_sbtm.cli.common import fail, input_paths, resolve_output_dir
from greedy_sbtm.ingestion import (
    SBTMError,
    derive_activity,
    discretize,
    list_activity_rules,
    read_cube,
    read_edge_list,
    read_presence,
    validate,
    write_cube,
    write_node_ids,
)
from greedy_sbtm.models.manifest import RunManifest

logger = structlog.get_logger(__name__)

_MAX_LISTED = 20


def discretize_command(
    edges: Path = typer.Option(..., "--edges", exists=True, dir_okay=False, help="Timestamped edge list"),
    frame_width: float = typer.Option(..., "--frame-width", help="Frame duration"),
    time_origin: float | None = typer.Option(None, "--time-origin", help="Start of frame 0"),
    activity_rule: str = typer.Option("degree", "--activity-rule", help="Registered activity rule"),
    presence: Path | None = typer.Option(
        None, "--presence", exists=True, dir_okay=False,
        help="Presence file ('t node_id' lines); required by --activity-rule explicit",
    ),
    out: Path | None = typer.Option(None, "--out", "-o", help="Output directory"),
) -> None:
    """Bucket an edge list into frames; writes cube.txt, activity.txt and node_ids.csv."""
    if activity_rule not in list_activity_rules():
        raise typer.BadParameter(
            f"must be one of {', '.join(list_activity_rules())}", param_hint="--activity-rule"
        )
    explicit = activity_rule == "explicit"
    if explicit and presence is None:
        raise typer.BadParameter("--activity-rule explicit needs a presence file", param_hint="--presence")
    if presence is not None and not explicit:
        raise typer.BadParameter("only used with --activity-rule explicit", param_hint="--presence")
    try:
        events = read_edge_list(edges, time_origin=time_origin)
        if explicit:
            # Node ids and frame count are only known once the events are bucketed.
            cube = discretize(events, frame_width, time_origin)
            present = read_presence(presence, cube.node_ids, cube.n_frames)
            cube = cube.with_activity(derive_activity(cube, "explicit", presence=present))
        else:
            cube = discretize(events, frame_width, time_origin, activity_rule)
    except SBTMError as e:
        fail(str(e))

    out = resolve_output_dir(out)
    write_cube(cube, out / "cube.txt", out / "activity.txt")
    write_node_ids(cube, out / "node_ids.csv")
    inactive = cube.activity.inactive_fraction
    RunManifest(
        command="discretize",
        inputs=input_paths(edges=edges, presence=presence),
        config={"frame_width": frame_width, "time_origin": time_origin, "activity_rule": activity_rule},
        results={
            "nodes": cube.n_nodes,
            "frames": cube.n_frames,
            "edges": int(cube.edges_per_frame().sum()),
            "inactive_fraction": inactive,
        },
    ).write(out / "manifest.txt")
    typer.echo(f"[OK] N={cube.n_nodes} T={cube.n_frames} inactive_fraction={inactive:.4f} -> {out}")


def validate_command(
    cube: Path = typer.Option(..., "--cube", exists=True, dir_okay=False, help="Cube file"),
    activity: Path | None = typer.Option(None, "--activity", exists=True, dir_okay=False, help="Activity file"),
) -> None:
    """Check symmetry, the diagonal, binarity and edges between inactive nodes; exit 1 on violations."""
    try:
        report = validate(read_cube(cube, activity))
    except SBTMError as e:
        fail(str(e))

    if report.is_valid:
        typer.echo(f"[OK] {cube} is a valid cube")
        return

    table = Table(title=f"{len(report)} violation(s)")
    for column in ("t", "i", "j", "kind"):
        table.add_column(column)
    for v in report.violations[:_MAX_LISTED]:
        table.add_row(str(v.t), str(v.i), str(v.j), v.kind)
    Console(stderr=True).print(table)
    fail(f"{len(report)} violation(s): {report.counts()}", path=str(cube))
