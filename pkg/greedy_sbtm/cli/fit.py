"""Model commands: fit, icl."""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np
import structlog
import typer

from greedy_sbtm.cli.common import (
    check_table_format,
    fail,
    input_paths,
    load_cube,
    load_priors,
    resolve_output_dir,
)
from greedy_sbtm.evaluation import (
    aggregated_group_sizes,
    group_size_trajectories,
    plugin_estimates,
    write_matrix,
    write_table,
)
from greedy_sbtm.evaluation.tables import TableFormat
from greedy_sbtm.inference import (
    compute_stats,
    fit_k_up_grid,
    log_icl_full,
    read_allocation,
    write_allocation,
)
from greedy_sbtm.ingestion import AdjacencyCube, SBTMError, write_node_ids
from greedy_sbtm.models.fit import FitConfig, FitResult
from greedy_sbtm.models.manifest import RunManifest
from greedy_sbtm.utils.config import get_settings

logger = structlog.get_logger(__name__)

_CUBE_HELP = "Cube file (header 'N T', then 't i j' lines)"
_ACTIVITY_HELP = "Activity file ('t i' lines); default: nodes with edges"


def write_fit_outputs(cube: AdjacencyCube, result: FitResult, out: Path, table_format: TableFormat) -> None:
    """Write the fitted allocation, plug-in estimates and group-size tables into ``out``."""
    write_allocation(result.z_hat, out / "z_hat.csv")
    if cube.node_ids is not None:
        write_node_ids(cube, out / "node_ids.csv")

    stats = compute_stats(cube, result.z_hat)
    k_hat = result.k_hat
    estimates = plugin_estimates(stats)
    groups = list(range(1, k_hat + 1))
    for name in ("theta_hat", "p_hat", "q_hat"):
        matrix = getattr(estimates, name)[:k_hat, :k_hat]
        write_matrix(out / name, matrix, groups, groups, table_format, index_name="group")
    states = list(range(k_hat + 1))
    write_matrix(
        out / "pi_hat", estimates.pi_hat[: k_hat + 1, : k_hat + 1], states, states, table_format, index_name="state"
    )

    sizes = group_size_trajectories(result.z_hat)[: k_hat + 1]
    frames, labels = np.meshgrid(np.arange(cube.n_frames), np.arange(k_hat + 1))
    write_table(
        out / "trajectories",
        {"frame": frames.ravel(), "state": labels.ravel(), "size": sizes.ravel()},
        table_format,
    )
    write_table(
        out / "group_sizes",
        {"state": states, "size": aggregated_group_sizes(result.z_hat)[: k_hat + 1]},
        table_format,
    )


def fit_command(
    cube: Path | None = typer.Option(None, "--cube", exists=True, dir_okay=False, help=_CUBE_HELP),
    activity: Path | None = typer.Option(None, "--activity", exists=True, dir_okay=False, help=_ACTIVITY_HELP),
    edges: Path | None = typer.Option(
        None, "--edges", exists=True, dir_okay=False, help="Timestamped edge list to discretise"
    ),
    frame_width: float | None = typer.Option(None, "--frame-width", help="Frame duration for --edges"),
    time_origin: float | None = typer.Option(None, "--time-origin", help="Start of frame 0 for --edges"),
    k_ups: list[int] | None = typer.Option(
        None, "--kup", min=1, help="Maximum number of groups; repeat to fit each value and keep the best"
    ),
    restarts: int | None = typer.Option(None, "--restarts", min=1, help="Independent restarts"),
    init: str | None = typer.Option(None, "--init", help="Initialisation: random or kmeans-profile"),
    max_sweeps: int | None = typer.Option(None, "--max-sweeps", min=1, help="Sweep cap per restart"),
    resweep: bool = typer.Option(False, "--resweep-after-merge", help="Sweep again after merges"),
    threads: int | None = typer.Option(None, "--threads", min=1, help="Worker threads"),
    seed: int = typer.Option(0, "--seed", min=0, help="Root seed"),
    hyper: Path | None = typer.Option(
        None, "--hyper", exists=True, dir_okay=False, help="Key-value file overriding prior scalars"
    ),
    table_format: str = typer.Option("csv", "--table-format", help="Summary tables: csv or parquet"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Output directory"),
) -> None:
    """
    Fit the model by greedy exact-ICL maximisation.

    Prints 'log_icl=<v> k=<v> sweeps=<v> seconds=<v>' on standard output. The log
    ICL is only comparable between allocations of the same network. With several
    --kup values the best fit over all of them is kept.
    """
    settings = get_settings()
    fmt = check_table_format(table_format)
    init = init or settings.default_init
    if init not in ("random", "kmeans-profile"):
        raise typer.BadParameter("must be random or kmeans-profile", param_hint="--init")
    k_ups = k_ups or [settings.default_k_up]
    config = FitConfig(
        k_up=k_ups[0],
        n_restarts=restarts or settings.default_restarts,
        init_method=init,
        seed=seed,
        max_sweeps=max_sweeps or settings.default_max_sweeps,
        resweep_after_merge=resweep,
        threads=threads or settings.default_threads,
    )

    try:
        priors = load_priors(hyper)
        network = load_cube(cube, activity, edges, frame_width, time_origin)
        search = fit_k_up_grid(network, priors, config, k_ups)
        result = search.best
        out = resolve_output_dir(out)
        write_fit_outputs(network, result, out, fmt)
        RunManifest(
            command="fit",
            inputs=input_paths(cube=cube, activity=activity, edges=edges, hyper=hyper),
            config={
                **config.model_dump(exclude={"seed"}),
                "k_up": search.k_up,
                "k_up_grid": ",".join(str(k) for k in search.log_icl_by_k_up),
                "frame_width": frame_width,
                "time_origin": time_origin,
                "table_format": fmt,
            },
            hyperparameters=priors.model_dump(),
            seed=seed,
            wall_time=result.wall_time,
            log_icl=result.log_icl,
            k_hat=result.k_hat,
            results={
                "n_sweeps": result.n_sweeps,
                "n_merges": result.n_merges,
                "restart_index": result.restart_index,
                "alpha_fallback": result.alpha_fallback,
                **{f"trace_{entry.stage}": entry.log_icl for entry in result.trace},
                **{f"log_icl_kup_{k}": value for k, value in search.log_icl_by_k_up.items()},
            },
        ).write(out / "manifest.txt")
    except SBTMError as e:
        fail(str(e))

    typer.echo(result.summary_line())


def icl_command(
    cube: Path = typer.Option(..., "--cube", exists=True, dir_okay=False, help=_CUBE_HELP),
    z: Path = typer.Option(..., "--z", exists=True, dir_okay=False, help="Allocation CSV (N rows, T columns)"),
    activity: Path | None = typer.Option(None, "--activity", exists=True, dir_okay=False, help=_ACTIVITY_HELP),
    k_up: int | None = typer.Option(None, "--kup", min=1, help="Label bound (default: largest label)"),
    hyper: Path | None = typer.Option(
        None, "--hyper", exists=True, dir_okay=False, help="Key-value file overriding prior scalars"
    ),
    dump_stats: Path | None = typer.Option(
        None, "--dump-stats", dir_okay=False, help="Also write the sufficient statistics as text"
    ),
) -> None:
    """
    Print the exact log ICL of an allocation.

    Only differences between allocations of the same network are meaningful.
    """
    started = time.perf_counter()
    try:
        priors = load_priors(hyper)
        network = load_cube(cube, activity, None, None, None)
        allocation = read_allocation(z, k_up)
        stats = compute_stats(network, allocation)
        value = log_icl_full(stats, priors.expand(allocation.k_up))
    except SBTMError as e:
        fail(str(e))
    if dump_stats is not None:
        dump_stats.parent.mkdir(parents=True, exist_ok=True)
        dump_stats.write_text(stats.dump(), encoding="utf-8")
        logger.info("stats_dumped", path=str(dump_stats))
    logger.debug(
        "icl_evaluated",
        log_icl=value.log_icl,
        groups=value.n_groups,
        alpha_fallback=value.alpha_fallback,
        seconds=time.perf_counter() - started,
    )
    typer.echo(f"log_icl={value.log_icl:.10g} k={value.n_groups}")
