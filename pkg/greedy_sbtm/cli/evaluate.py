"""Evaluation command: evaluate."""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np
import structlog
import typer
from rich.console import Console
from rich.table import Table

from greedy_sbtm.cli.common import check_table_format, fail, input_paths, resolve_output_dir
from greedy_sbtm.evaluation import groups_per_frame, k_recovery, nmi_per_frame, write_table
from greedy_sbtm.evaluation.metrics import NMI_AVERAGE_METHOD
from greedy_sbtm.inference import read_allocation
from greedy_sbtm.ingestion import SBTMError
from greedy_sbtm.models.manifest import RunManifest

logger = structlog.get_logger(__name__)


def evaluate_command(
    z_hat: Path = typer.Option(..., "--z-hat", exists=True, dir_okay=False, help="Estimated allocation CSV"),
    z_true: Path = typer.Option(..., "--z-true", exists=True, dir_okay=False, help="True allocation CSV"),
    table_format: str = typer.Option("csv", "--table-format", help="Summary tables: csv or parquet"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Output directory"),
) -> None:
    """
    Compare an estimated allocation with the truth frame by frame.

    Writes nmi.csv (frame, nmi) and groups.csv (frame, k_hat, k_true); NMI is
    normalised by the geometric mean of the entropies and is NA for frames
    without active nodes.
    """
    fmt = check_table_format(table_format)
    started = time.perf_counter()
    try:
        estimated = read_allocation(z_hat)
        truth = read_allocation(z_true)
        scores = nmi_per_frame(estimated, truth)
    except SBTMError as e:
        fail(str(e))

    out = resolve_output_dir(out)
    frames = np.arange(estimated.n_frames)
    k_est, k_ref = groups_per_frame(estimated), groups_per_frame(truth)
    write_table(out / "nmi", {"frame": frames, "nmi": scores}, fmt)
    write_table(out / "groups", {"frame": frames, "k_hat": k_est, "k_true": k_ref}, fmt)

    defined = scores[~np.isnan(scores)]
    median = float(np.median(defined)) if defined.size else float("nan")
    recovery = k_recovery(estimated, truth)
    RunManifest(
        command="evaluate",
        inputs=input_paths(z_hat=z_hat, z_true=z_true),
        config={"nmi_normalisation": NMI_AVERAGE_METHOD, "table_format": fmt},
        wall_time=time.perf_counter() - started,
        results={"median_nmi": median, "k_recovery": recovery, "frames_undefined": int(np.isnan(scores).sum())},
    ).write(out / "manifest.txt")

    table = Table(title="Evaluation")
    table.add_column("metric")
    table.add_column("value", justify="right")
    table.add_row("frames", str(estimated.n_frames))
    table.add_row("median NMI", "NA" if np.isnan(median) else f"{median:.4f}")
    table.add_row("K recovered", f"{recovery:.1%}")
    table.add_row("mean K (estimated / true)", f"{k_est.mean():.2f} / {k_ref.mean():.2f}")
    Console(stderr=True).print(table)
    logger.info("evaluation_written", out=str(out), median_nmi=median, k_recovery=recovery)
    typer.echo(f"median_nmi={'NA' if np.isnan(median) else f'{median:.6f}'} k_recovery={recovery:.6f}")
