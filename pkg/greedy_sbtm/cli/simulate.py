"""Simulation command: simulate."""

from __future__ import annotations

import time
from pathlib import Path

import structlog
import typer

from greedy_sbtm.cli.common import fail, input_paths, load_priors, resolve_output_dir
from greedy_sbtm.inference.allocation import write_allocation
from greedy_sbtm.ingestion import SBTMError, write_cube
from greedy_sbtm.models.manifest import RunManifest
from greedy_sbtm.models.simulation import SimulationSettings
from greedy_sbtm.simulation import ModelParameters, SimOutput, simulate

logger = structlog.get_logger(__name__)


def write_simulation(sim: SimOutput, out: Path, seed: int | None) -> None:
    """Write cube, activity, true allocation and parameters of one dataset into ``out``."""
    write_cube(sim.cube, out / "cube.txt", out / "activity.txt")
    write_allocation(sim.z_true, out / "z_true.csv")
    sim.params.to_file(out / "params.txt", header={"seed": seed, **sim.regime_counts()})


def simulate_command(
    n: int = typer.Option(..., "--n", min=1, help="Number of nodes"),
    t: int = typer.Option(..., "--t", min=1, help="Number of frames"),
    k: int | None = typer.Option(None, "--k", min=1, help="Number of groups (required without --params)"),
    jeffreys: bool = typer.Option(False, "--jeffreys", help="Draw parameters from Jeffreys priors"),
    hyper: Path | None = typer.Option(
        None, "--hyper", exists=True, dir_okay=False, help="Key-value file overriding prior scalars"
    ),
    params: Path | None = typer.Option(
        None, "--params", exists=True, dir_okay=False, help="Fixed parameter file instead of priors"
    ),
    no_inactive: bool = typer.Option(False, "--no-inactive", help="Remove all transition mass into inactivity"),
    stay: float = typer.Option(
        0.8, "--stay", min=0.0, max=1.0, help="Stay probability when --params has no transition matrix"
    ),
    replicates: int = typer.Option(1, "--replicates", min=1, help="Number of independent datasets"),
    seed: int = typer.Option(0, "--seed", min=0, help="Root seed"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Output directory"),
) -> None:
    """
    Simulate dynamic networks from the stochastic block transition model.

    Writes cube.txt, activity.txt, z_true.csv, params.txt and manifest.txt
    (one rep_XXX sub-directory per dataset when --replicates > 1).
    """
    if params is not None and (jeffreys or hyper is not None):
        raise typer.BadParameter("--params excludes --jeffreys and --hyper", param_hint="--params")
    if params is None and k is None:
        raise typer.BadParameter("--k is required unless --params is given", param_hint="--k")
    started = time.perf_counter()
    try:
        priors = load_priors(hyper, jeffreys)
        if params is not None:
            source = ModelParameters.from_file(params, stay=stay, allow_inactive=not no_inactive)
            if k is not None and k != source.k:
                fail(f"--k {k} does not match the {source.k} groups of {params}")
            k = source.k
        else:
            source = priors.expand(k)
        run = SimulationSettings(
            n=n, t=t, k=k, no_inactive=no_inactive, stay=stay, replicates=replicates, seed=seed
        )
        out = resolve_output_dir(out)
        for rep, child in enumerate(run.replicate_seeds()):
            target = out if replicates == 1 else out / f"rep_{rep:03d}"
            target.mkdir(parents=True, exist_ok=True)
            sim = simulate(run.n, run.t, run.k, source, child, no_inactive=run.no_inactive)
            write_simulation(sim, target, seed)
            RunManifest(
                command="simulate",
                inputs=input_paths(hyper=hyper, params=params),
                config={**run.model_dump(exclude={"seed"}), "replicate": rep},
                hyperparameters=priors.model_dump() if params is None else {},
                seed=seed,
                wall_time=time.perf_counter() - started,
                results={
                    "edges": int(sim.cube.edges_per_frame().sum()),
                    "inactive_fraction": sim.cube.activity.inactive_fraction,
                },
            ).write(target / "manifest.txt")
    except SBTMError as e:
        fail(str(e))

    logger.info("simulation_written", out=str(out), replicates=replicates)
    typer.echo(f"[OK] Simulated {replicates} dataset(s) with N={n} T={t} K={k} into {out}")
