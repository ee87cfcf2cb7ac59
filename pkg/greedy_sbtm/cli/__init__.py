"""Command-line interface for greedy-sbtm."""

import typer

from greedy_sbtm.utils.logging import setup_logging

from .data import discretize_command, validate_command
from .evaluate import evaluate_command
from .fit import fit_command, icl_command
from .simulate import simulate_command

app = typer.Typer(
    name="greedy-sbtm",
    help="Stochastic Block Transition Models for dynamic networks, fitted by exact ICL maximisation.",
    add_completion=False,
    no_args_is_help=True,
)


@app.callback()
def _configure(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log at DEBUG level (sweeps and merges)"),
) -> None:
    setup_logging("DEBUG" if verbose else None)


app.command("simulate")(simulate_command)
app.command("fit")(fit_command)
app.command("evaluate")(evaluate_command)
app.command("icl")(icl_command)
app.command("discretize")(discretize_command)
app.command("validate")(validate_command)


def main() -> None:
    """Entry point for the CLI."""
    app()


if __name__ == "__main__":
    main()
