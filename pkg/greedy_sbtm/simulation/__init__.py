"""Simulation from the stochastic block transition model."""

from greedy_sbtm.simulation.generator import (
    SimOutput,
    sample_allocations,
    sample_edges,
    sample_params,
    simulate,
    simulate_replicates,
)
from greedy_sbtm.simulation.params import (
    ModelParameters,
    persistent_transitions,
    stationary_distribution,
    study_two_parameters,
)

__all__ = [
    "ModelParameters",
    "SimOutput",
    "persistent_transitions",
    "sample_allocations",
    "sample_edges",
    "sample_params",
    "simulate",
    "simulate_replicates",
    "stationary_distribution",
    "study_two_parameters",
]
