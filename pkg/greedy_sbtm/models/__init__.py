"""Pydantic models and result records."""

from greedy_sbtm.models.fit import FitConfig, FitResult, KUpSearchResult, TraceEntry
from greedy_sbtm.models.manifest import RunManifest, read_manifest
from greedy_sbtm.models.priors import Hyperparameters, PriorSettings
from greedy_sbtm.models.simulation import SimulationSettings

__all__ = [
    "FitConfig",
    "FitResult",
    "Hyperparameters",
    "KUpSearchResult",
    "PriorSettings",
    "RunManifest",
    "SimulationSettings",
    "TraceEntry",
    "read_manifest",
]
