"""Configuration of simulation runs."""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from greedy_sbtm.models.fit import MAX_SEED


class SimulationSettings(BaseModel):
    """Sizes, options and seed of one ``simulate`` run (possibly several replicates)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n: int = Field(..., ge=1, description="Number of nodes")
    t: int = Field(..., ge=1, description="Number of frames")
    k: int = Field(..., ge=1, description="Number of groups")
    no_inactive: bool = Field(default=False, description="Remove all transition mass into inactivity")
    stay: float = Field(
        default=0.8, ge=0.0, le=1.0, description="Stay probability when no transition matrix is given"
    )
    replicates: int = Field(default=1, ge=1, description="Number of independent datasets")
    seed: int = Field(default=0, ge=0, le=MAX_SEED, description="Root seed")

    def replicate_seeds(self) -> list[np.random.SeedSequence]:
        """One child seed per replicate; replicate r is the same whatever the replicate count."""
        return np.random.SeedSequence(self.seed).spawn(self.replicates)
