"""Pydantic models and result records for model fitting."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Literal

from pydantic import BaseModel, ConfigDict, Field

if TYPE_CHECKING:
    from greedy_sbtm.inference.allocation import AllocationMatrix

InitMethod = Literal["random", "kmeans-profile"]

MAX_SEED = 2**64 - 1


class FitConfig(BaseModel):
    """Configuration of one :func:`greedy_sbtm.inference.greedy.fit` call."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    k_up: int = Field(..., ge=1, description="Maximum number of groups")
    n_restarts: int = Field(default=5, ge=1, description="Independent restarts")
    init_method: InitMethod = Field(default="kmeans-profile", description="Initial allocation strategy")
    seed: int = Field(default=0, ge=0, le=MAX_SEED, description="Root seed of every random stream")
    max_sweeps: int = Field(default=100, ge=1, description="Safety cap on sweeps per restart")
    resweep_after_merge: bool = Field(
        default=False, description="Run further sweeps after a successful merge phase"
    )
    threads: int | None = Field(default=None, ge=1, description="Worker threads for restarts")
    tolerance: float = Field(default=1e-12, ge=0, description="Minimal improvement counted as progress")


@dataclass(frozen=True)
class TraceEntry:
    """Criterion value at the end of one stage of a restart."""

    stage: Literal["init", "sweeps", "merges"]
    log_icl: float
    n_groups: int


@dataclass(frozen=True)
class FitResult:
    """
    Best allocation found over all restarts.

    ``k_hat`` always equals the number of distinct nonzero labels of ``z_hat``, whose
    labels are compacted to ``1..k_hat``.
    """

    z_hat: AllocationMatrix
    log_icl: float
    k_hat: int
    n_sweeps: int
    restart_index: int
    wall_time: float
    n_merges: int = 0
    alpha_fallback: bool = False
    trace: tuple[TraceEntry, ...] = field(default=())

    def summary_line(self) -> str:
        """Machine-parsable one-line summary."""
        return (
            f"log_icl={self.log_icl:.6f} k={self.k_hat} sweeps={self.n_sweeps} seconds={self.wall_time:.3f}"
        )


@dataclass(frozen=True)
class KUpSearchResult:
    """
    Best fit over several values of ``k_up``.

    Attributes:
        best: The retained fit.
        k_up: The ``k_up`` value that produced it.
        log_icl_by_k_up: Final log ICL of every value tried, in the order tried.
    """

    best: FitResult
    k_up: int
    log_icl_by_k_up: dict[int, float]
