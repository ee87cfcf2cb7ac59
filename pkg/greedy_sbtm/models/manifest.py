"""Run manifests: everything needed to reproduce a CLI run, as key-value text."""

from __future__ import annotations

import math
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field

from greedy_sbtm import __version__
from greedy_sbtm.ingestion.io import read_key_values


class RunManifest(BaseModel):
    """Record of one CLI invocation."""

    command: str = Field(..., description="Subcommand name")
    inputs: dict[str, str] = Field(default_factory=dict, description="Input file paths by role")
    config: dict[str, Any] = Field(default_factory=dict, description="Effective configuration")
    hyperparameters: dict[str, float] = Field(default_factory=dict, description="Prior scalars")
    seed: int | None = Field(default=None, description="Root seed")
    version: str = Field(default=__version__, description="greedy-sbtm version")
    created_at: str = Field(default_factory=lambda: datetime.now(UTC).isoformat(timespec="seconds"))
    wall_time: float | None = Field(default=None, ge=0, description="Seconds spent in the command")
    log_icl: float | None = Field(default=None, description="Resulting log ICL")
    k_hat: int | None = Field(default=None, ge=0, description="Resulting number of groups")
    results: dict[str, Any] = Field(default_factory=dict, description="Other scalar results")

    def to_lines(self) -> list[str]:
        """Flatten to sorted ``key = value`` lines; mappings become dotted keys."""
        lines: list[str] = []
        for key, value in self.model_dump().items():
            if isinstance(value, dict):
                lines.extend(f"{key}.{sub} = {_render(v)}" for sub, v in sorted(value.items()))
            elif value is not None:
                lines.append(f"{key} = {_render(value)}")
        return lines

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self.to_lines()) + "\n", encoding="utf-8")
        return path


def _render(value: object) -> str:
    if value is None:
        return "NA"
    if isinstance(value, float):
        return "NA" if math.isnan(value) else repr(value)
    if isinstance(value, bool):
        return str(value).lower()
    return str(value)


def read_manifest(path: str | Path) -> dict[str, str]:
    """Read a manifest back as a flat ``key -> raw value`` mapping."""
    return {key: value for key, (value, _) in read_key_values(path).items()}
