"""Prior hyperparameters.

``PriorSettings`` holds one scalar per hyperparameter family (the form the CLI
accepts); ``Hyperparameters`` holds the matrix-valued set used by the ICL and
the simulator, indexed by state (row/column 0 is the inactive state).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from greedy_sbtm.ingestion.exceptions import ArgumentError, InputError
from greedy_sbtm.ingestion.io import read_key_values

JEFFREYS = 0.5


@dataclass(frozen=True, eq=False)
class Hyperparameters:
    """
    Matrix-valued prior hyperparameters for ``K_up`` groups.

    Every array has shape ``(K_up + 1, K_up + 1)``. ``delta`` rows are the Dirichlet
    parameters of the transition rows of states ``0..K_up``; the six Beta families
    are indexed by group labels, with row/column 0 unused.
    """

    delta: np.ndarray
    eta0: np.ndarray
    zeta0: np.ndarray
    a_p: np.ndarray
    b_p: np.ndarray
    a_q: np.ndarray
    b_q: np.ndarray

    def __post_init__(self) -> None:
        shape = np.shape(self.delta)
        if len(shape) != 2 or shape[0] != shape[1] or shape[0] < 2:
            raise ArgumentError(f"delta must be a square (K_up+1) matrix, got shape {shape}")
        for name in ("delta", "eta0", "zeta0", "a_p", "b_p", "a_q", "b_q"):
            value = np.array(getattr(self, name), dtype=np.float64)
            if value.shape != shape:
                raise ArgumentError(f"{name} has shape {value.shape}, expected {shape}")
            used = value if name == "delta" else value[1:, 1:]
            if not np.all(np.isfinite(used)) or np.any(used <= 0):
                raise ArgumentError(f"hyperparameter {name} must be strictly positive")
            if name != "delta":
                if not np.allclose(used, used.T):
                    raise ArgumentError(f"hyperparameter {name} must be symmetric")
                # Inactive row/column never carries counts; keep it finite under gammaln.
                value[0, :] = 1.0
                value[:, 0] = 1.0
            object.__setattr__(self, name, value)

    @property
    def k_up(self) -> int:
        return int(self.delta.shape[0] - 1)

    @classmethod
    def jeffreys(cls, k_up: int) -> Hyperparameters:
        """All hyperparameters equal to 0.5."""
        return PriorSettings().expand(k_up)

    def beta_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Stacked ``(a, b)`` arrays of the (Theta, P, Q) families, each of shape (3, K1, K1)."""
        return (
            np.stack([self.eta0, self.a_p, self.a_q]),
            np.stack([self.zeta0, self.b_p, self.b_q]),
        )


class PriorSettings(BaseModel):
    """One strictly positive scalar per hyperparameter family (Jeffreys by default)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    delta: float = Field(default=JEFFREYS, gt=0, description="Dirichlet parameter of transition rows")
    eta0: float = Field(default=JEFFREYS, gt=0, description="Beta prior on Theta, first shape")
    zeta0: float = Field(default=JEFFREYS, gt=0, description="Beta prior on Theta, second shape")
    a_p: float = Field(default=JEFFREYS, gt=0, description="Beta prior on P, first shape")
    b_p: float = Field(default=JEFFREYS, gt=0, description="Beta prior on P, second shape")
    a_q: float = Field(default=JEFFREYS, gt=0, description="Beta prior on Q, first shape")
    b_q: float = Field(default=JEFFREYS, gt=0, description="Beta prior on Q, second shape")

    def expand(self, k_up: int) -> Hyperparameters:
        """Broadcast the scalars to ``(k_up + 1) x (k_up + 1)`` matrices."""
        if k_up < 1:
            raise ArgumentError(f"k_up must be at least 1, got {k_up}")
        shape = (k_up + 1, k_up + 1)
        return Hyperparameters(**{name: np.full(shape, value) for name, value in self.model_dump().items()})

    @classmethod
    def from_file(cls, path: str | Path) -> PriorSettings:
        """
        Read scalar overrides from a ``key = value`` file.

        Raises:
            InputError: Naming the line of a malformed entry, unknown key or invalid value.
        """
        values: dict[str, float] = {}
        for key, (value, line_number) in read_key_values(path).items():
            if key not in cls.model_fields:
                raise InputError(f"unknown hyperparameter {key!r}", path, line_number)
            try:
                values[key] = float(value)
                cls.model_validate({key: values[key]})
            except (ValueError, ValidationError) as e:
                raise InputError(f"invalid value for {key}: {value!r}", path, line_number) from e
        return cls(**values)
