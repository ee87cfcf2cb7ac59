"""Allocation matrices: per-node, per-frame group labels."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import structlog

from greedy_sbtm.ingestion.exceptions import ArgumentError, ConsistencyError, InputError

logger = structlog.get_logger(__name__)

INACTIVE = 0


@dataclass(eq=False)
class AllocationMatrix:
    """
    Group labels ``labels[i, t]`` in ``{0, ..., k_up}``; 0 is reserved for inactive nodes.

    The effective number of groups is never stored: it is the number of distinct
    nonzero labels in use.
    """

    labels: np.ndarray
    k_up: int

    def __post_init__(self) -> None:
        labels = np.array(self.labels, dtype=np.int64, copy=True)
        if labels.ndim != 2:
            raise ArgumentError(f"labels must be an N x T matrix, got shape {labels.shape}")
        if self.k_up < 1:
            raise ArgumentError(f"k_up must be at least 1, got {self.k_up}")
        if labels.size and (labels.min() < 0 or labels.max() > self.k_up):
            raise ArgumentError(f"labels must lie in 0..{self.k_up}")
        self.labels = labels

    @classmethod
    def from_activity(cls, active: np.ndarray, k_up: int, label: int = 1) -> AllocationMatrix:
        """Every active entry gets ``label``, inactive entries 0."""
        return cls(np.where(np.asarray(active, dtype=bool), label, INACTIVE), k_up)

    @property
    def n_nodes(self) -> int:
        return int(self.labels.shape[0])

    @property
    def n_frames(self) -> int:
        return int(self.labels.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_nodes, self.n_frames

    def copy(self) -> AllocationMatrix:
        return AllocationMatrix(self.labels.copy(), self.k_up)

    def nonempty_labels(self) -> np.ndarray:
        """Sorted labels in ``1..k_up`` used at least once."""
        used = np.unique(self.labels)
        return used[used != INACTIVE]

    @property
    def n_groups(self) -> int:
        """Number of nonempty groups K."""
        return int(self.nonempty_labels().size)

    def frame(self, t: int) -> np.ndarray:
        """Labels of the active nodes of frame t (zeros dropped)."""
        column = self.labels[:, t]
        return column[column != INACTIVE]

    def check_activity(self, active: np.ndarray) -> None:
        """
        Check the inactivity convention against an activity matrix.

        Raises:
            ConsistencyError: If an active entry is labelled 0 or an inactive entry is not.
        """
        if active.shape != self.labels.shape:
            raise ConsistencyError(
                f"allocation shape {self.labels.shape} does not match activity {active.shape}"
            )
        bad = np.argwhere(active != (self.labels != INACTIVE))
        if bad.size:
            i, t = (int(v) for v in bad[0])
            state = "active" if active[i, t] else "inactive"
            raise ConsistencyError(
                f"{len(bad)} allocation entries disagree with activity; first: node {i} is "
                f"{state} at frame {t} but labelled {self.labels[i, t]}"
            )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AllocationMatrix):
            return NotImplemented
        return self.k_up == other.k_up and np.array_equal(self.labels, other.labels)

    __hash__ = None  # type: ignore[assignment]


def compact_labels(z: AllocationMatrix) -> AllocationMatrix:
    """
    Relabel the nonempty groups to ``1..K`` preserving their order.

    The same mapping applies to every frame, so label identity across frames is kept.
    """
    mapping = np.zeros(z.k_up + 1, dtype=np.int64)
    used = z.nonempty_labels()
    mapping[used] = np.arange(1, used.size + 1)
    return AllocationMatrix(mapping[z.labels], z.k_up)


def read_allocation(path: str | Path, k_up: int | None = None) -> AllocationMatrix:
    """
    Read an ``N x T`` allocation CSV (one row per node, no header).

    Raises:
        InputError: Naming the line of a ragged or non-integer row.
    """
    path = Path(path)
    rows: list[list[int]] = []
    with path.open(newline="", encoding="utf-8") as f:
        for line_number, row in enumerate(csv.reader(f), 1):
            if not row or row[0].startswith("#"):
                continue
            try:
                values = [int(v) for v in row]
            except ValueError as e:
                raise InputError(f"non-integer label in {row}", path, line_number) from e
            if rows and len(values) != len(rows[0]):
                raise InputError(
                    f"row has {len(values)} frames, expected {len(rows[0])}", path, line_number
                )
            if any(v < 0 for v in values):
                raise InputError("negative label", path, line_number)
            rows.append(values)
    if not rows:
        raise InputError("empty allocation file", path)
    labels = np.asarray(rows, dtype=np.int64)
    return AllocationMatrix(labels, k_up if k_up is not None else max(1, int(labels.max())))


def write_allocation(z: AllocationMatrix, path: str | Path) -> None:
    """Write ``z`` as an ``N x T`` CSV (one row per node, no header)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        csv.writer(f).writerows(z.labels.tolist())
    logger.debug("allocation_written", path=str(path), nodes=z.n_nodes, frames=z.n_frames)
