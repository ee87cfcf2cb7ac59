"""Structural validation of adjacency cubes.

Validation never raises: it lists every violated invariant together with its
coordinates, so a malformed cube can be inspected before fitting.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse as sp

if TYPE_CHECKING:
    from greedy_sbtm.ingestion.cube import AdjacencyCube

ASYMMETRY = "asymmetry"
NONZERO_DIAGONAL = "nonzero_diagonal"
X_EXCEEDS_Y = "x_exceeds_y"
NON_BINARY = "non_binary"


@dataclass(frozen=True, order=True)
class Violation:
    """A single violated invariant at dyad (i, j) of frame t (i <= j)."""

    t: int
    i: int
    j: int
    kind: str


@dataclass
class ValidationReport:
    """Result of :func:`validate`."""

    violations: list[Violation] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return not self.violations

    def counts(self) -> dict[str, int]:
        """Number of violations per kind."""
        return dict(Counter(v.kind for v in self.violations))

    def __len__(self) -> int:
        return len(self.violations)


def validate(cube: AdjacencyCube) -> ValidationReport:
    """
    Check a cube against the structural invariants.

    Reported kinds: ``asymmetry`` (x[i,j,t] != x[j,i,t], once per unordered pair),
    ``nonzero_diagonal``, ``x_exceeds_y`` (an edge with an inactive endpoint, once
    per unordered pair) and ``non_binary`` (stored values other than 0/1).

    Args:
        cube: The cube to check.

    Returns:
        A report that is empty iff the cube is valid.
    """
    found: set[Violation] = set()
    for t, frame in enumerate(cube.frames):
        coo = sp.coo_matrix(frame)
        nz = coo.data != 0
        rows, cols, vals = coo.row[nz], coo.col[nz], coo.data[nz]

        for r, c in zip(rows[vals != 1], cols[vals != 1], strict=True):
            found.add(Violation(t, int(min(r, c)), int(max(r, c)), NON_BINARY))

        for r in rows[rows == cols]:
            found.add(Violation(t, int(r), int(r), NONZERO_DIAGONAL))

        diff = sp.coo_matrix((frame != 0).astype(np.int8) - (frame.T != 0).astype(np.int8))
        for r, c in zip(diff.row[diff.data != 0], diff.col[diff.data != 0], strict=True):
            found.add(Violation(t, int(min(r, c)), int(max(r, c)), ASYMMETRY))

        off = rows != cols
        inactive = ~(cube.active[rows, t] & cube.active[cols, t]) & off
        for r, c in zip(rows[inactive], cols[inactive], strict=True):
            found.add(Violation(t, int(min(r, c)), int(max(r, c)), X_EXCEEDS_Y))

    return ValidationReport(sorted(found))
