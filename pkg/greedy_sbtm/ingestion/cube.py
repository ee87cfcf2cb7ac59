"""Binary dynamic networks with node activity masks.

An :class:`AdjacencyCube` holds ``T`` undirected graphs over the same ``N``
nodes. Edge values are stored per frame as sparse symmetric matrices; node
activity is a dense ``N x T`` boolean matrix. The joint-activity indicator
``y[i, j, t] = a[i, t] * a[j, t]`` is always derived from the activity matrix
and never stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse as sp

from greedy_sbtm.ingestion.exceptions import ArgumentError

if TYPE_CHECKING:
    from collections.abc import Sequence

    from greedy_sbtm.ingestion.events import EventList


@dataclass(frozen=True)
class NodeActivity:
    """Per-node, per-frame activity (``active[i, t]`` is True iff node i is active at t)."""

    active: np.ndarray

    def __post_init__(self) -> None:
        if self.active.ndim != 2:
            raise ArgumentError(f"activity must be an N x T matrix, got shape {self.active.shape}")
        object.__setattr__(self, "active", np.asarray(self.active, dtype=bool))

    @property
    def inactive_fraction(self) -> float:
        """Fraction of (node, frame) entries that are inactive."""
        if self.active.size == 0:
            return 0.0
        return float(1.0 - self.active.mean())


@dataclass(frozen=True, eq=False)
class AdjacencyCube:
    """
    Dyadic observations of a discrete-time dynamic network.

    Attributes:
        active: Boolean ``N x T`` activity matrix.
        frames: One sparse ``N x N`` edge matrix per frame (symmetric, zero diagonal,
            binary for a valid cube; see :func:`greedy_sbtm.ingestion.validation.validate`).
        node_ids: Optional original node identifiers, index-aligned with rows.
    """

    active: np.ndarray
    frames: tuple[sp.csr_matrix, ...]
    node_ids: tuple[str, ...] | None = field(default=None)

    def __post_init__(self) -> None:
        active = np.asarray(self.active, dtype=bool)
        if active.ndim != 2:
            raise ArgumentError(f"active must be an N x T matrix, got shape {active.shape}")
        n_nodes, n_frames = active.shape
        if n_nodes < 1 or n_frames < 1:
            raise ArgumentError("a cube needs at least one node and one frame")
        if len(self.frames) != n_frames:
            raise ArgumentError(f"expected {n_frames} frames, got {len(self.frames)}")
        frames = tuple(sp.csr_matrix(f) for f in self.frames)
        for t, frame in enumerate(frames):
            if frame.shape != (n_nodes, n_nodes):
                raise ArgumentError(f"frame {t} has shape {frame.shape}, expected {n_nodes}x{n_nodes}")
        if self.node_ids is not None and len(self.node_ids) != n_nodes:
            raise ArgumentError(f"{len(self.node_ids)} node ids given for {n_nodes} nodes")
        object.__setattr__(self, "active", active)
        object.__setattr__(self, "frames", frames)

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        n_nodes: int,
        n_frames: int,
        edges: np.ndarray | Sequence[tuple[int, int, int]],
        active: np.ndarray | None = None,
        node_ids: Sequence[str] | None = None,
    ) -> AdjacencyCube:
        """
        Build a cube from ``(t, i, j)`` edge triples.

        Each undirected edge is stored in both directions; repeated triples collapse.
        When ``active`` is omitted, nodes are active exactly in the frames where they
        have at least one edge.

        Args:
            n_nodes: Number of nodes N.
            n_frames: Number of frames T.
            edges: Array-like of shape (M, 3) with columns ``t, i, j`` (0-based).
            active: Optional boolean N x T activity matrix.
            node_ids: Optional original node identifiers.

        Returns:
            The constructed cube.
        """
        triples = np.asarray(edges, dtype=np.int64).reshape(-1, 3)
        if triples.size and (
            triples.min() < 0
            or triples[:, 0].max() >= n_frames
            or triples[:, 1:].max() >= n_nodes
        ):
            raise ArgumentError("edge triple outside the cube dimensions")

        frames = []
        for t in range(n_frames):
            sel = triples[triples[:, 0] == t]
            rows = np.concatenate([sel[:, 1], sel[:, 2]])
            cols = np.concatenate([sel[:, 2], sel[:, 1]])
            frame = sp.coo_matrix(
                (np.ones(rows.size, dtype=np.int32), (rows, cols)), shape=(n_nodes, n_nodes)
            ).tocsr()
            frame.sum_duplicates()
            frame.data[:] = 1
            frames.append(frame.astype(np.int8))

        if active is None:
            active = np.zeros((n_nodes, n_frames), dtype=bool)
            for t, frame in enumerate(frames):
                active[:, t] = touched_nodes(frame)

        ids = None if node_ids is None else tuple(str(v) for v in node_ids)
        return cls(active=active, frames=tuple(frames), node_ids=ids)

    @classmethod
    def from_dense(cls, x: np.ndarray, active: np.ndarray | None = None) -> AdjacencyCube:
        """Build a cube from a dense binary ``N x N x T`` edge tensor."""
        x = np.asarray(x)
        if x.ndim != 3 or x.shape[0] != x.shape[1]:
            raise ArgumentError(f"x must have shape N x N x T, got {x.shape}")
        t_idx, i_idx, j_idx = np.nonzero(np.transpose(x, (2, 0, 1)))
        keep = i_idx < j_idx
        triples = np.column_stack([t_idx[keep], i_idx[keep], j_idx[keep]])
        return cls.from_edges(x.shape[0], x.shape[2], triples, active=active)

    def with_activity(self, activity: NodeActivity | np.ndarray) -> AdjacencyCube:
        """Return a copy of the cube carrying a different activity matrix."""
        active = activity.active if isinstance(activity, NodeActivity) else activity
        return AdjacencyCube(active=np.array(active, dtype=bool), frames=self.frames, node_ids=self.node_ids)

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return int(self.active.shape[0])

    @property
    def n_frames(self) -> int:
        return int(self.active.shape[1])

    @property
    def activity(self) -> NodeActivity:
        return NodeActivity(self.active)

    def x(self, i: int, j: int, t: int) -> int:
        """Edge value x[i, j, t]."""
        return int(self.frames[t][i, j] != 0)

    def y(self, i: int, j: int, t: int) -> int:
        """Joint-activity indicator y[i, j, t] (0 on the diagonal)."""
        return int(i != j and self.active[i, t] and self.active[j, t])

    def x_dense(self, t: int) -> np.ndarray:
        """Dense boolean adjacency matrix of frame t."""
        return self.frames[t].toarray() != 0

    def x_row(self, t: int, i: int) -> np.ndarray:
        """Dense boolean row i of frame t."""
        return self.frames[t].getrow(i).toarray().ravel() != 0

    def y_row(self, t: int, i: int) -> np.ndarray:
        """Joint-activity row y[i, :, t]."""
        row = self.active[:, t] & self.active[i, t]
        row[i] = False
        return row

    def edges(self, t: int) -> np.ndarray:
        """Sorted ``(i, j)`` pairs with ``i < j`` and x=1 at frame t, shape (M, 2)."""
        coo = sp.triu(self.frames[t], k=1).tocoo()
        pairs = np.column_stack([coo.row, coo.col]).astype(np.int64)
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        return pairs[order]

    def edges_per_frame(self) -> np.ndarray:
        """Number of undirected edges in each frame."""
        return np.array([self.edges(t).shape[0] for t in range(self.n_frames)], dtype=np.int64)

    def active_per_frame(self) -> np.ndarray:
        """Number of active nodes in each frame."""
        return self.active.sum(axis=0).astype(np.int64)

    def observed_dyads_per_frame(self) -> np.ndarray:
        """Number of dyads ``i < j`` with y=1 in each frame."""
        a = self.active_per_frame()
        return a * (a - 1) // 2

    def n_observed_dyads(self) -> int:
        """Total number of observed dyads, summed over frames."""
        return int(self.observed_dyads_per_frame().sum())

    def to_events(self, frame_width: float = 1.0, time_origin: float = 0.0) -> EventList:
        """
        Serialise the edge-frames back to timestamped events.

        Every edge of frame t becomes one event stamped at the right end of the
        frame interval, ``time_origin + (t + 1) * frame_width``.
        """
        from greedy_sbtm.ingestion.events import EventList

        stamps: list[np.ndarray] = []
        sources: list[np.ndarray] = []
        targets: list[np.ndarray] = []
        for t in range(self.n_frames):
            pairs = self.edges(t)
            stamps.append(np.full(pairs.shape[0], time_origin + (t + 1) * frame_width))
            sources.append(pairs[:, 0])
            targets.append(pairs[:, 1])
        ids = self.node_ids or tuple(str(i) for i in range(self.n_nodes))
        lookup = np.asarray(ids, dtype=object)
        return EventList(
            timestamps=np.concatenate(stamps) if stamps else np.zeros(0),
            sources=lookup[np.concatenate(sources).astype(np.int64)],
            targets=lookup[np.concatenate(targets).astype(np.int64)],
            time_origin=time_origin,
            frame_width=frame_width,
            nodes=ids,
        )


def touched_nodes(frame: sp.csr_matrix) -> np.ndarray:
    """Nodes with at least one stored entry in their row or column."""
    return (frame.getnnz(axis=1) > 0) | (frame.getnnz(axis=0) > 0)
