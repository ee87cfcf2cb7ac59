"""Timestamped interaction events and their discretisation into frames.

Frames are left-open, right-closed intervals of width ``w`` measured from the
time origin: frame ``k`` (0-based) covers ``(origin + k*w, origin + (k+1)*w]``.
An event stamped exactly at the origin belongs to the first frame. The origin
defaults to the earliest timestamp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np
import structlog

from greedy_sbtm.ingestion.cube import AdjacencyCube
from greedy_sbtm.ingestion.exceptions import ArgumentError, InputError

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

logger = structlog.get_logger(__name__)

_BOUNDARY_EPS = 1e-9


@dataclass(frozen=True)
class NodeIndex:
    """Stable sorted mapping between original node identifiers and row indices."""

    ids: tuple[str, ...]
    _positions: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_positions", {v: k for k, v in enumerate(self.ids)})

    @classmethod
    def from_ids(cls, ids: Iterable[str]) -> NodeIndex:
        """
        Build the index from arbitrary identifiers.

        Identifiers that all parse as integers are sorted numerically, anything
        else is sorted lexicographically. Negative integer identifiers are rejected.
        """
        unique = {str(v) for v in ids}
        try:
            numeric = {v: int(v) for v in unique}
        except ValueError:
            return cls(tuple(sorted(unique)))
        negative = sorted(v for v, n in numeric.items() if n < 0)
        if negative:
            raise InputError(f"negative node id {negative[0]!r}")
        return cls(tuple(sorted(unique, key=lambda v: numeric[v])))

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, node_id: object) -> bool:
        return str(node_id) in self._positions

    def index_of(self, node_id: str) -> int:
        """Row index of ``node_id``."""
        try:
            return self._positions[str(node_id)]
        except KeyError as e:
            raise InputError(f"unknown node id {node_id!r}") from e

    def lookup(self, node_ids: np.ndarray) -> np.ndarray:
        """Vectorised :meth:`index_of`."""
        return np.fromiter((self.index_of(v) for v in node_ids), dtype=np.int64, count=len(node_ids))


@dataclass(frozen=True, eq=False)
class EventList:
    """
    Undirected timestamped interactions.

    Attributes:
        timestamps: Event times (any real time unit).
        sources: First endpoint identifier of each event.
        targets: Second endpoint identifier of each event.
        time_origin: Start of the first frame; ``None`` means the earliest timestamp.
        frame_width: Frame duration recorded with the events, if known.
        nodes: Optional full node roster; events must only reference these nodes and
            roster nodes without events still get a row in the cube.
    """

    timestamps: np.ndarray
    sources: np.ndarray
    targets: np.ndarray
    time_origin: float | None = None
    frame_width: float | None = None
    nodes: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        ts = np.asarray(self.timestamps, dtype=np.float64).ravel()
        src = np.asarray(self.sources, dtype=object).ravel().astype(str).astype(object)
        dst = np.asarray(self.targets, dtype=object).ravel().astype(str).astype(object)
        if not (ts.size == src.size == dst.size):
            raise ArgumentError("timestamps, sources and targets must have equal lengths")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "sources", src)
        object.__setattr__(self, "targets", dst)
        if self.nodes is not None:
            object.__setattr__(self, "nodes", tuple(str(v) for v in self.nodes))

    @classmethod
    def from_records(
        cls,
        records: Iterable[tuple[float, object, object]],
        time_origin: float | None = None,
        nodes: Sequence[object] | None = None,
    ) -> EventList:
        """Build an event list from ``(timestamp, node_a, node_b)`` tuples."""
        rows = list(records)
        return cls(
            timestamps=np.array([r[0] for r in rows], dtype=np.float64),
            sources=np.array([str(r[1]) for r in rows], dtype=object),
            targets=np.array([str(r[2]) for r in rows], dtype=object),
            time_origin=time_origin,
            nodes=None if nodes is None else tuple(str(v) for v in nodes),
        )

    def __len__(self) -> int:
        return int(self.timestamps.size)

    def node_index(self) -> NodeIndex:
        """The id-to-index map implied by the roster (or by the events themselves)."""
        if self.nodes is not None:
            return NodeIndex.from_ids(self.nodes)
        return NodeIndex.from_ids(np.concatenate([self.sources, self.targets]))


def frame_of(timestamps: np.ndarray, origin: float, frame_width: float) -> np.ndarray:
    """0-based frame index of each timestamp under the right-closed convention."""
    offsets = (np.asarray(timestamps, dtype=np.float64) - origin) / frame_width
    # Stamps within rounding error of a frame boundary close that frame.
    return np.maximum(np.ceil(offsets - _BOUNDARY_EPS).astype(np.int64) - 1, 0)


def discretize(
    events: EventList,
    frame_width: float,
    time_origin: float | None = None,
    activity_rule: str = "degree",
    **rule_kwargs: Any,
) -> AdjacencyCube:
    """
    Bucket timestamped events into a binary adjacency cube.

    ``x[i, j, t] = 1`` iff at least one event between i and j falls in frame t.
    The number of frames is ``ceil(span / frame_width)`` where the span runs from
    the origin to the latest event (at least one frame). Node activity is then
    derived with ``activity_rule``.

    Args:
        events: The interactions.
        frame_width: Frame duration, strictly positive.
        time_origin: Start of frame 0; defaults to ``events.time_origin`` and then to
            the earliest timestamp.
        activity_rule: Registered activity rule name (see ``activity.py``).
        **rule_kwargs: Constructor arguments of the rule, e.g. ``presence`` for
            ``explicit``.

    Returns:
        The cube, carrying the sorted node identifiers.

    Raises:
        ArgumentError: If ``frame_width`` is not positive, ``events`` is empty or the
            rule arguments do not fit the rule.
        InputError: If an event is a self-loop, precedes the origin, or references
            an unknown or negative node id.
    """
    from greedy_sbtm.ingestion.activity import derive_activity

    if not frame_width > 0 or not math.isfinite(frame_width):
        raise ArgumentError(f"frame_width must be a positive finite duration, got {frame_width}")
    if len(events) == 0:
        raise ArgumentError("cannot discretise an empty event list")

    index = events.node_index()
    src = index.lookup(events.sources)
    dst = index.lookup(events.targets)
    loops = np.flatnonzero(src == dst)
    if loops.size:
        k = int(loops[0])
        raise InputError(f"self-loop event on node {events.sources[k]!r} at {events.timestamps[k]}")

    origin = time_origin if time_origin is not None else events.time_origin
    if origin is None:
        origin = float(events.timestamps.min())
    early = np.flatnonzero(events.timestamps < origin)
    if early.size:
        raise InputError(
            f"event at {events.timestamps[early[0]]} precedes the time origin {origin}"
        )

    span = float(events.timestamps.max()) - origin
    n_frames = max(1, math.ceil(span / frame_width - _BOUNDARY_EPS))
    frames = np.minimum(frame_of(events.timestamps, origin, frame_width), n_frames - 1)

    n_nodes = len(index)
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    keys = np.unique((frames * n_nodes + lo) * n_nodes + hi)
    triples = np.column_stack([keys // (n_nodes * n_nodes), (keys // n_nodes) % n_nodes, keys % n_nodes])

    cube = AdjacencyCube.from_edges(n_nodes, n_frames, triples, node_ids=index.ids)
    cube = cube.with_activity(derive_activity(cube, activity_rule, **rule_kwargs))
    logger.info(
        "events_discretized",
        events=len(events),
        nodes=n_nodes,
        frames=n_frames,
        frame_width=frame_width,
        time_origin=origin,
        edge_frames=int(keys.size),
        inactive_fraction=round(cube.activity.inactive_fraction, 4),
    )
    return cube
