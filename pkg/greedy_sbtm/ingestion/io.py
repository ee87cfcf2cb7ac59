"""Readers and writers for edge lists, cube files and activity files.

File formats (UTF-8 text, ``#`` starts a comment line):

* edge list: one event per line, ``timestamp node_a node_b`` separated by
  whitespace or commas;
* cube file: header line ``N T``, then one ``t i j`` line per edge with
  ``i < j``, in ascending ``(t, i, j)`` order (0-based indices);
* activity file: one ``t i`` line per active (frame, node) pair;
* presence file: one ``t node_id`` line per (frame, node) recorded present;
* key-value file: one ``key = value`` (or ``key: value``) line per entry, used
  by prior, parameter and manifest files.
"""

from __future__ import annotations

import csv
import re
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
import structlog

from greedy_sbtm.ingestion.cube import AdjacencyCube
from greedy_sbtm.ingestion.events import EventList
from greedy_sbtm.ingestion.exceptions import InputError

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence

logger = structlog.get_logger(__name__)

_SEPARATORS = re.compile(r"[\s,]+")
_KEY_VALUE = re.compile(r"^([A-Za-z_][A-Za-z0-9_.]*)\s*[=:]\s*(.*)$")


def _content_lines(path: Path) -> Iterator[tuple[int, str]]:
    """Yield ``(line_number, stripped_line)`` for every non-blank, non-comment line."""
    with path.open(encoding="utf-8") as f:
        for line_number, raw in enumerate(f, 1):
            line = raw.strip()
            if line and not line.startswith("#"):
                yield line_number, line


def _data_lines(path: Path) -> Iterator[tuple[int, list[str]]]:
    """Yield ``(line_number, fields)`` for every non-blank, non-comment line."""
    for line_number, line in _content_lines(path):
        yield line_number, [tok for tok in _SEPARATORS.split(line) if tok]


def read_key_values(path: str | Path) -> dict[str, tuple[str, int]]:
    """
    Read a key-value file.

    Returns:
        ``key -> (raw value, line number)``; a repeated key keeps its last value.

    Raises:
        InputError: For a line that is not a key-value pair.
    """
    path = Path(path)
    entries: dict[str, tuple[str, int]] = {}
    for line_number, line in _content_lines(path):
        match = _KEY_VALUE.match(line)
        if match is None:
            raise InputError(f"expected 'key = value', got {line!r}", path, line_number)
        entries[match.group(1)] = (match.group(2).strip(), line_number)
    return entries


def _ints(fields: list[str], count: int, path: Path, line_number: int) -> list[int]:
    if len(fields) != count:
        raise InputError(f"expected {count} fields, got {len(fields)}", path, line_number)
    try:
        return [int(v) for v in fields]
    except ValueError as e:
        raise InputError(f"non-integer field in {' '.join(fields)!r}", path, line_number) from e


def read_edge_list(path: str | Path, time_origin: float | None = None) -> EventList:
    """
    Read a timestamped edge list.

    Raises:
        InputError: Naming the offending line for malformed rows or self-loops.
    """
    path = Path(path)
    stamps: list[float] = []
    sources: list[str] = []
    targets: list[str] = []
    for line_number, fields in _data_lines(path):
        if len(fields) < 3:
            raise InputError(f"expected 'timestamp node_a node_b', got {fields}", path, line_number)
        try:
            stamp = float(fields[0])
        except ValueError as e:
            raise InputError(f"bad timestamp {fields[0]!r}", path, line_number) from e
        if fields[1] == fields[2]:
            raise InputError(f"self-loop on node {fields[1]!r}", path, line_number)
        stamps.append(stamp)
        sources.append(fields[1])
        targets.append(fields[2])

    logger.info("edge_list_read", path=str(path), events=len(stamps))
    return EventList(
        timestamps=np.asarray(stamps, dtype=np.float64),
        sources=np.asarray(sources, dtype=object),
        targets=np.asarray(targets, dtype=object),
        time_origin=time_origin,
    )


def read_activity(path: str | Path, n_nodes: int, n_frames: int) -> np.ndarray:
    """Read an activity file into a boolean ``N x T`` matrix."""
    path = Path(path)
    active = np.zeros((n_nodes, n_frames), dtype=bool)
    for line_number, fields in _data_lines(path):
        t, i = _ints(fields, 2, path, line_number)
        if not (0 <= t < n_frames and 0 <= i < n_nodes):
            raise InputError(f"activity entry ({t}, {i}) outside {n_nodes}x{n_frames}", path, line_number)
        active[i, t] = True
    return active


def read_presence(path: str | Path, node_ids: Sequence[str], n_frames: int) -> np.ndarray:
    """
    Read a presence file into a boolean ``N x T`` matrix ordered like ``node_ids``.

    Raises:
        InputError: For a malformed line, a frame outside ``0..n_frames-1`` or an
            identifier that never appears in the interactions.
    """
    path = Path(path)
    position = {node_id: i for i, node_id in enumerate(node_ids)}
    present = np.zeros((len(node_ids), n_frames), dtype=bool)
    for line_number, fields in _data_lines(path):
        if len(fields) != 2:
            raise InputError(f"expected 't node_id', got {fields}", path, line_number)
        try:
            t = int(fields[0])
        except ValueError as e:
            raise InputError(f"bad frame index {fields[0]!r}", path, line_number) from e
        if not 0 <= t < n_frames:
            raise InputError(f"frame {t} outside 0..{n_frames - 1}", path, line_number)
        i = position.get(fields[1])
        if i is None:
            raise InputError(f"unknown node id {fields[1]!r}", path, line_number)
        present[i, t] = True
    return present


def read_cube(path: str | Path, activity_path: str | Path | None = None) -> AdjacencyCube:
    """
    Read a cube file, and optionally its activity file.

    Without an activity file, nodes are active exactly where they have edges.

    Raises:
        InputError: For a missing/bad header, out-of-range indices, ``i >= j`` or
            rows out of ascending order; the message names the line.
    """
    path = Path(path)
    lines = _data_lines(path)
    try:
        header_line, header = next(lines)
    except StopIteration as e:
        raise InputError("empty cube file, expected header 'N T'", path) from e
    n_nodes, n_frames = _ints(header, 2, path, header_line)
    if n_nodes < 1 or n_frames < 1:
        raise InputError(f"invalid dimensions N={n_nodes} T={n_frames}", path, header_line)

    triples: list[tuple[int, int, int]] = []
    previous = (-1, -1, -1)
    for line_number, fields in lines:
        t, i, j = _ints(fields, 3, path, line_number)
        if not (0 <= t < n_frames and 0 <= i < n_nodes and 0 <= j < n_nodes):
            raise InputError(f"edge ({t}, {i}, {j}) outside {n_nodes}x{n_frames}", path, line_number)
        if i >= j:
            raise InputError(f"edge ({t}, {i}, {j}) must satisfy i < j", path, line_number)
        if (t, i, j) <= previous:
            raise InputError(f"edge ({t}, {i}, {j}) out of ascending (t, i, j) order", path, line_number)
        previous = (t, i, j)
        triples.append((t, i, j))

    active = None
    if activity_path is not None:
        active = read_activity(activity_path, n_nodes, n_frames)
    cube = AdjacencyCube.from_edges(n_nodes, n_frames, np.asarray(triples, dtype=np.int64), active=active)
    logger.info(
        "cube_read", path=str(path), nodes=n_nodes, frames=n_frames, edges=len(triples),
        explicit_activity=activity_path is not None,
    )
    return cube


def write_cube(cube: AdjacencyCube, path: str | Path, activity_path: str | Path | None = None) -> None:
    """Write ``cube`` in the cube file format (and its activity, if a path is given)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        f.write(f"{cube.n_nodes} {cube.n_frames}\n")
        for t in range(cube.n_frames):
            for i, j in cube.edges(t):
                f.write(f"{t} {i} {j}\n")

    if activity_path is not None:
        activity_path = Path(activity_path)
        activity_path.parent.mkdir(parents=True, exist_ok=True)
        with activity_path.open("w", encoding="utf-8") as f:
            for t in range(cube.n_frames):
                for i in np.flatnonzero(cube.active[:, t]):
                    f.write(f"{t} {i}\n")
    logger.debug("cube_written", path=str(path), activity_path=str(activity_path))


def write_node_ids(cube: AdjacencyCube, path: str | Path) -> None:
    """Write the index-to-identifier map as ``index,node_id`` CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ids = cube.node_ids or tuple(str(i) for i in range(cube.n_nodes))
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["index", "node_id"])
        writer.writerows(enumerate(ids))
