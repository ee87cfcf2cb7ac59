"""Initial allocations for the greedy search."""

from __future__ import annotations

import numpy as np
import structlog
from sklearn.cluster import KMeans

from greedy_sbtm.inference.allocation import INACTIVE, AllocationMatrix
from greedy_sbtm.ingestion.cube import AdjacencyCube
from greedy_sbtm.ingestion.exceptions import ArgumentError

logger = structlog.get_logger(__name__)

SeedLike = int | np.random.SeedSequence | None


def init_random(cube: AdjacencyCube, k_up: int, seed: SeedLike = None) -> AllocationMatrix:
    """Independent uniform labels in ``1..k_up`` for every active entry."""
    if k_up < 1:
        raise ArgumentError(f"k_up must be at least 1, got {k_up}")
    rng = np.random.default_rng(seed)
    labels = rng.integers(1, k_up + 1, size=cube.active.shape)
    return AllocationMatrix(np.where(cube.active, labels, INACTIVE), k_up)


def connectivity_profiles(cube: AdjacencyCube) -> tuple[np.ndarray, np.ndarray]:
    """
    Profile of every active (node, frame) entry: its adjacency row at t plus its row at t-1.

    Returns:
        ``(entries, profiles)`` where ``entries`` holds ``(i, t)`` pairs in row-major
        order of the activity matrix.
    """
    entries = np.argwhere(cube.active)
    profiles = np.zeros((entries.shape[0], cube.n_nodes), dtype=np.float64)
    for t in range(cube.n_frames):
        rows = np.flatnonzero(entries[:, 1] == t)
        if rows.size == 0:
            continue
        nodes = entries[rows, 0]
        block = cube.frames[t][nodes].toarray()
        if t > 0:
            block = block + cube.frames[t - 1][nodes].toarray()
        profiles[rows] = block
    return entries, profiles


def init_kmeans_profile(cube: AdjacencyCube, k_up: int, seed: SeedLike = None) -> AllocationMatrix:
    """
    Cluster connectivity profiles with k-means into at most ``k_up`` groups.

    When there are fewer distinct profiles than ``k_up``, fewer groups are returned.
    """
    if k_up < 1:
        raise ArgumentError(f"k_up must be at least 1, got {k_up}")
    labels = np.zeros(cube.active.shape, dtype=np.int64)
    entries, profiles = connectivity_profiles(cube)
    if entries.shape[0] == 0:
        return AllocationMatrix(labels, k_up)

    n_distinct = np.unique(profiles, axis=0).shape[0]
    n_clusters = min(k_up, n_distinct)
    if n_clusters == 1:
        assigned = np.ones(entries.shape[0], dtype=np.int64)
    else:
        random_state = int(np.random.default_rng(seed).integers(2**31 - 1))
        model = KMeans(n_clusters=n_clusters, n_init=10, random_state=random_state)
        assigned = model.fit_predict(profiles).astype(np.int64) + 1
    labels[entries[:, 0], entries[:, 1]] = assigned
    z = AllocationMatrix(labels, k_up)
    logger.debug("kmeans_initialised", requested=k_up, distinct_profiles=n_distinct, groups=z.n_groups)
    return z


INITIALISERS = {
    "random": init_random,
    "kmeans-profile": init_kmeans_profile,
}
