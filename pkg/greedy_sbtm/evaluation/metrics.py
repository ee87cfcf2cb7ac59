"""Partition agreement and group-count recovery."""

from __future__ import annotations

import numpy as np
from sklearn.metrics import normalized_mutual_info_score

from greedy_sbtm.inference.allocation import INACTIVE, AllocationMatrix
from greedy_sbtm.ingestion.exceptions import ArgumentError

NMI_AVERAGE_METHOD = "geometric"


def nmi(a: np.ndarray, b: np.ndarray) -> float:
    """
    Normalised mutual information of two partitions of the same nodes.

    Normalised by the geometric mean of the two entropies. A partition with a
    single block gives 0; empty partitions give NaN.

    Raises:
        ArgumentError: If the partitions have different lengths.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ArgumentError(f"partitions must be vectors of equal length, got {a.shape} and {b.shape}")
    if a.size == 0:
        return float("nan")
    if np.unique(a).size < 2 or np.unique(b).size < 2:
        return 0.0
    value = normalized_mutual_info_score(a, b, average_method=NMI_AVERAGE_METHOD)
    return float(np.clip(value, 0.0, 1.0))


def nmi_per_frame(z_a: AllocationMatrix, z_b: AllocationMatrix) -> np.ndarray:
    """
    NMI between the active-node partitions of every frame.

    Frames without active nodes are NaN.

    Raises:
        ArgumentError: If the shapes or the inactivity patterns differ.
    """
    if z_a.shape != z_b.shape:
        raise ArgumentError(f"allocation shapes differ: {z_a.shape} vs {z_b.shape}")
    active = z_a.labels != INACTIVE
    if not np.array_equal(active, z_b.labels != INACTIVE):
        raise ArgumentError("allocations disagree on which nodes are active")
    out = np.full(z_a.n_frames, np.nan)
    for t in range(z_a.n_frames):
        rows = active[:, t]
        if rows.any():
            out[t] = nmi(z_a.labels[rows, t], z_b.labels[rows, t])
    return out


def groups_per_frame(z: AllocationMatrix) -> np.ndarray:
    """Number of nonempty groups in every frame."""
    return np.array([np.unique(z.frame(t)).size for t in range(z.n_frames)], dtype=np.int64)


def k_recovery(z_hat: AllocationMatrix, k_true: int | np.ndarray | AllocationMatrix) -> float:
    """
    Fraction of frames whose number of nonempty groups matches the truth.

    ``k_true`` is a constant, a per-frame vector or the true allocation.
    """
    estimated = groups_per_frame(z_hat)
    if isinstance(k_true, AllocationMatrix):
        target = groups_per_frame(k_true)
    else:
        target = np.broadcast_to(np.asarray(k_true), estimated.shape)
    if estimated.size == 0:
        return float("nan")
    return float(np.mean(estimated == target))
