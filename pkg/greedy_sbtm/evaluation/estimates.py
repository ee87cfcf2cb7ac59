"""Plug-in parameter estimates and group-size summaries of an allocation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from greedy_sbtm.inference.allocation import AllocationMatrix
from greedy_sbtm.inference.suffstats import SufficientStats


@dataclass(frozen=True)
class PluginEstimates:
    """
    Ratio estimates from sufficient statistics; NaN where the denominator is zero.

    ``theta_hat``, ``p_hat`` and ``q_hat`` are indexed by ``label - 1``; ``pi_hat`` by state.
    """

    theta_hat: np.ndarray
    p_hat: np.ndarray
    q_hat: np.ndarray
    pi_hat: np.ndarray


def _ratio(numerator: np.ndarray, other: np.ndarray) -> np.ndarray:
    denominator = numerator + other
    out = np.full(numerator.shape, np.nan)
    np.divide(numerator, denominator, out=out, where=denominator > 0)
    return out


def plugin_estimates(stats: SufficientStats) -> PluginEstimates:
    """Edge, creation and destruction probabilities per block, transition probabilities per state."""
    labels = slice(1, None)
    row_sums = stats.r.sum(axis=1, keepdims=True)
    pi_hat = np.full(stats.r.shape, np.nan)
    np.divide(stats.r, row_sums, out=pi_hat, where=row_sums > 0)
    return PluginEstimates(
        theta_hat=_ratio(stats.eta[labels, labels], stats.zeta[labels, labels]),
        p_hat=_ratio(stats.u01[labels, labels], stats.u00[labels, labels]),
        q_hat=_ratio(stats.u10[labels, labels], stats.u11[labels, labels]),
        pi_hat=pi_hat,
    )


def group_size_trajectories(z: AllocationMatrix) -> np.ndarray:
    """``(K_up + 1) x T`` counts of nodes per state and frame; state 0 included."""
    k1 = z.k_up + 1
    return np.stack([np.bincount(z.labels[:, t], minlength=k1) for t in range(z.n_frames)], axis=1).astype(
        np.int64
    )


def aggregated_group_sizes(z: AllocationMatrix) -> np.ndarray:
    """Size of every state summed over frames."""
    return group_size_trajectories(z).sum(axis=1)
