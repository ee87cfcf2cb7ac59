"""Sufficient statistics, the exact ICL and its greedy maximisation."""

from greedy_sbtm.inference.allocation import (
    AllocationMatrix,
    compact_labels,
    read_allocation,
    write_allocation,
)
from greedy_sbtm.inference.greedy import GreedyState, fit, fit_k_up_grid, greedy_sweep, merge_phase
from greedy_sbtm.inference.icl import (
    IclValue,
    MoveScores,
    alpha_from_sizes,
    log_icl_delta_merge,
    log_icl_delta_move,
    log_icl_full,
    move_scores,
)
from greedy_sbtm.inference.init import init_kmeans_profile, init_random
from greedy_sbtm.inference.suffstats import (
    SufficientStats,
    apply_move,
    compute_stats,
    frame_dyad_codes,
    merge_stats,
    node_dyad_codes,
)

__all__ = [
    "AllocationMatrix",
    "GreedyState",
    "IclValue",
    "MoveScores",
    "SufficientStats",
    "alpha_from_sizes",
    "apply_move",
    "compact_labels",
    "compute_stats",
    "fit",
    "fit_k_up_grid",
    "frame_dyad_codes",
    "greedy_sweep",
    "init_kmeans_profile",
    "init_random",
    "log_icl_delta_merge",
    "log_icl_delta_move",
    "log_icl_full",
    "merge_phase",
    "merge_stats",
    "move_scores",
    "node_dyad_codes",
    "read_allocation",
    "write_allocation",
]
