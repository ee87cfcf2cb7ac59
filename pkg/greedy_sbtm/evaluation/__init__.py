"""Evaluation metrics, plug-in estimates and summary tables."""

from greedy_sbtm.evaluation.estimates import (
    PluginEstimates,
    aggregated_group_sizes,
    group_size_trajectories,
    plugin_estimates,
)
from greedy_sbtm.evaluation.metrics import groups_per_frame, k_recovery, nmi, nmi_per_frame
from greedy_sbtm.evaluation.tables import write_matrix, write_table

__all__ = [
    "PluginEstimates",
    "aggregated_group_sizes",
    "group_size_trajectories",
    "groups_per_frame",
    "k_recovery",
    "nmi",
    "nmi_per_frame",
    "plugin_estimates",
    "write_matrix",
    "write_table",
]
