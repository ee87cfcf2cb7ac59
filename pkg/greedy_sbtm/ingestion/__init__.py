"""Dynamic network data model and ingestion.

Importing the package registers the built-in activity rules.
"""

from greedy_sbtm.ingestion.activity import (
    ActivityRule,
    DegreeActivityRule,
    ExplicitActivityRule,
    create_activity_rule,
    derive_activity,
    get_activity_rule,
    list_activity_rules,
    register_activity_rule,
)
from greedy_sbtm.ingestion.cube import AdjacencyCube, NodeActivity
from greedy_sbtm.ingestion.events import EventList, NodeIndex, discretize
from greedy_sbtm.ingestion.exceptions import (
    ArgumentError,
    ConsistencyError,
    InputError,
    SBTMError,
)
from greedy_sbtm.ingestion.io import (
    read_activity,
    read_cube,
    read_edge_list,
    read_key_values,
    read_presence,
    write_cube,
    write_node_ids,
)
from greedy_sbtm.ingestion.validation import ValidationReport, Violation, validate

__all__ = [
    "ActivityRule",
    "AdjacencyCube",
    "ArgumentError",
    "ConsistencyError",
    "DegreeActivityRule",
    "EventList",
    "ExplicitActivityRule",
    "InputError",
    "NodeActivity",
    "NodeIndex",
    "SBTMError",
    "ValidationReport",
    "Violation",
    "create_activity_rule",
    "derive_activity",
    "discretize",
    "get_activity_rule",
    "list_activity_rules",
    "read_activity",
    "read_cube",
    "read_edge_list",
    "read_key_values",
    "read_presence",
    "register_activity_rule",
    "validate",
    "write_cube",
    "write_node_ids",
]
