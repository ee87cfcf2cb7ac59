"""Node activity rules and their registry.

A rule decides, for every (node, frame), whether the node is active. The
allocation of an inactive node is fixed to the inactive state 0, and only
dyads whose two endpoints are active contribute to the likelihood.

Rules register themselves by name:

    @register_activity_rule
    class DegreeActivityRule(ActivityRule):
        name = "degree"
        ...
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Any

import numpy as np
import structlog

from greedy_sbtm.ingestion.cube import NodeActivity, touched_nodes
from greedy_sbtm.ingestion.exceptions import ArgumentError

if TYPE_CHECKING:
    from greedy_sbtm.ingestion.cube import AdjacencyCube

logger = structlog.get_logger(__name__)

_RULE_REGISTRY: dict[str, type[ActivityRule]] = {}


class ActivityRule(ABC):
    """Abstract base class for activity rules."""

    name: str

    @abstractmethod
    def derive(self, cube: AdjacencyCube) -> NodeActivity:
        """Return the activity matrix for ``cube``."""


def register_activity_rule(cls: type[ActivityRule]) -> type[ActivityRule]:
    """
    Register an activity rule class under its ``name``.

    Args:
        cls: Rule class to register.

    Returns:
        The same class (for decorator chaining).
    """
    if not getattr(cls, "name", None):
        raise ValueError(f"Activity rule class {cls.__name__} must define 'name'")
    _RULE_REGISTRY[cls.name] = cls
    return cls


def get_activity_rule(name: str) -> type[ActivityRule] | None:
    """Get a rule class by name, or None if unknown."""
    return _RULE_REGISTRY.get(name)


def list_activity_rules() -> list[str]:
    """List the registered rule names."""
    return list(_RULE_REGISTRY.keys())


def create_activity_rule(name: str, **kwargs: Any) -> ActivityRule:
    """
    Instantiate a registered rule.

    Raises:
        ArgumentError: If no rule is registered under ``name``, or ``kwargs`` do not
            fit its constructor.
    """
    rule_class = get_activity_rule(name)
    if rule_class is None:
        raise ArgumentError(
            f"unknown activity rule {name!r}; available: {', '.join(list_activity_rules())}"
        )
    try:
        return rule_class(**kwargs)
    except TypeError as e:
        raise ArgumentError(f"activity rule {name!r}: {e}") from e


@register_activity_rule
class DegreeActivityRule(ActivityRule):
    """A node is active in a frame iff it has at least one edge in that frame."""

    name = "degree"

    def derive(self, cube: AdjacencyCube) -> NodeActivity:
        active = np.zeros((cube.n_nodes, cube.n_frames), dtype=bool)
        for t, frame in enumerate(cube.frames):
            active[:, t] = touched_nodes(frame)
        return NodeActivity(active)


@register_activity_rule
class ExplicitActivityRule(ActivityRule):
    """
    Presence recorded separately from interactions (longitudinal studies).

    A node is active if the presence matrix says so or if it has an edge in the
    frame; the latter keeps ``x <= y`` true for every dyad.
    """

    name = "explicit"

    def __init__(self, presence: np.ndarray):
        self.presence = np.asarray(presence, dtype=bool)

    def derive(self, cube: AdjacencyCube) -> NodeActivity:
        if self.presence.shape != cube.active.shape:
            raise ArgumentError(
                f"presence matrix has shape {self.presence.shape}, cube is {cube.active.shape}"
            )
        degree = DegreeActivityRule().derive(cube).active
        forced = int((degree & ~self.presence).sum())
        if forced:
            logger.warning("presence_overridden_by_edges", entries=forced)
        return NodeActivity(self.presence | degree)


def derive_activity(
    cube: AdjacencyCube, rule: str | ActivityRule = "degree", **kwargs: Any
) -> NodeActivity:
    """
    Derive node activity for ``cube`` under ``rule``.

    Args:
        cube: The network.
        rule: A rule instance, or the registered name of one.
        **kwargs: Constructor arguments when ``rule`` is a name.

    Returns:
        The activity matrix. ``cube.with_activity(...)`` applies it.
    """
    if isinstance(rule, str):
        rule = create_activity_rule(rule, **kwargs)
    return rule.derive(cube)
