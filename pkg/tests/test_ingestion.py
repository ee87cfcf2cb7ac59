"""Tests for network ingestion: cubes, discretisation and activity rules."""

from pathlib import Path

import numpy as np
import pytest

from greedy_sbtm.ingestion import (
    AdjacencyCube,
    ArgumentError,
    EventList,
    InputError,
    NodeIndex,
    derive_activity,
    discretize,
    read_edge_list,
    validate,
)
from greedy_sbtm.ingestion.activity import (
    ActivityRule,
    create_activity_rule,
    get_activity_rule,
    list_activity_rules,
)
from greedy_sbtm.ingestion.events import frame_of

REALITY_MINING = Path(__file__).parent / "data" / "reality_mining_edges.txt"


@pytest.fixture
def small_events():
    return EventList.from_records([(0.5, 1, 2), (0.7, 2, 1), (1.5, 1, 3)])


# ---------------------------------------------------------------------------
# AdjacencyCube
# ---------------------------------------------------------------------------


def test_from_edges_is_symmetric_with_zero_diagonal(three_node_cube):
    for t in range(three_node_cube.n_frames):
        x = three_node_cube.x_dense(t)
        assert (x == x.T).all()
        assert not x.diagonal().any()
    assert three_node_cube.x(1, 0, 1) == 1
    assert three_node_cube.x(0, 2, 1) == 0


def test_from_edges_collapses_repeated_triples():
    cube = AdjacencyCube.from_edges(3, 1, [(0, 0, 1), (0, 1, 0), (0, 0, 1)])
    assert cube.edges_per_frame().tolist() == [1]
    assert cube.frames[0].max() == 1


def test_from_edges_rejects_out_of_range_triples():
    with pytest.raises(ArgumentError):
        AdjacencyCube.from_edges(2, 1, [(1, 0, 1)])
    with pytest.raises(ArgumentError):
        AdjacencyCube.from_edges(2, 1, [(0, 0, 2)])


def test_cube_needs_nodes_and_frames():
    with pytest.raises(ArgumentError):
        AdjacencyCube.from_edges(0, 1, [])
    with pytest.raises(ArgumentError):
        AdjacencyCube.from_edges(2, 0, [])


def test_y_is_derived_from_activity():
    active = np.array([[True, True], [True, False], [False, True]])
    cube = AdjacencyCube.from_edges(3, 2, [(0, 0, 1)], active=active)
    assert cube.y(0, 1, 0) == 1
    assert cube.y(0, 1, 1) == 0
    assert cube.y(0, 2, 1) == 1
    assert cube.y(0, 0, 0) == 0
    assert cube.y_row(1, 0).tolist() == [False, False, True]


def test_cube_summaries(three_node_cube):
    assert three_node_cube.edges_per_frame().tolist() == [1, 2]
    assert three_node_cube.active_per_frame().tolist() == [3, 3]
    assert three_node_cube.observed_dyads_per_frame().tolist() == [3, 3]
    assert three_node_cube.n_observed_dyads() == 6
    assert three_node_cube.activity.inactive_fraction == 0.0


def test_from_dense_matches_from_edges(three_node_cube):
    x = np.stack([three_node_cube.x_dense(t) for t in range(2)], axis=2).astype(np.int8)
    rebuilt = AdjacencyCube.from_dense(x, active=three_node_cube.active)
    for t in range(2):
        assert (rebuilt.x_dense(t) == three_node_cube.x_dense(t)).all()


def test_to_events_round_trips_through_discretize(three_node_cube):
    events = three_node_cube.to_events(frame_width=2.0, time_origin=10.0)
    cube = discretize(events, frame_width=2.0, time_origin=10.0)
    assert cube.n_frames == three_node_cube.n_frames
    for t in range(cube.n_frames):
        assert (cube.x_dense(t) == three_node_cube.x_dense(t)).all()


# ---------------------------------------------------------------------------
# Discretisation
# ---------------------------------------------------------------------------


def test_discretize_small_example(small_events):
    cube = discretize(small_events, frame_width=1.0, time_origin=0.0)

    assert cube.n_nodes == 3
    assert cube.n_frames == 2
    assert cube.node_ids == ("1", "2", "3")
    assert cube.x(0, 1, 0) == 1
    assert cube.x(0, 2, 0) == 0
    assert cube.x(0, 2, 1) == 1
    assert cube.x(0, 1, 1) == 0
    assert cube.active.tolist() == [[True, True], [True, False], [False, True]]


def test_discretize_defaults_origin_to_earliest_event(small_events):
    cube = discretize(small_events, frame_width=1.0)
    # Origin 0.5: the span of 1.0 fits one frame, right-closed.
    assert cube.n_frames == 1
    assert cube.edges_per_frame().tolist() == [2]


def test_frame_boundaries_are_right_closed():
    assert frame_of(np.array([0.0, 1.0, 1.0000001, 2.0]), 0.0, 1.0).tolist() == [0, 0, 1, 1]


def test_discretize_is_idempotent(small_events):
    first = discretize(small_events, frame_width=1.0, time_origin=0.0)
    second = discretize(first.to_events(1.0, 0.0), frame_width=1.0, time_origin=0.0)
    assert second.n_frames == first.n_frames
    for t in range(first.n_frames):
        assert (second.x_dense(t) == first.x_dense(t)).all()
    assert (second.active == first.active).all()


def test_discretized_cubes_are_valid(small_events):
    assert validate(discretize(small_events, frame_width=0.25, time_origin=0.0)).is_valid


def test_discretize_rejects_bad_arguments(small_events):
    with pytest.raises(ArgumentError):
        discretize(small_events, frame_width=0.0)
    with pytest.raises(ArgumentError):
        discretize(small_events, frame_width=-1.0)
    with pytest.raises(ArgumentError):
        discretize(EventList.from_records([]), frame_width=1.0)


def test_discretize_rejects_self_loops_and_early_events(small_events):
    with pytest.raises(InputError, match="self-loop"):
        discretize(EventList.from_records([(0.0, "a", "a")]), frame_width=1.0)
    with pytest.raises(InputError, match="precedes"):
        discretize(small_events, frame_width=1.0, time_origin=1.0)


def test_node_index_sorts_numeric_ids_numerically():
    index = NodeIndex.from_ids(["10", "2", "1"])
    assert index.ids == ("1", "2", "10")
    assert index.index_of("10") == 2
    assert "2" in index


def test_node_index_falls_back_to_lexicographic_order():
    assert NodeIndex.from_ids(["b", "a", "10"]).ids == ("10", "a", "b")


def test_node_index_rejects_negative_and_unknown_ids():
    with pytest.raises(InputError):
        NodeIndex.from_ids(["1", "-3"])
    with pytest.raises(InputError):
        NodeIndex.from_ids(["1"]).index_of("7")


def test_roster_nodes_without_events_get_a_row():
    events = EventList.from_records([(1.0, "a", "b")], nodes=["a", "b", "c"])
    cube = discretize(events, frame_width=1.0, time_origin=0.0)
    assert cube.n_nodes == 3
    assert not cube.active[2].any()


# ---------------------------------------------------------------------------
# Activity rules
# ---------------------------------------------------------------------------


def test_degree_rule_marks_nodes_with_edges():
    cube = AdjacencyCube.from_edges(3, 2, [(0, 0, 1)], active=np.ones((3, 2), dtype=bool))
    activity = derive_activity(cube, "degree")
    assert activity.active.astype(int).tolist() == [[1, 0], [1, 0], [0, 0]]


def test_explicit_rule_keeps_presence_and_forces_edges():
    cube = AdjacencyCube.from_edges(3, 1, [(0, 0, 1)])
    presence = np.array([[False], [True], [True]])
    activity = derive_activity(cube, "explicit", presence=presence)
    assert activity.active[:, 0].tolist() == [True, True, True]


def test_explicit_rule_rejects_shape_mismatch():
    cube = AdjacencyCube.from_edges(3, 1, [(0, 0, 1)])
    with pytest.raises(ArgumentError):
        derive_activity(cube, "explicit", presence=np.ones((3, 2), dtype=bool))


def test_activity_rule_registry():
    assert {"degree", "explicit"} <= set(list_activity_rules())
    assert issubclass(get_activity_rule("degree"), ActivityRule)
    assert get_activity_rule("missing") is None
    with pytest.raises(ArgumentError, match="unknown activity rule"):
        create_activity_rule("missing")


@pytest.mark.parametrize("rule", ["degree", "explicit"])
def test_activity_rules_are_deterministic_and_permutation_equivariant(rule):
    rng = np.random.default_rng(12)
    for _ in range(20):
        n, t = int(rng.integers(2, 8)), int(rng.integers(1, 5))
        upper = np.triu(rng.random((t, n, n)) < 0.3, 1)
        x = (upper | upper.transpose(0, 2, 1)).transpose(1, 2, 0).astype(np.int8)
        presence = rng.random((n, t)) < 0.5
        perm = rng.permutation(n)
        kwargs = {"presence": presence} if rule == "explicit" else {}
        permuted_kwargs = {"presence": presence[perm]} if rule == "explicit" else {}

        cube = AdjacencyCube.from_dense(x)
        activity = derive_activity(cube, rule, **kwargs).active
        permuted = derive_activity(AdjacencyCube.from_dense(x[perm][:, perm]), rule, **permuted_kwargs).active

        assert np.array_equal(activity, derive_activity(cube, rule, **kwargs).active)
        assert np.array_equal(permuted, activity[perm])


def test_explicit_rule_needs_a_presence_matrix():
    with pytest.raises(ArgumentError, match="activity rule 'explicit'"):
        create_activity_rule("explicit")
    with pytest.raises(ArgumentError):
        derive_activity(AdjacencyCube.from_edges(2, 1, [(0, 0, 1)]), "explicit")


def test_discretize_passes_rule_arguments(small_events):
    presence = np.ones((3, 2), dtype=bool)
    cube = discretize(small_events, 1.0, 0.0, "explicit", presence=presence)
    assert cube.active.all()
    with pytest.raises(ArgumentError):
        discretize(small_events, 1.0, 0.0, "explicit")


# ---------------------------------------------------------------------------
# Reality Mining (dataset-dependent)
# ---------------------------------------------------------------------------


@pytest.mark.slow
@pytest.mark.skipif(not REALITY_MINING.exists(), reason="Reality Mining event list not present")
def test_reality_mining_dimensions():
    """Four-hour frames over the proximity events give a 96 x 1392 cube, mostly inactive."""
    events = read_edge_list(REALITY_MINING)
    cube = discretize(events, frame_width=4 * 3600.0)

    assert cube.n_nodes == 96
    assert cube.n_frames == 1392
    assert 0.80 <= cube.activity.inactive_fraction <= 0.86
    assert validate(cube).is_valid
