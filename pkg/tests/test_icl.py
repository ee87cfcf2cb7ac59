"""Tests for the exact ICL and its incremental deltas."""

import itertools
import math

import numpy as np
import pytest

from greedy_sbtm.inference import (
    AllocationMatrix,
    alpha_from_sizes,
    apply_move,
    compute_stats,
    log_icl_delta_merge,
    log_icl_delta_move,
    log_icl_full,
    move_scores,
)
from greedy_sbtm.inference.icl import difference
from greedy_sbtm.ingestion import AdjacencyCube, ArgumentError, ConsistencyError
from greedy_sbtm.models.priors import Hyperparameters, PriorSettings


def _icl(cube, z, hyper):
    return log_icl_full(compute_stats(cube, z), hyper)


def _assert_same(actual, expected, tol):
    if math.isinf(expected):
        assert actual == expected
    else:
        assert actual == pytest.approx(expected, abs=tol)


def test_single_active_node(single_node_cube, jeffreys):
    value = _icl(single_node_cube, AllocationMatrix(np.array([[1, 1]]), k_up=1), jeffreys(1))
    assert value.log_icl == pytest.approx(-0.693147, abs=1e-6)
    assert value.block_term == 0.0
    assert not value.alpha_fallback
    assert value.n_groups == 1


def test_all_inactive_network_scores_zero(jeffreys):
    cube = AdjacencyCube.from_edges(4, 3, [])
    value = _icl(cube, AllocationMatrix(np.zeros((4, 3), dtype=int), k_up=2), jeffreys(2))
    assert value.log_icl == pytest.approx(0.0, abs=1e-12)
    assert value.n_groups == 0


def test_single_frame_uses_uniform_initial_probabilities(jeffreys):
    cube = AdjacencyCube.from_edges(2, 1, [], active=np.ones((2, 1), dtype=bool))
    value = _icl(cube, AllocationMatrix(np.array([[1], [2]]), k_up=2), jeffreys(2))
    assert value.alpha_fallback
    assert value.log_icl == pytest.approx(3 * math.log(0.5), abs=1e-12)


def test_group_absent_after_first_frame_is_minus_infinity(jeffreys):
    cube = AdjacencyCube.from_edges(2, 2, [], active=np.ones((2, 2), dtype=bool))
    value = _icl(cube, AllocationMatrix(np.array([[1, 2], [2, 2]]), k_up=2), jeffreys(2))
    assert value.log_icl == -math.inf
    assert value.allocation_term == -math.inf
    assert np.isfinite(value.block_term)
    assert not value.is_finite


def test_matches_naive_evaluation(random_instance, naive_icl, jeffreys):
    rng = np.random.default_rng(2024)
    for _ in range(200):
        n, t, k_up = int(rng.integers(1, 6)), int(rng.integers(1, 4)), int(rng.integers(1, 4))
        cube, z = random_instance(rng, n, t, k_up)
        _assert_same(_icl(cube, z, jeffreys(k_up)).log_icl, naive_icl(cube, z.labels), 1e-9)


def test_non_jeffreys_scalars_match_naive_evaluation(random_instance, naive_icl):
    rng = np.random.default_rng(7)
    hyper = PriorSettings(delta=1.3, eta0=2.0, zeta0=2.0, a_p=2.0, b_p=2.0, a_q=2.0, b_q=2.0).expand(3)
    for _ in range(20):
        cube, z = random_instance(rng, 5, 3, 3)
        expected = naive_icl(cube, z.labels, delta=1.3, a=2.0)
        _assert_same(_icl(cube, z, hyper).log_icl, expected, 1e-9)


def test_label_permutation_invariance(random_instance, jeffreys):
    rng = np.random.default_rng(3)
    perm = np.array([0, 2, 3, 1])
    for _ in range(50):
        cube, z = random_instance(rng, 5, 3, 3)
        relabelled = AllocationMatrix(perm[z.labels], z.k_up)
        _assert_same(
            _icl(cube, relabelled, jeffreys(3)).log_icl, _icl(cube, z, jeffreys(3)).log_icl, 1e-12
        )


def test_delta_move_matches_full_recompute(random_instance, jeffreys):
    rng = np.random.default_rng(5)
    hyper = jeffreys(3)
    for _ in range(10):
        cube, z = random_instance(rng, 6, 4, 3)
        entries = np.argwhere(cube.active)
        if entries.size == 0:
            continue
        stats = compute_stats(cube, z)
        value = log_icl_full(stats, hyper)
        for _ in range(50):
            i, t = (int(v) for v in entries[rng.integers(entries.shape[0])])
            g_new = int(rng.integers(1, 4))
            delta = log_icl_delta_move(stats, hyper, cube, z, t, i, g_new)
            apply_move(stats, cube, z, t, i, g_new)
            after = log_icl_full(stats, hyper)
            expected = (
                difference(after.initial_term, value.initial_term)
                + (after.transition_term - value.transition_term)
                + (after.block_term - value.block_term)
            )
            assert delta == pytest.approx(expected, abs=1e-8)
            value = after
        assert stats == compute_stats(cube, z)


def test_move_scores_cover_every_label(random_instance, jeffreys):
    rng = np.random.default_rng(6)
    hyper = jeffreys(3)
    cube, z = random_instance(rng, 6, 3, 3, active_prob=1.0)
    stats = compute_stats(cube, z)
    for i in range(cube.n_nodes):
        scores = move_scores(stats, hyper, cube, z, 1, i)
        deltas = scores.deltas()
        assert deltas[0] == -math.inf
        assert deltas[scores.current] == 0.0
        for g in range(1, 4):
            expected = log_icl_delta_move(stats, hyper, cube, z, 1, i, g)
            _assert_same(float(deltas[g]), expected, 1e-10)


def test_emptying_a_group(jeffreys):
    cube = AdjacencyCube.from_edges(3, 1, [(0, 0, 1)], active=np.ones((3, 1), dtype=bool))
    z = AllocationMatrix(np.array([[1], [1], [2]]), k_up=2)
    stats = compute_stats(cube, z)
    hyper = jeffreys(2)

    delta = log_icl_delta_move(stats, hyper, cube, z, 0, 2, 1)
    merged = AllocationMatrix(np.array([[1], [1], [1]]), k_up=2)

    assert delta == pytest.approx(_icl(cube, merged, hyper).log_icl - log_icl_full(stats, hyper).log_icl)
    assert _icl(cube, merged, hyper).n_groups == 1


def test_delta_move_errors(three_node_cube, three_node_allocation, jeffreys):
    stats = compute_stats(three_node_cube, three_node_allocation)
    with pytest.raises(ConsistencyError):
        log_icl_delta_move(stats, jeffreys(2), three_node_cube, three_node_allocation, 0, 0, 3)
    with pytest.raises(ArgumentError):
        log_icl_delta_move(stats, jeffreys(3), three_node_cube, three_node_allocation, 0, 0, 2)
    assert log_icl_delta_move(stats, jeffreys(2), three_node_cube, three_node_allocation, 0, 0, 1) == 0.0


def test_delta_merge_matches_full_recompute(random_instance, jeffreys):
    rng = np.random.default_rng(8)
    hyper = jeffreys(3)
    for _ in range(20):
        cube, z = random_instance(rng, 6, 3, 3, active_prob=1.0)
        stats = compute_stats(cube, z)
        labels = stats.nonempty_labels()
        if labels.size < 2:
            continue
        g, h = int(labels[0]), int(labels[-1])
        merged = z.labels.copy()
        merged[merged == h] = g
        before = log_icl_full(stats, hyper)
        after = _icl(cube, AllocationMatrix(merged, 3), hyper)
        expected = (
            difference(after.initial_term, before.initial_term)
            + (after.transition_term - before.transition_term)
            + (after.block_term - before.block_term)
        )
        assert log_icl_delta_merge(stats, hyper, g, h) == pytest.approx(expected, abs=1e-9)


def test_delta_merge_rejects_empty_groups(three_node_cube, three_node_allocation, jeffreys):
    stats = compute_stats(three_node_cube, AllocationMatrix(three_node_allocation.labels, k_up=3))
    with pytest.raises(ArgumentError):
        log_icl_delta_merge(stats, jeffreys(3), 1, 3)
    with pytest.raises(ArgumentError):
        log_icl_delta_merge(stats, jeffreys(3), 2, 2)


def test_alpha_from_sizes():
    alpha, fallback = alpha_from_sizes(np.array([1, 2, 0]), np.array([2, 1, 1]))
    np.testing.assert_allclose(alpha, [0.5, 0.25, 0.25])
    assert not fallback

    alpha, fallback = alpha_from_sizes(np.array([0, 2, 1]), np.zeros(3))
    np.testing.assert_allclose(alpha, [0.0, 0.5, 0.5])
    assert fallback


def test_difference_of_minus_infinity_is_zero():
    assert difference(-math.inf, -math.inf) == 0.0
    assert difference(-math.inf, 0.0) == -math.inf
    assert difference(1.5, 0.5) == 1.0


def test_hyperparameters_validation():
    jeffreys = {name: np.full((3, 3), 0.5) for name in ("delta", "eta0", "zeta0", "a_p", "b_p", "a_q")}
    with pytest.raises(ArgumentError, match="positive"):
        Hyperparameters(**jeffreys, b_q=np.zeros((3, 3)))
    with pytest.raises(ArgumentError, match="shape"):
        Hyperparameters(**jeffreys, b_q=np.full((2, 2), 0.5))
    asymmetric = np.full((3, 3), 0.5)
    asymmetric[1, 2] = 1.0
    with pytest.raises(ArgumentError, match="symmetric"):
        Hyperparameters(
            delta=np.full((3, 3), 0.5), eta0=asymmetric, zeta0=asymmetric,
            a_p=asymmetric, b_p=asymmetric, a_q=asymmetric, b_q=asymmetric,
        )
    with pytest.raises(ArgumentError):
        PriorSettings().expand(0)


def test_jeffreys_hyperparameters():
    hyper = Hyperparameters.jeffreys(3)
    assert hyper.k_up == 3
    assert (hyper.delta == 0.5).all()
    a, b = hyper.beta_pairs()
    assert a.shape == (3, 4, 4)
    assert (a[:, 1:, 1:] == 0.5).all()
    assert (b[:, 0, :] == 1.0).all()


# ---------------------------------------------------------------------------
# Local move deltas against full recomputation
# ---------------------------------------------------------------------------


def _random_hyper(rng, k_up):
    """Non-uniform delta matrix and symmetric, non-uniform Beta parameters."""
    k1 = k_up + 1

    def symmetric():
        m = rng.uniform(0.3, 2.5, (k1, k1))
        return (m + m.T) / 2

    return Hyperparameters(
        delta=rng.uniform(0.2, 3.0, (k1, k1)),
        eta0=symmetric(), zeta0=symmetric(), a_p=symmetric(), b_p=symmetric(), a_q=symmetric(), b_q=symmetric(),
    )


def _recomputed_delta(cube, z, hyper, before, t, i, g):
    labels = z.labels.copy()
    labels[i, t] = g
    after = _icl(cube, AllocationMatrix(labels, z.k_up), hyper)
    return (
        difference(after.initial_term, before.initial_term)
        + (after.transition_term - before.transition_term)
        + (after.block_term - before.block_term)
    )


def _check_every_move(cube, z, hyper):
    stats = compute_stats(cube, z)
    before = log_icl_full(stats, hyper)
    for i, t in np.argwhere(cube.active):
        deltas = move_scores(stats, hyper, cube, z, int(t), int(i)).deltas()
        for g in range(1, z.k_up + 1):
            expected = _recomputed_delta(cube, z, hyper, before, int(t), int(i), g)
            _assert_same(float(deltas[g]), expected, 1e-8)
    assert stats == compute_stats(cube, z)


@pytest.mark.parametrize(
    ("n", "t", "k_used", "k_up", "active_prob"),
    [
        (6, 4, 3, 3, 0.8),
        (6, 4, 2, 5, 0.8),
        (7, 5, 3, 4, 1.0),
        (5, 1, 2, 4, 0.9),
        (4, 2, 3, 3, 0.6),
    ],
)
def test_move_scores_match_recompute_with_general_priors(random_instance, n, t, k_used, k_up, active_prob):
    rng = np.random.default_rng(1000 * n + 10 * t + k_up)
    for _ in range(4):
        cube, z = random_instance(rng, n, t, k_used, active_prob=active_prob)
        _check_every_move(cube, AllocationMatrix(z.labels, k_up), _random_hyper(rng, k_up))


def test_move_scores_when_a_group_is_vacated_or_opened(jeffreys):
    # Group 3 holds a single entry in the middle frame; group 4 is empty.
    labels = np.array([[1, 1, 1], [1, 3, 2], [2, 2, 2], [2, 1, 1], [1, 2, 2]])
    triples = [(0, 0, 1), (1, 1, 2), (1, 0, 3), (2, 2, 4), (2, 0, 3)]
    cube = AdjacencyCube.from_edges(5, 3, triples, active=np.ones((5, 3), dtype=bool))
    z = AllocationMatrix(labels, k_up=4)
    _check_every_move(cube, z, jeffreys(4))
    _check_every_move(cube, z, _random_hyper(np.random.default_rng(17), 4))


def test_move_scores_from_minus_infinity(jeffreys):
    # Label 2 only occurs at the first frame, so the criterion starts at -inf.
    cube = AdjacencyCube.from_edges(3, 2, [(0, 0, 1), (1, 1, 2)], active=np.ones((3, 2), dtype=bool))
    z = AllocationMatrix(np.array([[2, 1], [1, 1], [1, 1]]), k_up=3)
    assert _icl(cube, z, jeffreys(3)).log_icl == -math.inf
    _check_every_move(cube, z, jeffreys(3))

    deltas = move_scores(compute_stats(cube, z), jeffreys(3), cube, z, 0, 0).deltas()
    assert deltas[1] == math.inf


@pytest.mark.slow
def test_incremental_tracking_over_long_move_sequences(random_instance):
    """100 instances, 500 random moves each: tracked criterion equals recomputation."""
    rng = np.random.default_rng(31415)
    for _ in range(100):
        k_up = int(rng.integers(2, 6))
        cube, z = random_instance(rng, int(rng.integers(4, 9)), int(rng.integers(1, 6)), k_up)
        entries = np.argwhere(cube.active)
        if entries.size == 0:
            continue
        hyper = _random_hyper(rng, k_up)
        stats = compute_stats(cube, z)
        value = log_icl_full(stats, hyper)
        initial, transitions, blocks = value.initial_term, value.transition_term, value.block_term
        for _ in range(500):
            i, t = (int(v) for v in entries[rng.integers(entries.shape[0])])
            g_new = int(rng.integers(1, k_up + 1))
            scores = move_scores(stats, hyper, cube, z, t, i)
            apply_move(stats, cube, z, t, i, g_new)
            initial = float(scores.initial[g_new])
            transitions += float(scores.transition_change[g_new])
            blocks += float(scores.block_change[g_new])

        value = log_icl_full(stats, hyper)
        _assert_same(initial, value.initial_term, 1e-8)
        assert transitions == pytest.approx(value.transition_term, abs=1e-8)
        assert blocks == pytest.approx(value.block_term, abs=1e-8)
        assert stats == compute_stats(cube, z)


def test_additional_observed_dyad_lowers_the_criterion(random_instance):
    rng = np.random.default_rng(99)
    for _ in range(10):
        cube, z = random_instance(rng, 6, 3, 3, active_prob=1.0)
        hyper = _random_hyper(rng, 3)
        stats = compute_stats(cube, z)
        base = log_icl_full(stats, hyper)
        labels = stats.nonempty_labels()
        for code in range(stats.blocks.shape[0]):
            for g, h in itertools.combinations_with_replacement(labels.tolist(), 2):
                grown = stats.copy()
                grown.blocks[code, g, h] += 1
                if g != h:
                    grown.blocks[code, h, g] += 1
                after = log_icl_full(grown, hyper)
                assert after.block_term < base.block_term
                assert after.log_icl <= base.log_icl
