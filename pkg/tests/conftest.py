"""Pytest configuration and fixtures."""

from collections import Counter, defaultdict
from math import inf, lgamma, log

import numpy as np
import pytest

from greedy_sbtm.inference.allocation import AllocationMatrix
from greedy_sbtm.ingestion.cube import AdjacencyCube
from greedy_sbtm.models.priors import PriorSettings


@pytest.fixture
def three_node_cube():
    """N=3, T=2, all active; edge (0,1) at t=0, edges (0,1) and (1,2) at t=1."""
    return AdjacencyCube.from_edges(
        3, 2, [(0, 0, 1), (1, 0, 1), (1, 1, 2)], active=np.ones((3, 2), dtype=bool)
    )


@pytest.fixture
def three_node_allocation():
    """Labels (1, 1, 2) at t=0 and (1, 2, 2) at t=1."""
    return AllocationMatrix(np.array([[1, 1], [1, 2], [2, 2]]), k_up=2)


@pytest.fixture
def single_node_cube():
    """One node, active in both of two frames, no edges."""
    return AdjacencyCube.from_edges(1, 2, [], active=np.ones((1, 2), dtype=bool))


@pytest.fixture
def jeffreys():
    """Factory for Jeffreys hyperparameters sized for ``k_up`` groups."""

    def _make(k_up):
        return PriorSettings().expand(k_up)

    return _make


def make_random_instance(rng, n, t, k_up, edge_prob=0.4, active_prob=0.8):
    """Random cube with explicit activity (edges only between active nodes) and a consistent allocation."""
    active = rng.random((n, t)) < active_prob
    upper = np.triu(rng.random((t, n, n)) < edge_prob, 1)
    x = upper | upper.transpose(0, 2, 1)
    x &= active.T[:, :, None] & active.T[:, None, :]
    cube = AdjacencyCube.from_dense(x.transpose(1, 2, 0).astype(np.int8), active=active)
    labels = np.where(active, rng.integers(1, k_up + 1, size=(n, t)), 0)
    return cube, AllocationMatrix(labels, k_up)


@pytest.fixture
def random_instance():
    """Factory ``(rng, n, t, k_up, ...) -> (cube, z)``."""
    return make_random_instance


def naive_log_icl(cube, labels, delta=0.5, a=0.5):
    """Exact log ICL by direct enumeration of dyads and log-gamma terms (Jeffreys-style scalars)."""
    labels = np.asarray(labels)
    n, t_frames = labels.shape
    counts = defaultdict(lambda: [0] * 6)
    for t in range(t_frames):
        for i in range(n):
            for j in range(i + 1, n):
                if not cube.y(i, j, t):
                    continue
                g, h = sorted((int(labels[i, t]), int(labels[j, t])))
                x = cube.x(i, j, t)
                if t == 0 or not cube.y(i, j, t - 1):
                    code = 0 if x else 1
                elif not cube.x(i, j, t - 1):
                    code = 2 if x else 3
                else:
                    code = 5 if x else 4
                counts[(g, h)][code] += 1

    blocks = 0.0
    prior = 2 * lgamma(a) - lgamma(2 * a)
    for c in counts.values():
        for s, f in ((c[0], c[1]), (c[2], c[3]), (c[4], c[5])):
            blocks += lgamma(a + s) + lgamma(a + f) - lgamma(2 * a + s + f) - prior

    n1 = Counter(int(v) for v in labels[:, 0])
    n_agg = Counter(int(v) for v in labels[:, 1:].ravel())
    total = sum(n_agg.values())
    alloc = 0.0
    for g, size in n1.items():
        alpha = n_agg[g] / total if total else 1.0 / len(n1)
        if alpha == 0:
            return -inf
        alloc += size * log(alpha)

    states = sorted({0} | {int(v) for v in labels.ravel()})
    transitions = Counter(
        (int(g), int(h)) for g, h in zip(labels[:, :-1].ravel(), labels[:, 1:].ravel(), strict=True)
    )
    for g in states:
        row = [transitions[(g, h)] for h in states]
        alloc += lgamma(delta * len(states)) - lgamma(delta * len(states) + sum(row))
        alloc += sum(lgamma(delta + r) - lgamma(delta) for r in row)
    return alloc + blocks


@pytest.fixture
def naive_icl():
    """Independent ICL oracle ``(cube, labels) -> float``."""
    return naive_log_icl
