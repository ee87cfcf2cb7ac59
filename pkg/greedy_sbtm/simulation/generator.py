"""Sampling networks from the full generative hierarchy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import structlog

from greedy_sbtm.inference.allocation import INACTIVE, AllocationMatrix
from greedy_sbtm.inference.suffstats import CLASS_NAMES, ETA, U00, U01, U10, U11, UNOBSERVED, ZETA
from greedy_sbtm.ingestion.cube import AdjacencyCube
from greedy_sbtm.ingestion.exceptions import ArgumentError
from greedy_sbtm.models.priors import Hyperparameters
from greedy_sbtm.simulation.params import ModelParameters

logger = structlog.get_logger(__name__)

SeedLike = int | np.random.SeedSequence | None


@dataclass(frozen=True, eq=False)
class SimOutput:
    """
    A simulated dataset.

    Attributes:
        cube: The network, with activity taken from ``z_true``.
        z_true: The generating allocation.
        params: The generating parameters.
        dyad_codes: ``(T, N, N)`` class code of every dyad-frame as drawn
            (-1 where unobserved); see :mod:`greedy_sbtm.inference.suffstats`.
    """

    cube: AdjacencyCube
    z_true: AllocationMatrix
    params: ModelParameters
    dyad_codes: np.ndarray

    def regime_counts(self) -> dict[str, int]:
        """Number of dyad-frames drawn in each class (unordered dyads)."""
        iu, ju = np.triu_indices(self.cube.n_nodes, k=1)
        codes = self.dyad_codes[:, iu, ju]
        codes = codes[codes != UNOBSERVED]
        tally = np.bincount(codes.astype(np.int64), minlength=len(CLASS_NAMES))
        return dict(zip(CLASS_NAMES, (int(v) for v in tally), strict=True))


def sample_params(k: int, hyper: Hyperparameters, seed: SeedLike = None) -> ModelParameters:
    """
    Draw parameters from the priors.

    Transition rows are Dirichlet, the three probability matrices Beta; only
    ``g <= h`` is drawn and mirrored.

    Raises:
        ArgumentError: If ``k`` is below 1 or the hyperparameters are not sized for ``k`` groups.
    """
    if k < 1:
        raise ArgumentError(f"k must be at least 1, got {k}")
    if hyper.k_up != k:
        raise ArgumentError(f"hyperparameters sized for {hyper.k_up} groups, asked for {k}")
    rng = np.random.default_rng(seed)
    pi = np.vstack([rng.dirichlet(hyper.delta[g]) for g in range(k + 1)])

    iu, ju = np.triu_indices(k, k=0)

    def symmetric(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        draws = rng.beta(a[1:, 1:][iu, ju], b[1:, 1:][iu, ju])
        m = np.zeros((k, k))
        m[iu, ju] = draws
        m[ju, iu] = draws
        return m

    theta = symmetric(hyper.eta0, hyper.zeta0)
    p = symmetric(hyper.a_p, hyper.b_p)
    q = symmetric(hyper.a_q, hyper.b_q)
    return ModelParameters(theta, p, q, pi / pi.sum(axis=1, keepdims=True))


def _draw_states(rng: np.random.Generator, probabilities: np.ndarray) -> np.ndarray:
    """One categorical draw per row of ``probabilities``; zero-mass states are never drawn."""
    cumulative = np.cumsum(probabilities, axis=1)
    u = rng.random(probabilities.shape[0])
    states = (cumulative <= u[:, None]).sum(axis=1)
    return np.minimum(states, probabilities.shape[1] - 1)


def sample_allocations(n: int, t_frames: int, params: ModelParameters, seed: SeedLike = None) -> AllocationMatrix:
    """Independent Markov chains over the states ``0..K``, one per node."""
    if n < 1 or t_frames < 1:
        raise ArgumentError("n and t_frames must be positive")
    rng = np.random.default_rng(seed)
    labels = np.zeros((n, t_frames), dtype=np.int64)
    labels[:, 0] = _draw_states(rng, np.broadcast_to(params.alpha, (n, params.k + 1)))
    for t in range(1, t_frames):
        labels[:, t] = _draw_states(rng, params.pi[labels[:, t - 1]])
    return AllocationMatrix(labels, params.k)


def sample_edges(
    z: AllocationMatrix, params: ModelParameters, seed: SeedLike = None
) -> tuple[AdjacencyCube, np.ndarray]:
    """
    Draw the edges given the allocation.

    Returns:
        The cube (activity from ``z``) and the ``(T, N, N)`` class codes of the draws.
    """
    if z.k_up < params.k:
        raise ArgumentError(f"allocation allows {z.k_up} groups, parameters have {params.k}")
    if z.labels.max(initial=0) > params.k:
        raise ArgumentError(f"allocation uses labels above {params.k}")
    rng = np.random.default_rng(seed)
    n, t_frames = z.shape
    active = z.labels != INACTIVE
    iu, ju = np.triu_indices(n, k=1)
    codes = np.full((t_frames, n, n), UNOBSERVED, dtype=np.int8)
    triples: list[np.ndarray] = []
    x_prev = np.zeros(iu.size, dtype=bool)
    observed_prev = np.zeros(iu.size, dtype=bool)

    for t in range(t_frames):
        observed = active[iu, t] & active[ju, t]
        g = np.maximum(z.labels[iu, t] - 1, 0)
        h = np.maximum(z.labels[ju, t] - 1, 0)
        first = observed & ~observed_prev
        created = observed & observed_prev & ~x_prev
        kept = observed & observed_prev & x_prev

        prob = np.zeros(iu.size)
        prob[first] = params.theta[g[first], h[first]]
        prob[created] = params.p[g[created], h[created]]
        prob[kept] = 1.0 - params.q[g[kept], h[kept]]
        x = rng.random(iu.size) < prob

        frame_codes = np.full(iu.size, UNOBSERVED, dtype=np.int8)
        frame_codes[first & x] = ETA
        frame_codes[first & ~x] = ZETA
        frame_codes[created & x] = U01
        frame_codes[created & ~x] = U00
        frame_codes[kept & ~x] = U10
        frame_codes[kept & x] = U11
        codes[t, iu, ju] = frame_codes
        codes[t, ju, iu] = frame_codes

        hits = np.flatnonzero(x)
        triples.append(np.column_stack([np.full(hits.size, t), iu[hits], ju[hits]]))
        x_prev, observed_prev = x, observed

    cube = AdjacencyCube.from_edges(n, t_frames, np.concatenate(triples), active=active)
    return cube, codes


def simulate(
    n: int,
    t_frames: int,
    k: int,
    source: Hyperparameters | ModelParameters,
    seed: SeedLike = None,
    no_inactive: bool = False,
) -> SimOutput:
    """
    Simulate one dataset.

    Args:
        source: Hyperparameters to draw the parameters from, or fixed parameters.
        no_inactive: Remove every transition into the inactive state before sampling.
    """
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    params_seed, alloc_seed, edge_seed = root.spawn(3)
    if isinstance(source, ModelParameters):
        if source.k != k:
            raise ArgumentError(f"parameters have {source.k} groups, asked for {k}")
        params = source
    else:
        params = sample_params(k, source, params_seed)
    if no_inactive:
        params = params.without_inactivity()
    z_true = sample_allocations(n, t_frames, params, alloc_seed)
    cube, codes = sample_edges(z_true, params, edge_seed)
    logger.debug(
        "network_simulated",
        nodes=n,
        frames=t_frames,
        groups=k,
        edges=int(cube.edges_per_frame().sum()),
        inactive_fraction=round(cube.activity.inactive_fraction, 4),
    )
    return SimOutput(cube=cube, z_true=z_true, params=params, dyad_codes=codes)


def simulate_replicates(
    n_replicates: int,
    n: int,
    t_frames: int,
    k: int,
    source: Hyperparameters | ModelParameters,
    seed: int | None = None,
    no_inactive: bool = False,
) -> list[SimOutput]:
    """Independent datasets with seeds spawned from one root seed."""
    children = np.random.SeedSequence(seed).spawn(n_replicates)
    return [simulate(n, t_frames, k, source, child, no_inactive=no_inactive) for child in children]
