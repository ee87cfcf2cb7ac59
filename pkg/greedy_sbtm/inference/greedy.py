"""Greedy maximisation of the exact ICL.

Each restart draws an initial allocation, sweeps over the active (frame, node)
entries in shuffled order moving every entry to its best label, and finishes
with a merge phase that fuses whole groups while the criterion increases.
Restarts run on a thread pool with independent random streams.
"""

from __future__ import annotations

import os
import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import structlog

from greedy_sbtm.inference.allocation import AllocationMatrix, compact_labels
from greedy_sbtm.inference.icl import difference, log_icl_delta_merge, log_icl_full, move_scores
from greedy_sbtm.inference.init import INITIALISERS
from greedy_sbtm.inference.suffstats import (
    SufficientStats,
    apply_move,
    compute_stats,
    frame_dyad_codes,
    merge_stats,
)
from greedy_sbtm.ingestion.cube import AdjacencyCube
from greedy_sbtm.ingestion.exceptions import ArgumentError
from greedy_sbtm.models.fit import FitConfig, FitResult, KUpSearchResult, TraceEntry
from greedy_sbtm.models.priors import Hyperparameters, PriorSettings
from greedy_sbtm.utils.logging import clear_log_context, log_context

logger = structlog.get_logger(__name__)


@dataclass(eq=False)
class GreedyState:
    """
    Mutable search state of one restart.

    The criterion is tracked as three components so that a ``-inf`` initial-state
    part never turns the finite transition and block parts into NaN.
    """

    cube: AdjacencyCube
    hyper: Hyperparameters
    z: AllocationMatrix
    stats: SufficientStats
    initial_term: float
    transition_term: float
    block_term: float
    alpha_fallback: bool = False
    tolerance: float = 1e-12
    n_moves: int = 0
    n_merges: int = 0
    _codes: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    @classmethod
    def build(
        cls, cube: AdjacencyCube, hyper: Hyperparameters, z: AllocationMatrix, tolerance: float = 1e-12
    ) -> GreedyState:
        if hyper.k_up != z.k_up:
            raise ArgumentError(f"hyperparameters sized for K_up={hyper.k_up}, allocation uses {z.k_up}")
        z = z.copy()
        stats = compute_stats(cube, z)
        value = log_icl_full(stats, hyper)
        return cls(
            cube=cube,
            hyper=hyper,
            z=z,
            stats=stats,
            initial_term=value.initial_term,
            transition_term=value.transition_term,
            block_term=value.block_term,
            alpha_fallback=value.alpha_fallback,
            tolerance=tolerance,
        )

    @property
    def log_icl(self) -> float:
        return self.initial_term + self.transition_term + self.block_term

    @property
    def n_groups(self) -> int:
        return self.stats.n_groups

    def frame_codes(self, t: int) -> np.ndarray:
        """Dyad class codes of frame t, memoised (they do not depend on the allocation)."""
        codes = self._codes.get(t)
        if codes is None:
            codes = frame_dyad_codes(self.cube, t)
            self._codes[t] = codes
        return codes

    def refresh(self) -> None:
        """Recompute the criterion components from the current statistics."""
        value = log_icl_full(self.stats, self.hyper)
        self.initial_term = value.initial_term
        self.transition_term = value.transition_term
        self.block_term = value.block_term
        self.alpha_fallback = value.alpha_fallback

    def snapshot(self) -> tuple[float, float, float]:
        return self.initial_term, self.transition_term, self.block_term

    def gain_since(self, snapshot: tuple[float, float, float]) -> float:
        """Criterion change since ``snapshot`` was taken."""
        initial, transitions, blocks = snapshot
        return (
            difference(self.initial_term, initial)
            + (self.transition_term - transitions)
            + (self.block_term - blocks)
        )

    def best_move(self, t: int, i: int) -> bool:
        """
        Move node i at frame t to its best label if that strictly improves the criterion.

        The current label is kept on ties; among other tied labels the smallest wins.

        Returns:
            True if the node was moved.
        """
        codes = self.frame_codes(t)[i]
        scores = move_scores(self.stats, self.hyper, self.cube, self.z, t, i, codes=codes)
        deltas = scores.deltas()
        best = int(np.argmax(deltas[1:])) + 1
        if not deltas[best] > self.tolerance:
            return False
        apply_move(self.stats, self.cube, self.z, t, i, best, codes=codes)
        self.initial_term = float(scores.initial[best])
        self.transition_term += float(scores.transition_change[best])
        self.block_term += float(scores.block_change[best])
        self.n_moves += 1
        return True


def greedy_sweep(
    state: GreedyState, order_seed: int | np.random.SeedSequence | None = None
) -> tuple[GreedyState, bool]:
    """
    Visit every active (frame, node) entry once in shuffled order and apply its best move.

    Returns:
        The state and whether the criterion strictly increased over the sweep.
    """
    rng = np.random.default_rng(order_seed)
    entries = np.argwhere(state.cube.active)
    start = state.snapshot()
    moves = 0
    for idx in rng.permutation(entries.shape[0]):
        i, t = entries[idx]
        moves += state.best_move(int(t), int(i))
    gain = state.gain_since(start)
    improved = gain > state.tolerance
    logger.debug("sweep_completed", moves=moves, gain=gain, log_icl=state.log_icl, groups=state.n_groups)
    return state, improved


def merge_phase(state: GreedyState) -> GreedyState:
    """
    Fuse pairs of groups while the best merge strictly increases the criterion.

    The larger label is folded into the smaller one. The number of merges applied
    is added to ``state.n_merges``.
    """
    while True:
        labels = state.stats.nonempty_labels()
        if labels.size < 2:
            break
        best_delta, best_pair = -np.inf, None
        current = log_icl_full(state.stats, state.hyper)
        for pos, g in enumerate(labels):
            for h in labels[pos + 1 :]:
                delta = log_icl_delta_merge(state.stats, state.hyper, int(g), int(h), before=current)
                if delta > best_delta:
                    best_delta, best_pair = delta, (int(g), int(h))
        if best_pair is None or not best_delta > state.tolerance:
            break
        g, h = best_pair
        state.stats = merge_stats(state.stats, g, h)
        state.z.labels[state.z.labels == h] = g
        state.refresh()
        state.n_merges += 1
        logger.debug("groups_merged", kept=g, removed=h, delta=best_delta, log_icl=state.log_icl)
    return state


@dataclass(frozen=True)
class _RestartOutcome:
    state: GreedyState
    n_sweeps: int
    n_merges: int
    restart_index: int
    trace: tuple[TraceEntry, ...]


def _sweep_until_converged(state: GreedyState, streams: np.random.SeedSequence, max_sweeps: int) -> int:
    sweeps = 0
    while sweeps < max_sweeps:
        _, improved = greedy_sweep(state, streams.spawn(1)[0])
        sweeps += 1
        if not improved:
            break
    return sweeps


def _run_restart(
    cube: AdjacencyCube, hyper: Hyperparameters, config: FitConfig, index: int, seq: np.random.SeedSequence
) -> _RestartOutcome:
    log_context(restart=index)
    try:
        init_seq, sweep_seq = seq.spawn(2)
        z0 = INITIALISERS[config.init_method](cube, config.k_up, init_seq)
        state = GreedyState.build(cube, hyper, z0, tolerance=config.tolerance)
        trace = [TraceEntry("init", state.log_icl, state.n_groups)]

        sweeps = _sweep_until_converged(state, sweep_seq, config.max_sweeps)
        trace.append(TraceEntry("sweeps", state.log_icl, state.n_groups))
        merge_phase(state)
        merged = state.n_merges
        while config.resweep_after_merge and merged and sweeps < config.max_sweeps:
            sweeps += _sweep_until_converged(state, sweep_seq, config.max_sweeps - sweeps)
            before = state.n_merges
            merge_phase(state)
            merged = state.n_merges - before
        trace.append(TraceEntry("merges", state.log_icl, state.n_groups))
        logger.info(
            "restart_completed",
            log_icl=state.log_icl,
            groups=state.n_groups,
            sweeps=sweeps,
            merges=state.n_merges,
            moves=state.n_moves,
        )
        return _RestartOutcome(state, sweeps, state.n_merges, index, tuple(trace))
    finally:
        clear_log_context("restart")


def fit(cube: AdjacencyCube, hyper: Hyperparameters, config: FitConfig) -> FitResult:
    """
    Run the greedy search from ``config.n_restarts`` initial allocations and keep the best.

    The best restart has the highest criterion; ties go to fewer groups, then to
    the lower restart index. The result does not depend on the number of threads.

    Raises:
        ArgumentError: If the hyperparameters are sized for a different ``k_up``.
    """
    if hyper.k_up != config.k_up:
        raise ArgumentError(f"hyperparameters sized for K_up={hyper.k_up}, config asks for {config.k_up}")
    started = time.perf_counter()

    if config.k_up == 1:
        state = GreedyState.build(cube, hyper, AllocationMatrix.from_activity(cube.active, 1), config.tolerance)
        return FitResult(
            z_hat=state.z,
            log_icl=state.log_icl,
            k_hat=state.n_groups,
            n_sweeps=0,
            restart_index=0,
            wall_time=time.perf_counter() - started,
            alpha_fallback=state.alpha_fallback,
            trace=(TraceEntry("init", state.log_icl, state.n_groups),),
        )

    streams = np.random.SeedSequence(config.seed).spawn(config.n_restarts)
    workers = config.threads or min(config.n_restarts, os.cpu_count() or 1)
    logger.info(
        "fit_started",
        nodes=cube.n_nodes,
        frames=cube.n_frames,
        k_up=config.k_up,
        restarts=config.n_restarts,
        init=config.init_method,
        workers=workers,
    )
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(
            pool.map(lambda job: _run_restart(cube, hyper, config, *job), enumerate(streams))
        )

    best = min(outcomes, key=lambda o: (-o.state.log_icl, o.state.n_groups, o.restart_index))
    z_hat = compact_labels(best.state.z)
    value = log_icl_full(compute_stats(cube, z_hat), hyper)
    result = FitResult(
        z_hat=z_hat,
        log_icl=value.log_icl,
        k_hat=z_hat.n_groups,
        n_sweeps=best.n_sweeps,
        restart_index=best.restart_index,
        wall_time=time.perf_counter() - started,
        n_merges=best.n_merges,
        alpha_fallback=value.alpha_fallback,
        trace=best.trace,
    )
    logger.info(
        "fit_completed",
        log_icl=result.log_icl,
        k_hat=result.k_hat,
        restart=result.restart_index,
        seconds=round(result.wall_time, 3),
    )
    return result


def fit_k_up_grid(
    cube: AdjacencyCube, priors: PriorSettings, config: FitConfig, k_ups: Sequence[int]
) -> KUpSearchResult:
    """
    Fit once per ``k_up`` value, with the seed and options of ``config``, and keep the best fit.

    Ties go to fewer groups, then to the value listed first. Repeated values are fitted once.

    Raises:
        ArgumentError: If ``k_ups`` is empty or holds a value below 1.
    """
    values = list(dict.fromkeys(int(k) for k in k_ups))
    if not values or min(values) < 1:
        raise ArgumentError(f"k_up values must be a nonempty list of positive integers, got {list(k_ups)}")

    runs = []
    for k_up in values:
        run_config = FitConfig(**{**config.model_dump(), "k_up": k_up})
        runs.append(fit(cube, priors.expand(k_up), run_config))
    position = min(range(len(runs)), key=lambda p: (-runs[p].log_icl, runs[p].k_hat, p))
    scores = {k_up: run.log_icl for k_up, run in zip(values, runs, strict=True)}
    if len(values) > 1:
        logger.info("k_up_grid_completed", k_up=values[position], log_icl_by_k_up=scores)
    return KUpSearchResult(best=runs[position], k_up=values[position], log_icl_by_k_up=scores)
