"""Exact integrated completed likelihood (log scale).

The criterion splits into an allocation part (initial-state probabilities and
Dirichlet-multinomial transition rows) and a block part (three Beta-binomial
families over unordered group pairs). Every gamma function is evaluated on the
log scale through :func:`scipy.special.gammaln`.

``-inf`` is the sentinel for allocations of zero prior mass (a group occupied at
the first frame but never afterwards). It can only come from the initial-state
term; the transition and block terms are always finite. Differences between
two ``-inf`` values are taken as 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from greedy_sbtm.inference.allocation import AllocationMatrix
from greedy_sbtm.inference.suffstats import (
    FAILURE_CLASSES,
    SUCCESS_CLASSES,
    SufficientStats,
    check_move,
    merge_stats,
    neighbour_class_counts,
    node_dyad_codes,
    shift_group,
)
from greedy_sbtm.ingestion.cube import AdjacencyCube
from greedy_sbtm.ingestion.exceptions import ArgumentError
from greedy_sbtm.models.priors import Hyperparameters


@dataclass(frozen=True)
class IclValue:
    """
    Attributes:
        log_icl: Natural log of the exact ICL, or ``-inf``.
        initial_term: Initial-state part, ``-inf`` for zero prior mass.
        transition_term: Dirichlet-multinomial part of the transition rows.
        block_term: Beta-binomial part.
        alpha_fallback: True when the initial-state probabilities could not be
            estimated from later frames (a single frame) and were taken uniform.
        n_groups: Number of nonempty groups.
    """

    log_icl: float
    initial_term: float
    transition_term: float
    block_term: float
    alpha_fallback: bool
    n_groups: int

    @property
    def allocation_term(self) -> float:
        """Initial-state and transition part."""
        return self.initial_term + self.transition_term

    @property
    def is_finite(self) -> bool:
        return bool(np.isfinite(self.log_icl))


@dataclass(frozen=True)
class MoveScores:
    """
    Criterion components after moving one node to each label.

    Index g of every array refers to the move to label g; index 0 is never a
    valid target. ``initial`` holds the absolute initial-state term after the
    move, ``transition_change`` and ``block_change`` are relative to the
    current allocation.
    """

    current: int
    initial: np.ndarray
    transition_change: np.ndarray
    block_change: np.ndarray

    def deltas(self) -> np.ndarray:
        """Change of log ICL for every candidate label."""
        base = self.initial[self.current]
        with np.errstate(invalid="ignore"):
            change = np.where(self.initial == base, 0.0, self.initial - base)
        return change + self.transition_change + self.block_change


def difference(after: float, before: float) -> float:
    """``after - before`` with ``-inf - -inf`` taken as 0."""
    if after == before:
        return 0.0
    return float(after - before)


def alpha_from_sizes(n1: np.ndarray, n_agg: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Initial-state probabilities proportional to the aggregated sizes of later frames.

    The normalisation runs over every state, 0 included. Without later frames the
    probabilities are uniform over the states occupied at the first frame.

    Works on a trailing state axis, so batches of size vectors are accepted.

    Returns:
        ``(alpha, fallback)``, where ``fallback`` flags the uniform case.
    """
    n1 = np.asarray(n1, dtype=np.float64)
    n_agg = np.asarray(n_agg, dtype=np.float64)
    total = n_agg.sum(axis=-1, keepdims=True)
    occupied = (n1 > 0).astype(np.float64)
    n_occupied = np.maximum(occupied.sum(axis=-1, keepdims=True), 1.0)
    fallback = total == 0
    with np.errstate(invalid="ignore", divide="ignore"):
        alpha = np.where(fallback, occupied / n_occupied, n_agg / np.where(fallback, 1.0, total))
    return alpha, fallback[..., 0]


def _initial_cells(n1: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """``n1 * log(alpha)`` per state, with ``0 * log 0 = 0``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(n1 > 0, n1 * np.log(alpha), 0.0)


def initial_term(n1: np.ndarray, n_agg: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Log-probability of the first-frame labels under :func:`alpha_from_sizes`.

    Returns:
        ``(term, alpha_fallback)`` with the batch shape of the inputs.
    """
    alpha, fallback = alpha_from_sizes(n1, n_agg)
    return _initial_cells(np.asarray(n1), alpha).sum(axis=-1), fallback


def _row_norm(delta_sum: np.ndarray, r_sum: np.ndarray) -> np.ndarray:
    return gammaln(delta_sum) - gammaln(delta_sum + r_sum)


def _in_use(n1: np.ndarray, n_agg: np.ndarray) -> np.ndarray:
    in_use = (n1 + n_agg) > 0
    in_use[..., 0] = True
    return in_use


def transition_term(r: np.ndarray, n1: np.ndarray, n_agg: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """
    Dirichlet-multinomial part of the transition rows.

    Rows and the normalising sums run over the states in use: state 0 plus every
    nonempty label. Leading axes of ``r``, ``n1`` and ``n_agg`` are batch axes.
    """
    in_use = _in_use(n1, n_agg)
    delta_sum = (delta * in_use[..., None, :]).sum(axis=-1)
    per_cell = np.where(in_use[..., None, :], gammaln(delta + r) - gammaln(delta), 0.0)
    rows = _row_norm(delta_sum, r.sum(axis=-1)) + per_cell.sum(axis=-1)
    return np.where(in_use, rows, 0.0).sum(axis=-1)


def allocation_term(
    r: np.ndarray, n1: np.ndarray, n_agg: np.ndarray, delta: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """
    Initial-state and Dirichlet-multinomial part of the criterion.

    Returns:
        ``(term, alpha_fallback)`` with the batch shape.
    """
    initial, fallback = initial_term(n1, n_agg)
    return initial + transition_term(r, n1, n_agg, delta), fallback


def _log_beta_posterior(a: np.ndarray, b: np.ndarray, s: np.ndarray, f: np.ndarray) -> np.ndarray:
    return gammaln(a + s) + gammaln(b + f) - gammaln(a + b + s + f)


def beta_binomial_terms(a: np.ndarray, b: np.ndarray, s: np.ndarray, f: np.ndarray) -> np.ndarray:
    """``log B(a + s, b + f) - log B(a, b)``, elementwise; zero when ``s = f = 0``."""
    return _log_beta_posterior(a, b, s, f) - _log_beta_posterior(a, b, 0, 0)


def block_term(stats: SufficientStats, hyper: Hyperparameters) -> float:
    """Sum of the three Beta-binomial families over unordered blocks ``1 <= g <= h``."""
    a, b = hyper.beta_pairs()
    success = stats.blocks[SUCCESS_CLASSES]
    failure = stats.blocks[FAILURE_CLASSES]
    upper = np.triu(np.ones(stats.r.shape, dtype=bool))
    upper[0, :] = False
    terms = beta_binomial_terms(a[:, upper], b[:, upper], success[:, upper], failure[:, upper])
    return float(terms.sum())


def _check_dimensions(stats: SufficientStats, hyper: Hyperparameters) -> None:
    if hyper.k_up != stats.k_up:
        raise ArgumentError(f"hyperparameters sized for K_up={hyper.k_up}, stats for K_up={stats.k_up}")


def log_icl_full(stats: SufficientStats, hyper: Hyperparameters) -> IclValue:
    """Evaluate the exact log ICL from the sufficient statistics."""
    _check_dimensions(stats, hyper)
    initial, fallback = initial_term(stats.n1, stats.n_agg)
    transitions = float(transition_term(stats.r, stats.n1, stats.n_agg, hyper.delta))
    blocks = block_term(stats, hyper)
    initial = float(initial)
    return IclValue(
        log_icl=initial + transitions + blocks,
        initial_term=initial,
        transition_term=transitions,
        block_term=blocks,
        alpha_fallback=bool(fallback),
        n_groups=stats.n_groups,
    )


def _block_changes(
    stats: SufficientStats, hyper: Hyperparameters, counts: np.ndarray, g_old: int
) -> np.ndarray:
    """Block-term change for every target label: remove the node from g_old, add it to each label."""
    a, b = hyper.beta_pairs()
    removed = stats.blocks.copy()
    shift_group(removed, g_old, counts, -1)
    s_old, f_old = stats.blocks[SUCCESS_CLASSES], stats.blocks[FAILURE_CLASSES]
    s_rem, f_rem = removed[SUCCESS_CLASSES], removed[FAILURE_CLASSES]
    cs, cf = counts[SUCCESS_CLASSES][:, None, :], counts[FAILURE_CLASSES][:, None, :]

    removal = (
        _log_beta_posterior(a[:, g_old], b[:, g_old], s_rem[:, g_old], f_rem[:, g_old])
        - _log_beta_posterior(a[:, g_old], b[:, g_old], s_old[:, g_old], f_old[:, g_old])
    ).sum()
    gain = (
        _log_beta_posterior(a, b, s_rem + cs, f_rem + cf) - _log_beta_posterior(a, b, s_rem, f_rem)
    ).sum(axis=(0, 2))
    change = removal + gain
    change[g_old] = 0.0
    change[0] = -np.inf
    return change


def _initial_after_moves(
    stats: SufficientStats, t: int, g_old: int, targets: np.ndarray
) -> tuple[float, np.ndarray]:
    """
    Initial-state term now and after moving one entry of frame t from g_old to each target.

    Only the two states whose count or probability changes are re-evaluated.
    """
    n1, n_agg = stats.n1, stats.n_agg
    alpha, fallback = alpha_from_sizes(n1, n_agg)
    if fallback:
        # Single frame: the uniform probabilities depend on the whole occupied set.
        batch = np.broadcast_to(n1, (targets.size, n1.size)).copy()
        batch[:, g_old] -= 1
        batch[np.arange(targets.size), targets] += 1
        after, _ = initial_term(batch, np.zeros_like(batch))
        return float(initial_term(n1, n_agg)[0]), after

    if t == 0:
        old_cell = _initial_cells(n1[g_old] - 1, alpha[g_old])
        new_cells = _initial_cells(n1[targets] + 1, alpha[targets])
    else:
        total = n_agg.sum()
        old_cell = _initial_cells(n1[g_old], (n_agg[g_old] - 1) / total)
        new_cells = _initial_cells(n1[targets], (n_agg[targets] + 1) / total)

    cells = _initial_cells(n1, alpha)
    dead = np.isneginf(cells).astype(np.int64)
    finite = np.where(dead > 0, 0.0, cells)
    rest_finite = finite.sum() - finite[g_old] - finite[targets]
    rest_dead = dead.sum() - dead[g_old] - dead[targets]
    after = rest_finite + (old_cell if np.isfinite(old_cell) else 0.0) + np.where(
        np.isneginf(new_cells), 0.0, new_cells
    )
    killed = rest_dead + int(np.isneginf(old_cell)) + np.isneginf(new_cells).astype(np.int64)
    current = -np.inf if dead.any() else float(finite.sum())
    return current, np.where(killed > 0, -np.inf, after)


def _transition_changes(
    stats: SufficientStats,
    delta: np.ndarray,
    g_old: int,
    prev: int | None,
    nxt: int | None,
    targets: np.ndarray,
) -> np.ndarray:
    """
    Transition-term change for moving one entry from g_old to each target.

    Touches the cells of rows ``prev``, ``g_old`` and the target that the two
    transitions of the entry change, the row sums of g_old and the target, and,
    when the set of states in use changes, the Dirichlet normalisers of every row.
    """
    m = targets.size
    change = np.zeros(m)
    if prev is None and nxt is None:
        return change
    idx = np.arange(m)
    r = stats.r

    # Local copies of rows (prev, g_old, target); prev shares a slot when it coincides.
    rows = np.empty((m, 3), dtype=np.int64)
    rows[:, 0] = 0 if prev is None else prev
    rows[:, 1] = g_old
    rows[:, 2] = targets
    before = r[rows]
    after = before.copy()
    if prev is not None:
        slot = np.full(m, 1) if prev == g_old else np.where(targets == prev, 2, 0)
        after[idx, slot, g_old] -= 1
        after[idx, slot, targets] += 1
    if nxt is not None:
        after[:, 1, nxt] -= 1
        after[idx, 2, nxt] += 1
    changed = after != before
    cand, slot_of, col = np.nonzero(changed)
    d = delta[rows[cand, slot_of], col]
    cells = gammaln(d + after[changed]) - gammaln(d + before[changed])
    change += np.bincount(cand, weights=cells, minlength=m)

    occupancy = stats.occupancy
    in_use = _in_use(stats.n1, stats.n_agg)
    delta_sum = (delta * in_use).sum(axis=1)
    r_sum = r.sum(axis=1)
    step = 0 if nxt is None else 1

    vacated = occupancy[g_old] == 1
    opened = occupancy[targets] == 0
    same_set = ~opened & ~vacated
    if step and same_set.any():
        kept = targets[same_set]
        change[same_set] += (
            _row_norm(delta_sum[g_old], r_sum[g_old] - 1)
            - _row_norm(delta_sum[g_old], r_sum[g_old])
            + _row_norm(delta_sum[kept], r_sum[kept] + 1)
            - _row_norm(delta_sum[kept], r_sum[kept])
        )
    if not same_set.all():
        sel = np.flatnonzero(~same_set)
        moved = targets[sel]
        sums = np.broadcast_to(delta_sum, (sel.size, delta_sum.size)).copy()
        if vacated:
            sums -= delta[:, g_old]
        sums += opened[sel, None] * delta[:, moved].T
        counts = np.broadcast_to(r_sum, sums.shape).copy()
        counts[:, g_old] -= step
        counts[np.arange(sel.size), moved] += step
        change[sel] += _row_norm(sums, counts).sum(axis=1) - _row_norm(delta_sum, r_sum).sum()
    return change


def move_scores(
    stats: SufficientStats,
    hyper: Hyperparameters,
    cube: AdjacencyCube,
    z: AllocationMatrix,
    t: int,
    i: int,
    codes: np.ndarray | None = None,
) -> MoveScores:
    """
    Score every candidate label ``1..K_up`` for node i at frame t without mutating anything.

    Only the affected terms are evaluated: the blocks in the rows of the old and
    candidate labels, the transition cells and row sums touched by the entry's
    two transitions, and the initial-state cells of the old and candidate labels.
    """
    _check_dimensions(stats, hyper)
    g_old = check_move(z, t, i, 1)
    k1 = z.k_up + 1
    if codes is None:
        codes = node_dyad_codes(cube, t, i)
    counts = neighbour_class_counts(codes, z.labels[:, t], z.k_up)
    block_change = _block_changes(stats, hyper, counts, g_old)

    targets = np.setdiff1d(np.arange(1, k1), [g_old])
    prev = int(z.labels[i, t - 1]) if t > 0 else None
    nxt = int(z.labels[i, t + 1]) if t < z.n_frames - 1 else None

    initial = np.full(k1, -np.inf)
    initial[g_old], initial[targets] = _initial_after_moves(stats, t, g_old, targets)
    transition_change = np.zeros(k1)
    if targets.size:
        transition_change[targets] = _transition_changes(stats, hyper.delta, g_old, prev, nxt, targets)
    return MoveScores(
        current=g_old, initial=initial, transition_change=transition_change, block_change=block_change
    )


def log_icl_delta_move(
    stats: SufficientStats,
    hyper: Hyperparameters,
    cube: AdjacencyCube,
    z: AllocationMatrix,
    t: int,
    i: int,
    g_new: int,
) -> float:
    """
    Change of log ICL when node i at frame t moves to ``g_new``.

    Raises:
        ConsistencyError: As :func:`greedy_sbtm.inference.suffstats.apply_move`.
    """
    g_old = check_move(z, t, i, g_new)
    if g_new == g_old:
        return 0.0
    return float(move_scores(stats, hyper, cube, z, t, i).deltas()[g_new])


def log_icl_delta_merge(
    stats: SufficientStats, hyper: Hyperparameters, g: int, h: int, before: IclValue | None = None
) -> float:
    """
    Change of log ICL when every occurrence of label h is relabelled g.

    Args:
        before: The criterion at ``stats``, when the caller already has it.

    Raises:
        ArgumentError: If ``g == h`` or either group is empty.
    """
    if before is None:
        before = log_icl_full(stats, hyper)
    after = log_icl_full(merge_stats(stats, g, h), hyper)
    return (
        difference(after.initial_term, before.initial_term)
        + (after.transition_term - before.transition_term)
        + (after.block_term - before.block_term)
    )
