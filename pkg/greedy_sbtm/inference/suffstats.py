"""Block-level sufficient statistics of a dynamic network under an allocation.

Every observed dyad-frame ``(i < j, t)`` with both endpoints active falls in
exactly one of six classes:

====  ==========  ===================================================
code  name        regime / outcome
====  ==========  ===================================================
0     ``eta``     no observable previous state, edge present
1     ``zeta``    no observable previous state, edge absent
2     ``u01``     previously observed without edge, edge created
3     ``u00``     previously observed without edge, still absent
4     ``u10``     previously observed with edge, edge dropped
5     ``u11``     previously observed with edge, edge kept
====  ==========  ===================================================

``zeta`` is the failure count complementary to ``eta``: ``eta + zeta``
counts every dyad-frame of the first regime in the block.

Counts are kept in a ``(6, K_up + 1, K_up + 1)`` array holding full symmetric
block matrices (row/column 0 is always zero). A dyad inside one group
increments the diagonal entry once.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
import structlog

from greedy_sbtm.inference.allocation import INACTIVE, AllocationMatrix
from greedy_sbtm.ingestion.cube import AdjacencyCube
from greedy_sbtm.ingestion.exceptions import ArgumentError, ConsistencyError

logger = structlog.get_logger(__name__)

ETA, ZETA, U01, U00, U10, U11 = range(6)
N_CLASSES = 6
UNOBSERVED = -1
CLASS_NAMES = ("eta", "zeta", "u01", "u00", "u10", "u11")

# (success, failure) class codes of the three Beta-binomial families.
SUCCESS_CLASSES = np.array([ETA, U01, U10])
FAILURE_CLASSES = np.array([ZETA, U00, U11])

ZETA_CONVENTION = "zeta = failures complementary to eta over first-regime dyad-frames"


@dataclass(eq=False)
class SufficientStats:
    """
    Counts the likelihood and the ICL factorise over.

    Attributes:
        blocks: ``(6, K1, K1)`` symmetric class counts per block, ``K1 = K_up + 1``.
        r: ``(K1, K1)`` label transition counts between consecutive frames.
        n1: Group sizes at the first frame, state 0 included.
        n_agg: Group sizes aggregated over every later frame, state 0 included.
    """

    blocks: np.ndarray
    r: np.ndarray
    n1: np.ndarray
    n_agg: np.ndarray

    @classmethod
    def zeros(cls, k_up: int) -> SufficientStats:
        k1 = k_up + 1
        return cls(
            blocks=np.zeros((N_CLASSES, k1, k1), dtype=np.int64),
            r=np.zeros((k1, k1), dtype=np.int64),
            n1=np.zeros(k1, dtype=np.int64),
            n_agg=np.zeros(k1, dtype=np.int64),
        )

    @property
    def k_up(self) -> int:
        return int(self.r.shape[0] - 1)

    @property
    def eta(self) -> np.ndarray:
        return self.blocks[ETA]

    @property
    def zeta(self) -> np.ndarray:
        return self.blocks[ZETA]

    @property
    def u01(self) -> np.ndarray:
        return self.blocks[U01]

    @property
    def u00(self) -> np.ndarray:
        return self.blocks[U00]

    @property
    def u10(self) -> np.ndarray:
        return self.blocks[U10]

    @property
    def u11(self) -> np.ndarray:
        return self.blocks[U11]

    @property
    def occupancy(self) -> np.ndarray:
        """Total number of (node, frame) entries per state."""
        return self.n1 + self.n_agg

    def nonempty_labels(self) -> np.ndarray:
        return np.flatnonzero(self.occupancy[1:] > 0) + 1

    @property
    def n_groups(self) -> int:
        return int(self.nonempty_labels().size)

    def class_totals(self) -> np.ndarray:
        """Per-class totals over unordered blocks."""
        upper = np.triu(np.ones(self.r.shape, dtype=bool))
        return self.blocks[:, upper].sum(axis=1)

    @property
    def n_dyads(self) -> int:
        """Number of observed dyad-frames counted."""
        return int(self.class_totals().sum())

    def copy(self) -> SufficientStats:
        return SufficientStats(self.blocks.copy(), self.r.copy(), self.n1.copy(), self.n_agg.copy())

    def permuted(self, perm: np.ndarray) -> SufficientStats:
        """Stats with block indices relabelled: new index ``perm[g]`` takes old index ``g``."""
        perm = np.asarray(perm, dtype=np.int64)
        inverse = np.empty_like(perm)
        inverse[perm] = np.arange(perm.size)
        return SufficientStats(
            blocks=self.blocks[:, inverse][:, :, inverse],
            r=self.r[inverse][:, inverse],
            n1=self.n1[inverse],
            n_agg=self.n_agg[inverse],
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SufficientStats):
            return NotImplemented
        return (
            np.array_equal(self.blocks, other.blocks)
            and np.array_equal(self.r, other.r)
            and np.array_equal(self.n1, other.n1)
            and np.array_equal(self.n_agg, other.n_agg)
        )

    __hash__ = None  # type: ignore[assignment]

    def dump(self) -> str:
        """Diagnostic text rendering of every count matrix."""
        out = io.StringIO()
        out.write(f"# sufficient statistics, K_up={self.k_up}, dyad-frames={self.n_dyads}\n")
        out.write(f"# convention: {ZETA_CONVENTION}\n")
        labels = slice(1, None)
        for code, name in enumerate(CLASS_NAMES):
            out.write(f"[{name}] (rows/columns 1..K_up)\n")
            np.savetxt(out, self.blocks[code, labels, labels], fmt="%d")
        out.write("[r] (rows/columns 0..K_up)\n")
        np.savetxt(out, self.r, fmt="%d")
        out.write("[n1]\n" + " ".join(str(v) for v in self.n1) + "\n")
        out.write("[n_agg]\n" + " ".join(str(v) for v in self.n_agg) + "\n")
        return out.getvalue()


def _classify(observed: np.ndarray, prev_observed: np.ndarray, x_prev: np.ndarray, x_now: np.ndarray) -> np.ndarray:
    codes = np.full(observed.shape, UNOBSERVED, dtype=np.int8)
    first = observed & ~prev_observed
    carried = observed & prev_observed
    created = carried & ~x_prev
    kept = carried & x_prev
    codes[first & x_now] = ETA
    codes[first & ~x_now] = ZETA
    codes[created & x_now] = U01
    codes[created & ~x_now] = U00
    codes[kept & ~x_now] = U10
    codes[kept & x_now] = U11
    return codes


def frame_dyad_codes(cube: AdjacencyCube, t: int) -> np.ndarray:
    """
    Class code of every dyad of frame t as an ``N x N`` int8 matrix.

    Unobserved dyads (an inactive endpoint, or the diagonal) are -1.
    """
    a_now = cube.active[:, t]
    observed = np.outer(a_now, a_now)
    np.fill_diagonal(observed, False)
    if t == 0:
        prev_observed = np.zeros_like(observed)
        x_prev = prev_observed
    else:
        a_prev = cube.active[:, t - 1]
        prev_observed = np.outer(a_prev, a_prev)
        x_prev = cube.x_dense(t - 1)
    return _classify(observed, prev_observed, x_prev, cube.x_dense(t))


def node_dyad_codes(cube: AdjacencyCube, t: int, i: int) -> np.ndarray:
    """Class codes of node i's dyads at frame t (row i of :func:`frame_dyad_codes`)."""
    observed = cube.y_row(t, i)
    if t == 0:
        prev_observed = np.zeros_like(observed)
        x_prev = prev_observed
    else:
        prev_observed = cube.y_row(t - 1, i)
        x_prev = cube.x_row(t - 1, i)
    return _classify(observed, prev_observed, x_prev, cube.x_row(t, i))


def neighbour_class_counts(codes: np.ndarray, labels: np.ndarray, k_up: int) -> np.ndarray:
    """
    Tally one node's dyads by class and by the neighbour's label.

    Args:
        codes: Class codes of the node's dyads (see :func:`node_dyad_codes`).
        labels: Labels of every node at the same frame.
        k_up: Label bound.

    Returns:
        ``(6, K_up + 1)`` integer counts.
    """
    k1 = k_up + 1
    seen = codes >= 0
    flat = codes[seen].astype(np.int64) * k1 + labels[seen]
    return np.bincount(flat, minlength=N_CLASSES * k1).reshape(N_CLASSES, k1)


def compute_stats(cube: AdjacencyCube, z: AllocationMatrix) -> SufficientStats:
    """
    Tally every sufficient statistic from scratch.

    Raises:
        ConsistencyError: If the allocation shape or inactivity pattern disagrees with the cube.
    """
    if z.shape != (cube.n_nodes, cube.n_frames):
        raise ConsistencyError(
            f"allocation shape {z.shape} does not match cube ({cube.n_nodes} nodes, {cube.n_frames} frames)"
        )
    z.check_activity(cube.active)

    k1 = z.k_up + 1
    labels = z.labels
    iu, ju = np.triu_indices(cube.n_nodes, k=1)
    upper = np.zeros(N_CLASSES * k1 * k1, dtype=np.int64)
    for t in range(cube.n_frames):
        codes = frame_dyad_codes(cube, t)[iu, ju]
        seen = codes >= 0
        if not seen.any():
            continue
        g = labels[iu[seen], t]
        h = labels[ju[seen], t]
        lo, hi = np.minimum(g, h), np.maximum(g, h)
        flat = (codes[seen].astype(np.int64) * k1 + lo) * k1 + hi
        upper += np.bincount(flat, minlength=upper.size)
    upper = upper.reshape(N_CLASSES, k1, k1)

    blocks = upper + upper.transpose(0, 2, 1)
    diag = np.arange(k1)
    blocks[:, diag, diag] = upper[:, diag, diag]

    r = np.zeros((k1, k1), dtype=np.int64)
    if cube.n_frames > 1:
        np.add.at(r, (labels[:, :-1].ravel(), labels[:, 1:].ravel()), 1)

    stats = SufficientStats(
        blocks=blocks,
        r=r,
        n1=np.bincount(labels[:, 0], minlength=k1).astype(np.int64),
        n_agg=np.bincount(labels[:, 1:].ravel(), minlength=k1).astype(np.int64),
    )
    logger.debug("stats_computed", k_up=z.k_up, dyad_frames=stats.n_dyads, groups=stats.n_groups)
    return stats


def shift_group(blocks: np.ndarray, g: int, counts: np.ndarray, sign: int) -> None:
    """Add ``sign * counts`` to row and column g of every block matrix, in place."""
    blocks[:, g, :] += sign * counts
    blocks[:, :, g] += sign * counts
    blocks[:, g, g] -= sign * counts[:, g]


def check_move(z: AllocationMatrix, t: int, i: int, g_new: int) -> int:
    """
    Validate a single-entry move and return the current label.

    Raises:
        ConsistencyError: If node i is inactive at t or ``g_new`` is outside ``1..K_up``.
    """
    g_old = int(z.labels[i, t])
    if g_old == INACTIVE:
        raise ConsistencyError(f"node {i} is inactive at frame {t} and cannot be moved")
    if not 1 <= g_new <= z.k_up:
        raise ConsistencyError(f"target label {g_new} outside 1..{z.k_up}")
    return g_old


def apply_move(
    stats: SufficientStats,
    cube: AdjacencyCube,
    z: AllocationMatrix,
    t: int,
    i: int,
    g_new: int,
    codes: np.ndarray | None = None,
) -> SufficientStats:
    """
    Relabel node i at frame t and update ``stats`` and ``z`` in place.

    Only the blocks touching node i's dyads at frame t, the transition counts
    ``(t-1 -> t)`` and ``(t -> t+1)`` of node i, and the frame size vectors change.

    Args:
        codes: Precomputed :func:`node_dyad_codes` for ``(t, i)``; computed when omitted.

    Returns:
        The same ``stats`` object.
    """
    g_old = check_move(z, t, i, g_new)
    if g_new == g_old:
        return stats
    if codes is None:
        codes = node_dyad_codes(cube, t, i)
    counts = neighbour_class_counts(codes, z.labels[:, t], z.k_up)
    shift_group(stats.blocks, g_old, counts, -1)
    shift_group(stats.blocks, g_new, counts, +1)

    sizes = stats.n1 if t == 0 else stats.n_agg
    sizes[g_old] -= 1
    sizes[g_new] += 1
    if t > 0:
        prev = z.labels[i, t - 1]
        stats.r[prev, g_old] -= 1
        stats.r[prev, g_new] += 1
    if t < z.n_frames - 1:
        nxt = z.labels[i, t + 1]
        stats.r[g_old, nxt] -= 1
        stats.r[g_new, nxt] += 1

    z.labels[i, t] = g_new
    return stats


def merge_stats(stats: SufficientStats, g: int, h: int) -> SufficientStats:
    """
    Stats of the allocation where every occurrence of label h becomes g.

    Computed from the count matrices alone.

    Raises:
        ArgumentError: If ``g == h``, a label is outside ``1..K_up`` or a group is empty.
    """
    if g == h:
        raise ArgumentError(f"cannot merge group {g} with itself")
    for label in (g, h):
        if not 1 <= label <= stats.k_up:
            raise ArgumentError(f"label {label} outside 1..{stats.k_up}")
        if stats.occupancy[label] == 0:
            raise ArgumentError(f"group {label} is empty")

    b = stats.blocks
    blocks = b.copy()
    blocks[:, g, :] += b[:, h, :]
    blocks[:, :, g] += b[:, :, h]
    blocks[:, g, g] = b[:, g, g] + b[:, h, h] + b[:, g, h]
    blocks[:, h, :] = 0
    blocks[:, :, h] = 0

    r = stats.r.copy()
    r[g, :] += r[h, :]
    r[h, :] = 0
    r[:, g] += r[:, h]
    r[:, h] = 0

    n1 = stats.n1.copy()
    n_agg = stats.n_agg.copy()
    for sizes in (n1, n_agg):
        sizes[g] += sizes[h]
        sizes[h] = 0
    return SufficientStats(blocks, r, n1, n_agg)
