"""Generative parameters of the stochastic block transition model.

Group-pair matrices ``theta``, ``p`` and ``q`` are ``K x K`` and indexed by
``label - 1``; the transition matrix ``pi`` and the initial distribution
``alpha`` are indexed by state, with state 0 the inactive state.

Parameter files are ``key = value`` text: scalars as plain numbers, matrices
as rows separated by ``;`` with values separated by commas or spaces::

    k = 3
    theta = 0.9, 0.1, 0.1; 0.1, 0.9, 0.1; 0.1, 0.1, 0.9
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import structlog

from greedy_sbtm.ingestion.exceptions import ArgumentError, InputError
from greedy_sbtm.ingestion.io import read_key_values

logger = structlog.get_logger(__name__)

ROW_SUM_TOLERANCE = 1e-12
_PARSE_TOLERANCE = 1e-6
_STATIONARY_TOLERANCE = 1e-12
_MAX_POWER_ITERATIONS = 100_000

_MATRIX_KEYS = ("theta", "p", "q", "pi")


def stationary_distribution(pi: np.ndarray) -> np.ndarray:
    """
    Stationary distribution of a row-stochastic matrix by power iteration.

    The lazy chain ``(I + pi) / 2`` is iterated from the uniform distribution, so
    periodic chains converge too. States whose mass falls below the tolerance are
    set to exactly zero.
    """
    n = pi.shape[0]
    lazy = 0.5 * (np.eye(n) + pi)
    v = np.full(n, 1.0 / n)
    for _ in range(_MAX_POWER_ITERATIONS):
        nxt = v @ lazy
        if np.abs(nxt - v).max() < _STATIONARY_TOLERANCE:
            v = nxt
            break
        v = nxt
    else:
        logger.warning("stationary_not_converged", iterations=_MAX_POWER_ITERATIONS)
    v[v < _STATIONARY_TOLERANCE] = 0.0
    return v / v.sum()


@dataclass(frozen=True, eq=False)
class ModelParameters:
    """
    Parameters of the generative model for K groups.

    Attributes:
        theta: Edge probability of dyads without an observable previous state.
        p: Edge creation probability.
        q: Edge destruction probability.
        pi: ``(K + 1) x (K + 1)`` row-stochastic state transition matrix.
        alpha: Initial state distribution; the stationary distribution of ``pi``
            when omitted.
    """

    theta: np.ndarray
    p: np.ndarray
    q: np.ndarray
    pi: np.ndarray
    alpha: np.ndarray | None = None

    def __post_init__(self) -> None:
        k = np.shape(self.theta)[0] if np.ndim(self.theta) == 2 else 0
        if k < 1:
            raise ArgumentError("theta must be a K x K matrix with K >= 1")
        for name in ("theta", "p", "q"):
            value = np.array(getattr(self, name), dtype=np.float64)
            if value.shape != (k, k):
                raise ArgumentError(f"{name} has shape {value.shape}, expected {(k, k)}")
            if np.any(value < 0) or np.any(value > 1) or not np.all(np.isfinite(value)):
                raise ArgumentError(f"{name} entries must be probabilities")
            if not np.allclose(value, value.T, rtol=0, atol=1e-12):
                raise ArgumentError(f"{name} must be symmetric")
            object.__setattr__(self, name, value)

        pi = np.array(self.pi, dtype=np.float64)
        if pi.shape != (k + 1, k + 1):
            raise ArgumentError(f"pi has shape {pi.shape}, expected {(k + 1, k + 1)}")
        if np.any(pi < 0) or np.any(np.abs(pi.sum(axis=1) - 1.0) > ROW_SUM_TOLERANCE):
            raise ArgumentError("pi must be row-stochastic")
        object.__setattr__(self, "pi", pi)

        if self.alpha is None:
            alpha = self.stationary()
        else:
            alpha = np.array(self.alpha, dtype=np.float64)
            if alpha.shape != (k + 1,):
                raise ArgumentError(f"alpha has length {alpha.size}, expected {k + 1}")
            if np.any(alpha < 0) or abs(alpha.sum() - 1.0) > ROW_SUM_TOLERANCE:
                raise ArgumentError("alpha must be a probability vector")
        object.__setattr__(self, "alpha", alpha)

    @property
    def k(self) -> int:
        return int(self.theta.shape[0])

    def stationary(self) -> np.ndarray:
        """Stationary distribution of ``pi``."""
        return stationary_distribution(self.pi)

    def without_inactivity(self) -> ModelParameters:
        """
        Parameters under which no node is ever inactive.

        Transition mass into state 0 is removed and each row renormalised (rows
        left empty become uniform over ``1..K``); ``alpha`` is recomputed.
        """
        pi = self.pi.copy()
        pi[:, 0] = 0.0
        sums = pi.sum(axis=1)
        empty = sums == 0
        pi[empty, 1:] = 1.0 / self.k
        pi[~empty] /= sums[~empty, None]
        return ModelParameters(self.theta, self.p, self.q, pi)

    def to_file(self, path: str | Path, header: dict[str, object] | None = None) -> None:
        """Write the parameters as ``key = value`` text, optionally preceded by comment lines."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [f"# {key}: {value}" for key, value in (header or {}).items()]
        lines.append(f"k = {self.k}")
        for name in _MATRIX_KEYS:
            lines.append(f"{name} = {format_matrix(getattr(self, name))}")
        lines.append("alpha = " + ", ".join(format(v, ".17g") for v in self.alpha))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def from_file(cls, path: str | Path, stay: float = 0.8, allow_inactive: bool = True) -> ModelParameters:
        """
        Read parameters from a ``key = value`` file.

        ``theta``, ``p`` and ``q`` are required. Without ``pi`` the persistent
        transition matrix of :func:`persistent_transitions` is used; without
        ``alpha`` the stationary distribution. Rows summing to one within 1e-6
        are renormalised exactly.

        Raises:
            InputError: Naming the offending line.
        """
        path = Path(path)
        values: dict[str, np.ndarray] = {}
        lines: dict[str, int] = {}
        for raw_key, (text, line_number) in read_key_values(path).items():
            key = raw_key.lower()
            if key not in (*_MATRIX_KEYS, "alpha", "k"):
                raise InputError(f"unknown parameter {key!r}", path, line_number)
            try:
                values[key] = parse_matrix(text)
            except ValueError as e:
                raise InputError(f"cannot parse {key}: {e}", path, line_number) from e
            lines[key] = line_number

        for key in ("theta", "p", "q"):
            if key not in values:
                raise InputError(f"missing required parameter {key!r}", path)
        k = values["theta"].shape[0]
        if "k" in values and int(values["k"].ravel()[0]) != k:
            raise InputError(f"k does not match the size of theta ({k})", path, lines["k"])

        pi = values.get("pi")
        if pi is None:
            pi = persistent_transitions(k, stay=stay, allow_inactive=allow_inactive)
        else:
            pi = _renormalise(pi)
        alpha = values.get("alpha")
        if alpha is not None:
            alpha = _renormalise(alpha.ravel()[None, :])[0]
        try:
            return cls(values["theta"], values["p"], values["q"], pi, alpha)
        except ArgumentError as e:
            raise InputError(str(e), path) from e


def _renormalise(m: np.ndarray) -> np.ndarray:
    sums = m.sum(axis=1, keepdims=True)
    close = np.abs(sums - 1.0) <= _PARSE_TOLERANCE
    return np.where(close, m / np.where(sums == 0, 1.0, sums), m)


def parse_matrix(text: str) -> np.ndarray:
    """Parse ``a, b; c, d`` into a 2-D float array."""
    rows = [row.strip() for row in text.split(";") if row.strip()]
    parsed = [[float(v) for v in re.split(r"[\s,]+", row) if v] for row in rows]
    if not parsed or len({len(r) for r in parsed}) != 1:
        raise ValueError("rows must be non-empty and of equal length")
    return np.asarray(parsed, dtype=np.float64)


def format_matrix(m: np.ndarray) -> str:
    return "; ".join(", ".join(format(v, ".17g") for v in row) for row in np.atleast_2d(m))


def persistent_transitions(
    k: int, stay: float = 0.8, allow_inactive: bool = False, exclude_current: bool = True
) -> np.ndarray:
    """
    Transition matrix where a node keeps its group with probability ``stay``.

    The remaining mass is spread uniformly over the other groups (or over every
    group when ``exclude_current`` is False). With ``allow_inactive`` the inactive
    state is one of the destinations; otherwise it receives no mass and row 0 is
    uniform over the groups.
    """
    if k < 1:
        raise ArgumentError(f"k must be at least 1, got {k}")
    if not 0.0 <= stay <= 1.0:
        raise ArgumentError(f"stay must be a probability, got {stay}")
    k1 = k + 1
    first = 0 if allow_inactive else 1
    pi = np.zeros((k1, k1))
    pi[0, first:] = 1.0 / (k1 - first)
    for g in range(1, k1):
        targets = [h for h in range(first, k1) if not (exclude_current and h == g)]
        if not targets:
            pi[g, g] = 1.0
            continue
        pi[g, targets] = (1.0 - stay) / len(targets)
        pi[g, g] += stay
    return pi


def study_two_parameters(stay: float = 0.8) -> ModelParameters:
    """
    Three groups with distinct edge dynamics and no inactivity.

    Within group 1 edges are created often and seldom destroyed, within group 2
    they are created and destroyed often, within group 3 they are destroyed often
    and seldom created. Between groups, edge states rarely change.
    """
    theta = np.full((3, 3), 0.1)
    np.fill_diagonal(theta, 0.9)
    p = np.full((3, 3), 0.1)
    p[0, 0] = p[1, 1] = 0.9
    q = np.full((3, 3), 0.1)
    q[1, 1] = q[2, 2] = 0.9
    return ModelParameters(theta, p, q, persistent_transitions(3, stay=stay, allow_inactive=False))
