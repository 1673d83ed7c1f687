"""k-modes clustering of binary rows under Hamming distance.

For 0/1 data the mode of a cluster is the per-column majority, and the
Hamming distance of a row to a mode is the number of mismatching bits.
"""
from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import AnalysisError, ConfigError
from .features import FeatureMatrix

__all__ = [
    "DEFAULT_KS",
    "hamming",
    "pairwise_hamming",
    "ClusterModel",
    "ClusteringSuite",
    "kmodes",
    "derive_seed",
    "run_suite",
]

DEFAULT_KS = (2, 3, 5, 10)


def hamming(u, v) -> int:
    """Number of positions where ``u`` and ``v`` differ."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    return int(np.count_nonzero(u != v))


def pairwise_hamming(rows: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """Hamming distances between every row and every mode, shape (n, k).

    Uses |x| + |y| - 2 x.y, which is exact for 0/1 inputs; float64 products
    are exact far beyond any realistic column count.
    """
    r = rows.astype(np.float64, copy=False)
    m = modes.astype(np.float64, copy=False)
    d = r.sum(axis=1)[:, None] + m.sum(axis=1)[None, :] - 2.0 * (r @ m.T)
    return np.rint(d).astype(np.int64)


@dataclass(frozen=True, eq=False)
class ClusterModel:
    """Result of one k-modes run.

    ``cost_trace`` holds the total cost after every iteration; it is
    non-increasing. ``converged`` is False when ``max_iter`` stopped the run.
    ``history`` holds one (assignments, modes) pair per ``cost_trace`` entry
    when the run was asked to keep it.
    """

    k: int
    modes: np.ndarray
    assignments: np.ndarray
    cost: int
    iterations: int
    seed: int
    converged: bool = True
    cost_trace: tuple[int, ...] = ()
    history: tuple = ()

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k)

    def same_as(self, other: "ClusterModel") -> bool:
        return (self.k == other.k and self.seed == other.seed and self.cost == other.cost
                and self.iterations == other.iterations and self.cost_trace == other.cost_trace
                and np.array_equal(self.modes, other.modes)
                and np.array_equal(self.assignments, other.assignments))


@dataclass(frozen=True, eq=False)
class ClusteringSuite:
    models: tuple[ClusterModel, ...]
    ks: tuple[int, ...]
    master_seed: int
    matrix_fingerprint: str
    case_ids: tuple[str, ...] = field(default=())

    def __len__(self):
        return len(self.models)

    def __iter__(self):
        return iter(self.models)

    @property
    def n_clusters(self) -> int:
        return sum(m.k for m in self.models)

    def same_as(self, other: "ClusteringSuite") -> bool:
        return (self.ks == other.ks and self.matrix_fingerprint == other.matrix_fingerprint
                and all(a.same_as(b) for a, b in zip(self.models, other.models)))

    def to_dict(self, column_names=None) -> dict:
        """JSON-ready export; assignments keyed by case id, modes by column name."""
        out = {
            "ks": list(self.ks),
            "master_seed": self.master_seed,
            "matrix_fingerprint": self.matrix_fingerprint,
            "models": [],
        }
        for m in self.models:
            names = column_names or [str(j) for j in range(m.modes.shape[1])]
            out["models"].append({
                "k": m.k,
                "seed": m.seed,
                "sizes": m.sizes.tolist(),
                "cost": m.cost,
                "iterations": m.iterations,
                "converged": m.converged,
                "assignments": dict(zip(self.case_ids, m.assignments.tolist())),
                "modes": [dict(zip(names, mode.tolist())) for mode in m.modes],
            })
        return out


def _rows_of(matrix) -> np.ndarray:
    rows = matrix.rows if isinstance(matrix, FeatureMatrix) else np.asarray(matrix)
    if rows.ndim != 2:
        raise ValueError("feature rows must be a 2-D array")
    if rows.size and not np.isin(rows, (0, 1)).all():
        raise ValueError("feature rows must be binary")
    return rows.astype(np.uint8, copy=False)


def _update_modes(rows, labels, modes):
    """Per-column majority of each cluster; ties keep the previous bit."""
    k = modes.shape[0]
    counts = np.zeros((k, rows.shape[1]), dtype=np.int64)
    np.add.at(counts, labels, rows)
    sizes = np.bincount(labels, minlength=k)[:, None]
    ones = 2 * counts > sizes
    zeros = 2 * counts < sizes
    new = modes.copy()
    new[ones] = 1
    new[zeros] = 0
    return new


def _repair_empty(rows, labels, modes, dist):
    """Reseed each empty cluster with the row farthest from its current mode.

    Reseeding moves that row (distance > 0) onto a mode equal to itself, so
    the total cost strictly drops. Returns whether anything changed.
    """
    k = modes.shape[0]
    changed = False
    own = dist[np.arange(len(labels)), labels]
    while True:
        sizes = np.bincount(labels, minlength=k)
        empty = np.flatnonzero(sizes == 0)
        if not len(empty):
            return changed
        j = int(empty[0])
        far = int(np.argmax(own))  # lowest row index on ties
        if own[far] == 0:
            # cannot happen when k <= distinct rows
            raise AnalysisError("empty cluster could not be reseeded")
        modes[j] = rows[far]
        labels[far] = j
        own[far] = 0
        changed = True


def kmodes(matrix, k: int, seed: int = 0, max_iter: int = 100, keep_history: bool = False) -> ClusterModel:
    """Cluster binary rows into ``k`` groups.

    Initial modes are ``k`` distinct rows drawn uniformly with ``seed``.
    Each iteration assigns rows to the nearest mode (lowest index on ties),
    reseeds empty clusters, then recomputes modes. The run stops when an
    assignment repeats or after ``max_iter`` iterations.
    """
    rows = _rows_of(matrix)
    if max_iter < 1:
        raise ConfigError(f"max_iter must be >= 1, got {max_iter}")
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    distinct = np.unique(rows, axis=0) if len(rows) else rows
    if k > len(distinct):
        raise AnalysisError(f"k={k} exceeds the number of distinct rows ({len(distinct)})")

    rng = np.random.default_rng(seed)
    modes = distinct[np.sort(rng.choice(len(distinct), size=k, replace=False))].copy()
    labels = None
    trace = []
    history = []
    converged = False
    it = 0
    while it < max_iter:
        dist = pairwise_hamming(rows, modes)
        new = np.argmin(dist, axis=1)
        repaired = _repair_empty(rows, new, modes, dist)
        if labels is not None and not repaired and np.array_equal(new, labels):
            converged = True
            break
        it += 1
        labels = new
        modes = _update_modes(rows, labels, modes)
        trace.append(int(pairwise_hamming(rows, modes)[np.arange(len(rows)), labels].sum()))
        if keep_history:
            history.append((labels.copy(), modes.copy()))

    if not converged:
        # final assignment step so that every row sits at an argmin
        dist = pairwise_hamming(rows, modes)
        final = np.argmin(dist, axis=1)
        converged = bool(np.array_equal(final, labels))
        if not converged and np.bincount(final, minlength=k).min() > 0:
            labels = final
            trace.append(int(dist[np.arange(len(rows)), labels].sum()))
            if keep_history:
                history.append((labels.copy(), modes.copy()))

    cost = int(pairwise_hamming(rows, modes)[np.arange(len(rows)), labels].sum())
    modes.setflags(write=False)
    labels = labels.astype(np.int64)
    labels.setflags(write=False)
    return ClusterModel(k, modes, labels, cost, it, int(seed), converged, tuple(trace), tuple(history))


def derive_seed(master_seed: int, k: int) -> int:
    """Per-run seed: first 8 bytes of BLAKE2b over ``"<master_seed>:<k>"``."""
    digest = hashlib.blake2b(f"{master_seed}:{k}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def run_suite(matrix: FeatureMatrix, ks=DEFAULT_KS, master_seed: int = 42,
              max_iter: int = 100, workers: int | None = 1) -> ClusteringSuite:
    """Run :func:`kmodes` once per entry of ``ks``.

    Runs are independent, so ``workers > 1`` executes them on a thread pool
    without affecting the result.
    """
    ks = tuple(int(k) for k in ks)
    if not ks:
        raise ConfigError("ks must be non-empty")

    def one(k):
        try:
            return kmodes(matrix, k, derive_seed(master_seed, k), max_iter)
        except (AnalysisError, ConfigError) as exc:
            raise type(exc)(f"clustering with k={k} failed: {exc}") from exc

    if workers is not None and workers <= 1:
        models = [one(k) for k in ks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            models = list(pool.map(one, ks))
    fp = matrix.fingerprint if isinstance(matrix, FeatureMatrix) else ""
    ids = matrix.case_ids if isinstance(matrix, FeatureMatrix) else ()
    return ClusteringSuite(tuple(models), ks, int(master_seed), fp, tuple(ids))
