"""Ellipsoid clustering: alternate per-cluster fits and residual reassignment.

Clusters start from k-means. Each round fits one ellipsoid per cluster and
then moves every point to the ellipsoid with the smallest squared residual
``(||A_j R_j (x - c_j)||^2 - 1)^2``.
"""
from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from .exceptions import DegenerateDataError
from .fitting import DEFAULT_WEIGHT, FitResult, fit
from .trf import SolverOptions

logger = logging.getLogger(__name__)


def _kmeans_pp(X, k, rng):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        idx = rng.choice(n, p=d2 / total) if total > 0 else rng.integers(n)
        centers[j] = X[idx]
        d2 = np.minimum(d2, np.sum((X - centers[j]) ** 2, axis=1))
    return centers


def kmeans_init(X, n_clusters: int, rng: np.random.Generator, max_iter: int = 100) -> np.ndarray:
    """Lloyd's algorithm with k-means++ seeding; returns integer labels."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n < n_clusters:
        raise DegenerateDataError(f"{n} points cannot form {n_clusters} clusters")
    if n_clusters == 1:
        return np.zeros(n, dtype=int)
    centers = _kmeans_pp(X, n_clusters, rng)
    labels = np.full(n, -1)
    for _ in range(max_iter):
        d2 = np.sum((X[:, None, :] - centers[None]) ** 2, axis=2)
        new = np.argmin(d2, axis=1)
        for j in range(n_clusters):
            if not np.any(new == j):
                # re-seed an empty cluster at the point farthest from its center
                far = int(np.argmax(d2[np.arange(n), new]))
                new[far] = j
                d2[far] = 0.0
        if np.array_equal(new, labels):
            break
        labels = new
        for j in range(n_clusters):
            centers[j] = X[labels == j].mean(axis=0)
    return labels


@dataclass
class ClusterState:
    labels: np.ndarray
    fits: list            # FitResult per cluster (None if never fitted)
    steps: int
    converged: bool

    @property
    def n_clusters(self) -> int:
        return len(self.fits)


def residual_matrix(X, fits) -> np.ndarray:
    """(n, n_clusters) squared residuals of every point against every fit."""
    X = np.asarray(X, dtype=float)
    out = np.full((X.shape[0], len(fits)), np.inf)
    for j, f in enumerate(fits):
        if f is not None:
            out[:, j] = f.residuals(X) ** 2
    return out


def assign(X, fits) -> np.ndarray:
    """Index of the best-fitting ellipsoid per point (lowest index on ties)."""
    return np.argmin(residual_matrix(X, fits), axis=1)


def _run(X, labels, n_clusters, n_steps, w, options):
    p = X.shape[1]
    fits: list[FitResult | None] = [None] * n_clusters
    converged = False
    step = 0
    for step in range(1, n_steps + 1):
        for j in range(n_clusters):
            members = X[labels == j]
            if members.shape[0] < p + 1:
                warnings.warn(f"cluster {j} has {members.shape[0]} points; keeping its previous fit",
                              stacklevel=3)
                continue
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                fits[j] = fit(members, w, options)
        if all(f is None for f in fits):
            raise DegenerateDataError("no cluster has enough points to fit")
        new = assign(X, fits)
        if np.array_equal(new, labels):
            converged = True
            break
        labels = new
    logger.debug("clustering stopped after %d steps (converged=%s)", step, converged)
    return ClusterState(labels, fits, step, converged)


def cluster(X, n_clusters: int, n_steps: int = 20, w: float = DEFAULT_WEIGHT,
            rng: np.random.Generator | None = None, labels=None,
            options: SolverOptions | None = None, init: str = "kmeans",
            n_init: int = 1) -> ClusterState:
    """Cluster the rows of ``X`` around ``n_clusters`` ellipsoids.

    Runs at most ``n_steps`` fit/reassign rounds, stopping early once the
    labels stop changing. A cluster with fewer than ``p + 1`` points keeps
    its previous ellipsoid for that round.

    ``init`` is ``"kmeans"`` or ``"random"`` (uniform random labels). With
    ``n_init > 1`` several initializations are run and the one with the
    smallest :func:`total_residual` is returned. Explicit ``labels``
    override both.
    """
    X = np.asarray(X, dtype=float)
    if n_clusters < 1 or n_steps < 1 or n_init < 1:
        raise ValueError("need at least one cluster, one step and one initialization")
    if init not in ("kmeans", "random"):
        raise ValueError("init must be 'kmeans' or 'random'")
    rng = np.random.default_rng() if rng is None else rng
    if labels is not None:
        return _run(X, np.asarray(labels, dtype=int).copy(), n_clusters, n_steps, w, options)
    best, best_score = None, np.inf
    for _ in range(n_init):
        if init == "kmeans":
            start = kmeans_init(X, n_clusters, rng)
        else:
            start = rng.integers(0, n_clusters, size=X.shape[0])
        state = _run(X, start, n_clusters, n_steps, w, options)
        score = total_residual(X, state.fits)
        if best is None or score < best_score:
            best, best_score = state, score
    return best


def total_residual(X, fits) -> float:
    """``sum_m min_j`` squared residual; what reassignment minimizes."""
    fits = [f for f in fits if f is not None]
    return float(residual_matrix(X, fits).min(axis=1).sum())


def adjusted_rand_index(a, b) -> float:
    """Hubert-Arabie adjusted Rand index of two labelings."""
    a = np.asarray(a)
    b = np.asarray(b)
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1))
    np.add.at(table, (ai, bi), 1)
    sum_ij = comb(table, 2).sum()
    sum_a = comb(table.sum(axis=1), 2).sum()
    sum_b = comb(table.sum(axis=0), 2).sum()
    expected = sum_a * sum_b / comb(a.size, 2)
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        return 1.0
    return float((sum_ij - expected) / (max_index - expected))


def matched_accuracy(true, pred) -> float:
    """Fraction of agreeing labels under the best relabeling of ``pred``."""
    true = np.asarray(true)
    pred = np.asarray(pred)
    t_vals = np.unique(true)
    p_vals = np.unique(pred)
    k = max(t_vals.size, p_vals.size)
    best = 0
    for perm in itertools.permutations(range(k), p_vals.size):
        hits = sum(np.sum((pred == pv) & (true == t_vals[perm[i]]))
                   for i, pv in enumerate(p_vals) if perm[i] < t_vals.size)
        best = max(best, hits)
    return best / true.size
