"""Normalization, k-means and silhouette-driven concept counting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DimensionError
from .metrics import pairwise_distances, silhouette_score

DEFAULT_REPLICATIONS = 10
DEFAULT_MAX_ITER = 300

# relative slack for the monotone-inertia check in Lloyd iterations
_INERTIA_SLACK = 1e-9


def normalize_minmax(R) -> np.ndarray:
    """Map each column affinely onto [0, 1]; constant columns become 0.5."""
    R = np.asarray(R, dtype=np.float64)
    lo = R.min(axis=0)
    span = R.max(axis=0) - lo
    flat = span == 0
    out = (R - lo) / np.where(flat, 1.0, span)
    out[:, flat] = 0.5
    return np.clip(out, 0.0, 1.0)


def normalize_zscore(R) -> np.ndarray:
    """Standardize columns to zero mean and unit population std; constant columns become 0."""
    R = np.asarray(R, dtype=np.float64)
    sd = R.std(axis=0)
    out = (R - R.mean(axis=0)) / np.where(sd == 0, 1.0, sd)
    out[:, sd == 0] = 0.0
    return out


NORMALIZERS = {"minmax": normalize_minmax, "zscore": normalize_zscore}


def normalize(R, method: str = "minmax") -> np.ndarray:
    try:
        return NORMALIZERS[method](R)
    except KeyError:
        raise ConfigurationError(f"unknown normalization {method!r}") from None


@dataclass
class ClusteringResult:
    labels: np.ndarray
    centroids: np.ndarray
    inertia: float
    seed: int
    n_iter: int = 0
    replication: int = 0

    def to_dict(self) -> dict:
        return {
            "labels": [int(v) for v in self.labels],
            "centroids": [[float(v) for v in row] for row in self.centroids],
            "inertia": float(self.inertia),
            "seed": int(self.seed),
            "n_iter": int(self.n_iter),
            "replication": int(self.replication),
        }


def _sq_dist(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    return ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=-1)


def _kmeanspp(X: np.ndarray, c: int, rng: np.random.Generator) -> np.ndarray:
    # greedy k-means++: each step draws a few D^2-weighted candidates and keeps
    # the one that lowers the potential most
    k = X.shape[0]
    trials = 2 + int(math.log(c))
    idx = [int(rng.integers(k))]
    closest = ((X - X[idx[0]]) ** 2).sum(axis=1)
    for _ in range(1, c):
        total = closest.sum()
        if total <= 0.0:
            # every point coincides with a chosen center
            choice = int(rng.integers(k))
            cand_closest = closest
        else:
            draws = rng.random(trials) * total
            cands = np.minimum(np.searchsorted(np.cumsum(closest), draws, side="right"), k - 1)
            options = [np.minimum(closest, ((X - X[j]) ** 2).sum(axis=1)) for j in cands]
            best = int(np.argmin([o.sum() for o in options]))
            choice, cand_closest = int(cands[best]), options[best]
        idx.append(choice)
        closest = np.minimum(cand_closest, ((X - X[choice]) ** 2).sum(axis=1))
    return X[idx].copy()


def _lloyd(X: np.ndarray, centroids: np.ndarray, max_iter: int):
    c = centroids.shape[0]
    labels = None
    prev_inertia = np.inf
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        dist = _sq_dist(X, centroids)
        new_labels = dist.argmin(axis=1)
        inertia = float(dist[np.arange(X.shape[0]), new_labels].sum())
        assert inertia <= prev_inertia * (1 + _INERTIA_SLACK) + _INERTIA_SLACK, "k-means inertia increased"
        prev_inertia = inertia
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        centroids = _update_centroids(X, labels, centroids, c)
    labels = _sq_dist(X, centroids).argmin(axis=1)
    return labels, centroids, n_iter


def _update_centroids(X, labels, old, c):
    centroids = np.empty_like(old)
    sizes = np.bincount(labels, minlength=c)
    for j in range(c):
        if sizes[j]:
            centroids[j] = X[labels == j].mean(axis=0)
    empty = np.flatnonzero(sizes == 0)
    if empty.size:
        # reseed each empty cluster with the point farthest from its centroid
        gap = ((X - centroids[labels]) ** 2).sum(axis=1)
        order = np.argsort(-gap, kind="stable")
        for j, pick in zip(empty, order):
            centroids[j] = X[pick]
    return centroids


def replication_rng(seed: int, replication: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(replication),)))


def kmeans(
    X,
    c: int,
    seed: int = 0,
    replications: int = DEFAULT_REPLICATIONS,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ClusteringResult:
    """Lloyd's k-means with k-means++ seeding and restarts.

    Each restart ``r`` draws from ``SeedSequence(seed, spawn_key=(r,))``.
    The restart with the lowest inertia wins; ties go to the earlier restart.

    Rows are processed in lexicographic order and labels are mapped back, so
    the partition does not depend on the order in which points are given.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {X.shape}")
    k = X.shape[0]
    if int(c) != c or not 1 <= c <= k:
        raise ConfigurationError(f"cluster count must lie in [1, {k}], got {c}")
    if replications < 1 or max_iter < 1:
        raise ConfigurationError("replications and max_iter must be positive")
    order = np.lexsort(X.T[::-1])
    Xs = X[order]
    best = None
    for r in range(replications):
        rng = replication_rng(seed, r)
        labels, centroids, n_iter = _lloyd(Xs, _kmeanspp(Xs, c, rng), max_iter)
        inertia = float(((Xs - centroids[labels]) ** 2).sum())
        if best is None or inertia < best.inertia:
            best = ClusteringResult(labels.astype(np.int64), centroids, inertia, int(seed), n_iter, r)
    restored = np.empty_like(best.labels)
    restored[order] = best.labels
    best.labels = restored
    return best


@dataclass
class ConceptCountReport:
    scores: dict[int, float]
    best_c: int
    clusterings: dict[int, ClusteringResult] = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {
            "scores": {str(c): float(s) for c, s in sorted(self.scores.items())},
            "best_c": int(self.best_c),
        }


def identify_concept_count(
    R,
    c_min: int = 2,
    c_max: int = 11,
    seed: int = 0,
    replications: int = DEFAULT_REPLICATIONS,
    normalization: str = "minmax",
    max_iter: int = DEFAULT_MAX_ITER,
) -> ConceptCountReport:
    """Pick the cluster count in ``[c_min, c_max]`` with the highest silhouette.

    For every candidate the best-inertia restart is scored; ties on the
    silhouette go to the smaller count.
    """
    X = normalize(R, normalization)
    k = X.shape[0]
    if not (2 <= c_min <= c_max <= k - 1):
        raise ConfigurationError(f"need 2 <= c_min <= c_max <= {k - 1}, got [{c_min}, {c_max}]")
    D = pairwise_distances(X)
    scores, fits = {}, {}
    for c in range(c_min, c_max + 1):
        fit = kmeans(X, c, seed, replications, max_iter)
        fits[c] = fit
        if np.unique(fit.labels).size < 2:
            scores[c] = -1.0
        else:
            scores[c] = silhouette_score(X, fit.labels, distances=D)
    best_c = max(scores, key=lambda c: (scores[c], -c))
    return ConceptCountReport(scores, best_c, fits)
