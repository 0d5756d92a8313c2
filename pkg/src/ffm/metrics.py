"""Clustering agreement and validity scores, plus the paired t-test.

Entropies use natural logarithms. External scores are computed from the
contingency table of the two labelings, so they do not depend on label
names.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .errors import DegenerateInputError, DimensionError, UndefinedMetricError


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray
    truth_classes: np.ndarray
    pred_clusters: np.ndarray

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def contingency_table(truth, pred) -> ContingencyTable:
    truth = np.asarray(truth).ravel()
    pred = np.asarray(pred).ravel()
    if truth.shape != pred.shape:
        raise DimensionError(f"labelings differ in length: {truth.size} vs {pred.size}")
    if truth.size == 0:
        raise DegenerateInputError("labelings are empty")
    classes, ti = np.unique(truth, return_inverse=True)
    clusters, pi = np.unique(pred, return_inverse=True)
    counts = np.zeros((classes.size, clusters.size), dtype=np.int64)
    np.add.at(counts, (ti, pi), 1)
    return ContingencyTable(counts, classes, clusters)


def _entropy(counts: np.ndarray) -> float:
    counts = counts[counts > 0].astype(np.float64)
    n = counts.sum()
    p = counts / n
    return float(-(p * np.log(p)).sum())


def _mutual_information(table: ContingencyTable) -> float:
    c = table.counts.astype(np.float64)
    n = c.sum()
    nz = c > 0
    outer = np.outer(table.row_sums, table.col_sums).astype(np.float64)
    mi = (c[nz] / n * (np.log(c[nz] * n) - np.log(outer[nz]))).sum()
    return max(float(mi), 0.0)


def _comb2(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1.0) / 2.0


def adjusted_rand(table: ContingencyTable) -> float:
    index = _comb2(table.counts).sum()
    sum_a = _comb2(table.row_sums).sum()
    sum_b = _comb2(table.col_sums).sum()
    expected = sum_a * sum_b / _comb2(table.total) if table.total > 1 else 0.0
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        # both all-singletons or both one block: the partitions coincide
        return 1.0
    return float((index - expected) / (max_index - expected))


def external_clustering_scores(truth, pred, average: str = "geometric") -> dict:
    """NMI, adjusted Rand, completeness and homogeneity of ``pred`` against ``truth``.

    ``average`` picks the NMI denominator: ``"geometric"`` (sqrt of the
    product of entropies) or ``"arithmetic"``.
    """
    table = contingency_table(truth, pred)
    h_truth = _entropy(table.row_sums)
    h_pred = _entropy(table.col_sums)
    mi = _mutual_information(table)

    if h_truth == 0.0 and h_pred == 0.0:
        nmi = 1.0
    elif h_truth == 0.0 or h_pred == 0.0:
        nmi = 0.0
    else:
        if average == "geometric":
            denom = math.sqrt(h_truth * h_pred)
        elif average == "arithmetic":
            denom = (h_truth + h_pred) / 2.0
        else:
            raise ValueError(f"unknown NMI average {average!r}")
        nmi = min(mi / denom, 1.0)

    # H(truth|pred) = H(truth) - MI
    homogeneity = 1.0 if h_truth == 0.0 else min(max(mi / h_truth, 0.0), 1.0)
    completeness = 1.0 if h_pred == 0.0 else min(max(mi / h_pred, 0.0), 1.0)
    return {
        "nmi": float(nmi),
        "adjusted_rand": adjusted_rand(table),
        "completeness": float(completeness),
        "homogeneity": float(homogeneity),
    }


def pairwise_distances(X: np.ndarray) -> np.ndarray:
    """Euclidean distance matrix computed from explicit differences.

    The difference form avoids the cancellation of the ``|x|^2 - 2xy + |y|^2``
    expansion, which matters for coincident points.
    """
    diff = X[:, None, :] - X[None, :, :]
    return np.sqrt((diff**2).sum(axis=-1))


def _check_partition(X, labels):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    labels = np.asarray(labels).ravel()
    if X.shape[0] != labels.size:
        raise DimensionError(f"{X.shape[0]} points but {labels.size} labels")
    clusters, inv = np.unique(labels, return_inverse=True)
    if clusters.size < 2:
        raise UndefinedMetricError("internal scores need at least 2 clusters")
    return X, inv, clusters.size


def silhouette_score(X, labels, distances: np.ndarray | None = None) -> float:
    """Mean silhouette width; points in singleton clusters score 0."""
    X, inv, c = _check_partition(X, labels)
    D = pairwise_distances(X) if distances is None else distances
    n = X.shape[0]
    sizes = np.bincount(inv, minlength=c)
    # per-point summed distance to each cluster, accumulated column by column
    sums = np.zeros((n, c))
    for j in range(c):
        sums[:, j] = D[:, inv == j].sum(axis=1)
    own = sizes[inv]
    a = np.where(own > 1, sums[np.arange(n), inv] / np.maximum(own - 1, 1), 0.0)
    mean_other = sums / sizes
    mean_other[np.arange(n), inv] = np.inf
    b = mean_other.min(axis=1)
    top = np.maximum(a, b)
    s = np.where(top > 0, (b - a) / np.where(top > 0, top, 1.0), 0.0)
    s[own == 1] = 0.0
    return float(s.mean())


def calinski_harabasz_score(X, labels) -> float:
    X, inv, c = _check_partition(X, labels)
    n = X.shape[0]
    centroid = X.mean(axis=0)
    between = within = 0.0
    for j in range(c):
        members = X[inv == j]
        mj = members.mean(axis=0)
        between += members.shape[0] * float(((mj - centroid) ** 2).sum())
        within += float(((members - mj) ** 2).sum())
    if within == 0.0:
        return math.inf if between > 0 else 0.0
    if n == c:
        return 0.0
    return between * (n - c) / (within * (c - 1))


def davies_bouldin_score(X, labels) -> float:
    X, inv, c = _check_partition(X, labels)
    centroids = np.vstack([X[inv == j].mean(axis=0) for j in range(c)])
    scatter = np.array([np.sqrt(((X[inv == j] - centroids[j]) ** 2).sum(axis=1)).mean() for j in range(c)])
    sep = pairwise_distances(centroids)
    ratio = np.zeros((c, c))
    for i in range(c):
        for j in range(c):
            if i != j and sep[i, j] > 0:
                ratio[i, j] = (scatter[i] + scatter[j]) / sep[i, j]
    return float(ratio.max(axis=1).mean())


def internal_clustering_scores(X, labels) -> dict:
    """Silhouette, Calinski-Harabasz and Davies-Bouldin scores (Euclidean)."""
    return {
        "silhouette": silhouette_score(X, labels),
        "calinski_harabasz": calinski_harabasz_score(X, labels),
        "davies_bouldin": davies_bouldin_score(X, labels),
    }


def student_t_sf_two_sided(t: float, df: float) -> float:
    """Two-sided tail probability ``P(|T| >= |t|)`` for Student's t."""
    if math.isinf(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def paired_t_test(a, b, alpha: float = 0.05) -> dict:
    """Two-sided paired t-test on matched samples ``a`` and ``b``.

    Constant differences are handled by convention: a nonzero constant gives
    ``p = 0`` (significant), an all-zero difference gives ``t = 0, p = 1``.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise DimensionError(f"samples differ in length: {a.size} vs {b.size}")
    m = a.size
    if m < 2:
        raise DegenerateInputError("paired t-test needs at least 2 pairs")
    diff = a - b
    mean = float(diff.mean())
    sd = float(diff.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return {"t": 0.0, "p": 1.0, "significant": False}
        return {"t": math.copysign(math.inf, mean), "p": 0.0, "significant": True}
    t = mean / (sd / math.sqrt(m))
    p = student_t_sf_two_sided(t, m - 1)
    return {"t": t, "p": p, "significant": bool(p < alpha)}
