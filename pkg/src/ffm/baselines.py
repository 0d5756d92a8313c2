"""Reference chunk descriptors: statistical metafeatures and PCA."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DimensionError

CED_NAMES = (
    "mean_of_means", "std_of_means",
    "mean_of_stds", "std_of_stds",
    "mean_of_corrs", "std_of_corrs",
    "mean_of_skews", "std_of_skews",
    "mean_of_kurts", "std_of_kurts",
)


def _mean_abs_correlation(centered: np.ndarray, m2: np.ndarray) -> np.ndarray:
    d = centered.shape[1]
    if d < 2:
        return np.zeros(d)
    cov = centered.T @ centered / centered.shape[0]
    sd = np.sqrt(m2)
    live = sd > 0
    corr = np.zeros((d, d))
    denom = np.outer(sd[live], sd[live])
    corr[np.ix_(live, live)] = np.clip(cov[np.ix_(live, live)] / denom, -1.0, 1.0)
    np.fill_diagonal(corr, 0.0)
    return np.abs(corr).sum(axis=1) / (d - 1)


def ced_metafeatures(chunk) -> np.ndarray:
    """Ten statistical metafeatures of a chunk.

    Per attribute: mean, population std, mean absolute Pearson correlation
    with the other attributes, skewness and excess kurtosis (zero-variance
    attributes get 0 for the last three). Each of the five per-attribute
    vectors is then summarized by its mean and std, in the order of
    ``CED_NAMES``.
    """
    X = np.asarray(chunk, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"chunk must be 2-D, got shape {X.shape}")
    if X.shape[0] < 2:
        raise DegenerateInputError("metafeatures need at least 2 samples")
    mean = X.mean(axis=0)
    centered = X - mean
    m2 = (centered**2).mean(axis=0)
    m3 = (centered**3).mean(axis=0)
    m4 = (centered**4).mean(axis=0)
    live = m2 > 0
    safe = np.where(live, m2, 1.0)
    skew = np.where(live, m3 / safe**1.5, 0.0)
    kurt = np.where(live, m4 / safe**2 - 3.0, 0.0)
    per_attr = (mean, np.sqrt(m2), _mean_abs_correlation(centered, m2), skew, kurt)
    out = np.empty(10)
    for i, v in enumerate(per_attr):
        out[2 * i] = v.mean()
        out[2 * i + 1] = v.std()
    return out


def ced_describe(chunks) -> np.ndarray:
    """``(k, 10)`` matrix of CED metafeatures, one row per chunk."""
    return np.vstack([ced_metafeatures(c) for c in chunks])


@dataclass(frozen=True)
class PcaModel:
    mean_vector: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray


def pca_fit(chunk_means, n_components: int = 2) -> PcaModel:
    """Principal axes of the chunk mean vectors.

    Uses the eigendecomposition of the sample covariance (``1/(k-1)``).
    Each component is sign-fixed so its largest-magnitude entry is positive.
    """
    X = np.asarray(chunk_means, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"expected a k x d matrix, got shape {X.shape}")
    k, d = X.shape
    if k < 3:
        raise DegenerateInputError(f"PCA needs at least 3 rows, got {k}")
    if n_components > d:
        raise DimensionError(f"cannot extract {n_components} components from {d} features")
    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / (k - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(-evals, kind="stable")[:n_components]
    comps = evecs[:, order].T.copy()
    for row in comps:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    explained = np.clip(evals[order], 0.0, None)
    return PcaModel(mean, comps, explained)


def pca_project(model: PcaModel, vector) -> np.ndarray:
    """Coordinates of ``vector`` (or rows of a matrix) on the model's axes."""
    v = np.asarray(vector, dtype=np.float64)
    if v.shape[-1] != model.mean_vector.shape[0]:
        raise DimensionError(
            f"vector has {v.shape[-1]} features, model expects {model.mean_vector.shape[0]}"
        )
    return (v - model.mean_vector) @ model.components.T


def pca_describe(chunks) -> tuple[np.ndarray, PcaModel]:
    """Project each chunk's mean vector onto 2 principal axes fit on all of them."""
    means = np.vstack([np.asarray(c, dtype=np.float64).mean(axis=0) for c in chunks])
    model = pca_fit(means)
    return pca_project(model, means), model
