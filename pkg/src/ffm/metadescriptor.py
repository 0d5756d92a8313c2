"""Frequency Filtering Metadescriptor.

Every sample is moved to the frequency domain (real half spectrum over its
feature vector), the spectra are averaged per chunk, and the ``n`` frequency
components whose chunk-level values vary most across the stream are kept.
The resulting ``k x n`` matrix ``R`` is the metadescription of the stream.
Selected components can be mapped back to the feature domain one at a time
and stacked into an ``n x n`` image per chunk.
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegenerateInputError, DimensionError, FFMIndexError, SchemaError
from .signal import dft_real_half_rows, idft_single_component


@dataclass(frozen=True)
class FrequencySignature:
    values: np.ndarray

    @property
    def source_dim_half(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Metadescription:
    R: np.ndarray
    selected: np.ndarray
    variances: np.ndarray
    n: int
    d: int

    @property
    def k(self) -> int:
        return self.R.shape[0]

    def to_dict(self) -> dict:
        return {
            "n": int(self.n),
            "d": int(self.d),
            "selected": [int(i) for i in self.selected],
            "variances": [float(v) for v in self.variances],
            "R": [[float(v) for v in row] for row in self.R],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Metadescription":
        try:
            R = np.asarray(doc["R"], dtype=np.float64)
            selected = np.asarray(doc["selected"], dtype=np.int64)
            variances = np.asarray(doc["variances"], dtype=np.float64)
            n, d = int(doc["n"]), int(doc["d"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed metadescription: {exc}") from exc
        if R.ndim != 2 or R.shape[1] != n or len(selected) != n or len(variances) != d // 2:
            raise SchemaError("metadescription fields have inconsistent shapes")
        return cls(R, selected, variances, n, d)

    def dumps(self) -> str:
        return json.dumps(self.to_dict())


def chunk_frequency_signature(chunk) -> FrequencySignature:
    """Mean real half spectrum over the rows of one chunk."""
    chunk = np.asarray(chunk, dtype=np.float64)
    if chunk.ndim != 2 or chunk.shape[0] == 0:
        raise DimensionError(f"chunk must be a non-empty 2-D matrix, got shape {chunk.shape}")
    spectra = dft_real_half_rows(chunk)
    # np.mean uses a fixed pairwise summation order
    return FrequencySignature(spectra.mean(axis=0))


def signature_matrix(chunks: Iterable) -> np.ndarray:
    """Stack the signatures of all chunks into a ``(k, floor(d/2))`` array.

    Accepts any iterable of chunks, including lazily generated ones, and
    only keeps one chunk in memory at a time.
    """
    rows = [chunk_frequency_signature(c).values for c in chunks]
    if not rows:
        raise DegenerateInputError("stream has no chunks")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DimensionError(f"chunks disagree on dimensionality: {sorted(widths)}")
    return np.vstack(rows)


def _as_matrix(signatures) -> np.ndarray:
    if isinstance(signatures, np.ndarray):
        return np.asarray(signatures, dtype=np.float64)
    return np.vstack([s.values if isinstance(s, FrequencySignature) else np.asarray(s) for s in signatures])


def select_frequencies(signatures, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices of the ``n`` highest-variance components, and all variances.

    Variance is the population variance across chunks. Equal variances are
    ordered by ascending frequency index.
    """
    F = _as_matrix(signatures)
    if F.ndim != 2 or F.shape[0] < 2:
        raise DegenerateInputError("need signatures of at least 2 chunks")
    half = F.shape[1]
    if int(n) != n or not 1 <= n <= half:
        raise ConfigurationError(f"n must lie in [1, {half}], got {n}")
    variances = F.var(axis=0)
    # stable sort on -variance keeps lower indices first among ties
    order = np.argsort(-variances, kind="stable")
    return order[:n].astype(np.int64), variances


def metadescribe_signatures(F: np.ndarray, n: int, d: int) -> Metadescription:
    """Build the metadescription from a precomputed signature matrix."""
    F = np.asarray(F, dtype=np.float64)
    if F.shape[1] != d // 2:
        raise DimensionError(f"signature width {F.shape[1]} does not match d={d}")
    selected, variances = select_frequencies(F, n)
    return Metadescription(F[:, selected].copy(), selected, variances, int(n), int(d))


def metadescribe(stream, n: int) -> Metadescription:
    """Metadescription of a chunked or synthetic stream."""
    chunks = getattr(stream, "chunks", stream)
    F = signature_matrix(chunks)
    d = getattr(stream, "d", None)
    if d is None:
        d = np.asarray(chunks[0]).shape[1]
    return metadescribe_signatures(F, n, d)


def render_chunk_image(meta: Metadescription, chunk_index: int) -> np.ndarray:
    """``n x n`` feature-domain picture of one chunk's selected components.

    Row ``j`` is the first ``n`` samples of the inverse transform of the
    ``j``-th selected component (highest variance first).
    """
    if not 0 <= chunk_index < meta.k:
        raise FFMIndexError(f"chunk index {chunk_index} outside [0, {meta.k})")
    if meta.n > meta.d:
        raise DimensionError(f"cannot render {meta.n} components of a {meta.d}-feature signal")
    row = meta.R[chunk_index]
    return np.vstack(
        [idft_single_component(row[j], int(meta.selected[j]), meta.d, meta.n) for j in range(meta.n)]
    )
