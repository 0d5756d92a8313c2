"""Seeded synthetic drifting streams with per-chunk concept ground truth.

Each concept is a Gaussian mixture with ``N_COMPONENTS`` unit-covariance
components whose centers are drawn from ``N(0, center_scale**2 I)``. Drift
boundaries are evenly spaced along the stream. Chunks are produced lazily and
each one draws from its own ``(seed, chunk_index)`` random stream, so any
chunk can be regenerated independently and in any order.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigurationError, FFMIndexError

N_COMPONENTS = 2
DEFAULT_CENTER_SCALE = 0.3

_CONCEPT_KEY = 0
_CHUNK_KEY = 1


class DriftType(str, Enum):
    SUDDEN = "sudden"
    GRADUAL = "gradual"
    INCREMENTAL = "incremental"


@dataclass(frozen=True)
class StreamConfig:
    n_chunks: int
    chunk_size: int
    n_features: int
    n_drifts: int = 0
    drift_type: DriftType = DriftType.SUDDEN
    recurring: bool = False
    seed: int = 0
    center_scale: float = DEFAULT_CENTER_SCALE

    def __post_init__(self):
        try:
            object.__setattr__(self, "drift_type", DriftType(self.drift_type))
        except ValueError:
            raise ConfigurationError(f"unknown drift type {self.drift_type!r}") from None
        for name in ("n_chunks", "chunk_size", "n_features"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
        if int(self.n_drifts) != self.n_drifts or self.n_drifts < 0:
            raise ConfigurationError(f"n_drifts must be a nonnegative integer, got {self.n_drifts!r}")
        if self.n_drifts + 1 > self.n_chunks:
            raise ConfigurationError(
                f"{self.n_drifts} drifts need at least {self.n_drifts + 1} chunks, got {self.n_chunks}"
            )
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if not (math.isfinite(self.center_scale) and self.center_scale > 0):
            raise ConfigurationError(f"center_scale must be positive, got {self.center_scale}")

    @property
    def n_concepts(self) -> int:
        """Distinct concept identifiers present in the stream."""
        if self.recurring and self.n_drifts > 0:
            return self.n_drifts
        return self.n_drifts + 1

    @property
    def transition_width(self) -> float:
        return self.n_chunks / (10 * (self.n_drifts + 1))

    def to_dict(self) -> dict:
        return {
            "n_chunks": self.n_chunks,
            "chunk_size": self.chunk_size,
            "n_features": self.n_features,
            "n_drifts": self.n_drifts,
            "drift_type": self.drift_type.value,
            "recurring": self.recurring,
            "seed": self.seed,
            "center_scale": self.center_scale,
        }


def concept_weight(chunk_index: float, boundary: float, width: float) -> float:
    """Share of the emerging concept at ``chunk_index``.

    A logistic ramp centred on ``boundary``; as ``width`` goes to 0 it becomes
    a step.
    """
    z = (chunk_index - boundary) / width
    # split on sign so exp never overflows
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def drift_boundaries(n_chunks: int, n_drifts: int) -> list[int]:
    """Evenly spaced first chunks of each new concept, rounded half up."""
    parts = n_drifts + 1
    return [(2 * (i + 1) * n_chunks + parts) // (2 * parts) for i in range(n_drifts)]


def concept_centers(config: StreamConfig) -> np.ndarray:
    """Component centers for every segment distribution, ``(segments, m, d)``."""
    out = np.empty((config.n_drifts + 1, N_COMPONENTS, config.n_features))
    for j in range(config.n_drifts + 1):
        ss = np.random.SeedSequence(config.seed, spawn_key=(_CONCEPT_KEY, j))
        rng = np.random.default_rng(ss)
        out[j] = config.center_scale * rng.standard_normal((N_COMPONENTS, config.n_features))
    return out


class _LazyChunks(Sequence):
    """Read-only sequence that synthesizes chunks on access."""

    def __init__(self, stream: "SyntheticStream"):
        self._stream = stream

    def __len__(self) -> int:
        return self._stream.config.n_chunks

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self._stream.chunk(i) for i in range(*index.indices(len(self)))]
        if index < 0:
            index += len(self)
        return self._stream.chunk(index)

    def __iter__(self) -> Iterator[np.ndarray]:
        for t in range(len(self)):
            yield self._stream.chunk(t)


@dataclass
class SyntheticStream:
    """Generated stream. ``chunks`` is lazy; :meth:`materialize` stacks it."""

    config: StreamConfig
    ground_truth: np.ndarray
    boundaries: list[int]
    centers: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.chunks = _LazyChunks(self)

    @property
    def chunk_size(self) -> int:
        return self.config.chunk_size

    @property
    def d(self) -> int:
        return self.config.n_features

    @property
    def source_name(self) -> str:
        c = self.config
        return f"synthetic-{c.drift_type.value}-{c.n_drifts}d-seed{c.seed}"

    def __len__(self) -> int:
        return self.config.n_chunks

    def _segment_distribution(self, segment: int) -> int:
        if self.config.recurring and segment == self.config.n_drifts:
            return 0
        return segment

    def _segment(self, t: int) -> int:
        return sum(1 for b in self.boundaries if b <= t)

    def _nearest_boundary(self, t: int) -> int:
        return min(range(len(self.boundaries)), key=lambda i: (abs(t - self.boundaries[i]), i))

    def chunk_with_labels(self, t: int) -> tuple[np.ndarray, np.ndarray]:
        """Chunk ``t`` and the mixture-component (class) index of each sample."""
        cfg = self.config
        if not 0 <= t < cfg.n_chunks:
            raise FFMIndexError(f"chunk index {t} outside [0, {cfg.n_chunks})")
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(_CHUNK_KEY, t)))
        size, d = cfg.chunk_size, cfg.n_features
        components = rng.integers(0, N_COMPONENTS, size=size)

        if cfg.n_drifts == 0 or cfg.drift_type is DriftType.SUDDEN:
            dist = self._segment_distribution(self._segment(t))
            means = self.centers[dist][components]
        else:
            i = self._nearest_boundary(t)
            w = concept_weight(t, self.boundaries[i], cfg.transition_width)
            prev_c = self.centers[self._segment_distribution(i)]
            next_c = self.centers[self._segment_distribution(i + 1)]
            if cfg.drift_type is DriftType.GRADUAL:
                from_next = rng.random(size) < w
                means = np.where(from_next[:, None], next_c[components], prev_c[components])
            else:
                means = (w * next_c + (1.0 - w) * prev_c)[components]

        return means + rng.standard_normal((size, d)), components

    def chunk(self, t: int) -> np.ndarray:
        return self.chunk_with_labels(t)[0]

    def materialize(self) -> np.ndarray:
        return np.stack(list(self.chunks))


def make_stream(config: StreamConfig) -> SyntheticStream:
    """Build a synthetic stream for ``config``.

    Ground truth follows the segment index (the concept with weight at least
    one half), so all three drift types share the same labels. With
    ``recurring`` the last segment reuses concept 0.
    """
    if not isinstance(config, StreamConfig):
        raise ConfigurationError(f"expected StreamConfig, got {type(config).__name__}")
    boundaries = drift_boundaries(config.n_chunks, config.n_drifts)
    segments = np.searchsorted(np.asarray(boundaries, dtype=np.int64), np.arange(config.n_chunks), side="right")
    truth = segments.astype(np.int64)
    if config.recurring and config.n_drifts > 0:
        truth[truth == config.n_drifts] = 0
    return SyntheticStream(config, truth, boundaries, concept_centers(config))
