"""DFT kernels used by the metadescriptor.

Forward transforms are unnormalized (``X[f] = sum_t x[t] exp(-2j*pi*f*t/d)``),
inverse transforms carry the ``1/d`` factor. Only the real part of the first
``floor(d/2)`` coefficients is kept on the forward side.

numpy's pocketfft backend handles arbitrary lengths with mixed-radix and
Bluestein plans, so no zero padding ever changes the coefficient grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, FFMIndexError, InputDomainError


@dataclass(frozen=True)
class RealSpectrum:
    values: np.ndarray
    source_dim: int

    def __post_init__(self):
        if len(self.values) != self.source_dim // 2:
            raise DimensionError(
                f"spectrum of length {len(self.values)} does not match "
                f"source dimension {self.source_dim}"
            )

    def __len__(self) -> int:
        return len(self.values)


def _check_signal(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] < 2:
        raise DimensionError(f"need at least 2 features, got {x.shape[-1]}")
    if not np.all(np.isfinite(x)):
        raise InputDomainError("input contains non-finite values")
    return x


def dft_real_half_rows(x: np.ndarray) -> np.ndarray:
    """Row-wise real half spectrum of a ``(rows, d)`` array.

    Returns an array of shape ``(rows, d // 2)``.
    """
    x = _check_signal(x)
    d = x.shape[-1]
    return np.fft.rfft(x, axis=-1).real[..., : d // 2]


def dft_real_half(x) -> RealSpectrum:
    """Real parts of DFT coefficients ``0 .. floor(d/2) - 1`` of a 1-D signal.

    >>> dft_real_half([1.0, 1.0, 1.0, 1.0]).values
    array([4., 0.])
    """
    x = _check_signal(x)
    if x.ndim != 1:
        raise DimensionError(f"expected a 1-D vector, got shape {x.shape}")
    return RealSpectrum(dft_real_half_rows(x), x.shape[0])


def idft_single_component(value: float, freq_index: int, d: int, n_out: int) -> np.ndarray:
    """Inverse DFT of a spectrum holding a single (real) coefficient.

    The coefficient is placed at ``freq_index``; for ``freq_index > 0`` its
    conjugate mirror goes to ``d - freq_index`` so the result is real. The
    first ``n_out`` samples of the length-``d`` inverse are returned.
    """
    if d < 1:
        raise DimensionError(f"d must be positive, got {d}")
    if not 0 <= freq_index < d // 2:
        raise FFMIndexError(f"frequency index {freq_index} outside [0, {d // 2})")
    if not 0 < n_out <= d:
        raise DimensionError(f"n_out must lie in [1, {d}], got {n_out}")
    spectrum = np.zeros(d, dtype=np.complex128)
    spectrum[freq_index] = value
    if freq_index > 0:
        spectrum[d - freq_index] = np.conj(spectrum[freq_index])
    return np.fft.ifft(spectrum).real[:n_out]
