"""Binary PGM export of chunk images."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import DimensionError, FFMIOError, FormatError


def to_gray(values, lo: float | None = None, hi: float | None = None) -> np.ndarray:
    """Affine map of ``[lo, hi]`` onto 0..255 (rounded); a zero range gives 128."""
    v = np.asarray(values, dtype=np.float64)
    lo = float(v.min()) if lo is None else lo
    hi = float(v.max()) if hi is None else hi
    if hi == lo:
        return np.full(v.shape, 128, dtype=np.uint8)
    scaled = np.rint((v - lo) / (hi - lo) * 255.0)
    return np.clip(scaled, 0, 255).astype(np.uint8)


def pgm_bytes(pixels: np.ndarray) -> bytes:
    pixels = np.asarray(pixels, dtype=np.uint8)
    h, w = pixels.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + pixels.tobytes()


def _write(path, payload: bytes) -> None:
    try:
        Path(path).write_bytes(payload)
    except OSError as exc:
        raise FFMIOError(f"cannot write {path}: {exc.strerror}") from exc


def write_pgm(image, path) -> None:
    """Write one image as P5 PGM, rescaled over its own min/max."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2 or image.size == 0:
        raise DimensionError(f"image must be a non-empty 2-D array, got shape {image.shape}")
    _write(path, pgm_bytes(to_gray(image)))


def strip_pixels(images, columns: int) -> np.ndarray:
    """Tile equally sized images into a grid with 1-pixel black separators.

    All tiles share one gray scale. The last row is padded with black tiles.
    """
    images = [np.asarray(im, dtype=np.float64) for im in images]
    if not images:
        raise DimensionError("no images to tile")
    if columns < 1:
        raise DimensionError(f"columns must be positive, got {columns}")
    shape = images[0].shape
    if len(shape) != 2 or 0 in shape:
        raise DimensionError(f"images must be non-empty 2-D arrays, got shape {shape}")
    if any(im.shape != shape for im in images):
        raise DimensionError("images in a strip must share one size")
    h, w = shape
    stack = np.stack(images)
    lo, hi = float(stack.min()), float(stack.max())
    cols = min(columns, len(images))
    rows = -(-len(images) // cols)
    out = np.zeros((rows * h + rows - 1, cols * w + cols - 1), dtype=np.uint8)
    for i, im in enumerate(images):
        r, c = divmod(i, cols)
        out[r * (h + 1): r * (h + 1) + h, c * (w + 1): c * (w + 1) + w] = to_gray(im, lo, hi)
    return out


def write_strip(images, columns: int, path) -> None:
    _write(path, pgm_bytes(strip_pixels(images, columns)))


def read_pgm(path) -> np.ndarray:
    """Parse a binary P5 file with maxval 255 (header comments allowed)."""
    raw = Path(path).read_bytes()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            pos = raw.index(b"\n", pos) + 1
            continue
        start = pos
        while not raw[pos:pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos].decode("ascii"))
    pos += 1
    magic, w, h, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic != "P5" or maxval != 255:
        raise FormatError(f"unsupported PGM header {tokens}")
    body = np.frombuffer(raw[pos:pos + w * h], dtype=np.uint8)
    if body.size != w * h:
        raise FormatError("truncated PGM body")
    return body.reshape(h, w)
