"""Loading and saving chunked streams.

Two on-disk layouts are supported:

* CSV, one sample per row, comma separated, optional header and label column;
* raw little-endian float32 in row-major order plus a JSON sidecar
  ``{"rows", "features", "chunk_size", "ground_truth"?}``.

Rows that do not fill a whole chunk at the end of the file are dropped.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    ConfigurationError,
    EmptyStreamError,
    FFMIOError,
    FormatError,
    ParseError,
    SchemaError,
)

RAW_DTYPE = np.dtype("<f4")


@dataclass
class ChunkedStream:
    """Immutable stack of equally shaped chunks, ``data.shape == (k, chunk_size, d)``."""

    data: np.ndarray
    source_name: str = ""
    ground_truth: np.ndarray | None = None

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3:
            raise FormatError(f"chunk stack must be 3-D, got shape {data.shape}")
        data.setflags(write=False)
        self.data = data
        if self.ground_truth is not None:
            gt = np.asarray(self.ground_truth, dtype=np.int64)
            if gt.shape != (data.shape[0],):
                raise FormatError(f"ground truth length {gt.shape} does not match {data.shape[0]} chunks")
            self.ground_truth = gt

    @property
    def chunks(self) -> np.ndarray:
        return self.data

    @property
    def chunk_size(self) -> int:
        return self.data.shape[1]

    @property
    def d(self) -> int:
        return self.data.shape[2]

    def __len__(self) -> int:
        return self.data.shape[0]

    @classmethod
    def from_rows(cls, rows: np.ndarray, chunk_size: int, source_name: str = "", ground_truth=None):
        """Chunk a ``(rows, d)`` matrix, discarding the incomplete tail."""
        if int(chunk_size) != chunk_size or chunk_size < 1:
            raise ConfigurationError(f"chunk_size must be a positive integer, got {chunk_size!r}")
        rows = np.asarray(rows)
        k = rows.shape[0] // chunk_size
        if k == 0:
            raise EmptyStreamError(
                f"{rows.shape[0]} rows do not fill a single chunk of {chunk_size}"
            )
        data = rows[: k * chunk_size].reshape(k, chunk_size, rows.shape[1])
        return cls(data, source_name, ground_truth)


def _parse_cell(cell: str, row: int, col: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f"row {row}, column {col}: cannot parse {cell!r} as a number") from None
    if not math.isfinite(value):
        raise ParseError(f"row {row}, column {col}: non-finite value {cell!r}")
    return value


def read_chunked_csv(
    path,
    chunk_size: int,
    has_header: bool = False,
    label_column: int | None = None,
) -> ChunkedStream:
    """Read a CSV file into chunks of ``chunk_size`` rows.

    ``label_column`` (negative indices allowed) is dropped before parsing, so
    string class names in that column are fine. Row numbers in error
    messages are 1-based file lines.
    """
    path = Path(path)
    rows: list[list[float]] = []
    width = None
    keep = None
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise FFMIOError(f"cannot open {path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        for line_no, record in enumerate(reader, start=1):
            if has_header and line_no == 1:
                continue
            if not record:
                continue
            if width is None:
                width = len(record)
                keep = list(range(width))
                if label_column is not None:
                    if not -width <= label_column < width:
                        raise ConfigurationError(
                            f"label column {label_column} outside a {width}-column file"
                        )
                    del keep[label_column % width]
                if not keep:
                    raise FormatError("no feature columns left after dropping the label column")
            elif len(record) != width:
                raise FormatError(f"row {line_no}: expected {width} columns, got {len(record)}")
            rows.append([_parse_cell(record[j].strip(), line_no, j) for j in keep])

    if not rows:
        raise EmptyStreamError(f"{path} holds no data rows")
    return ChunkedStream.from_rows(np.array(rows, dtype=np.float64), chunk_size, path.stem)


def sidecar_path_for(data_path) -> Path:
    return Path(data_path).with_suffix(".json")


def _read_sidecar(sidecar_path) -> dict:
    try:
        with open(sidecar_path, encoding="utf-8") as fh:
            meta = json.load(fh)
    except OSError as exc:
        raise FFMIOError(f"cannot read sidecar {sidecar_path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"sidecar {sidecar_path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(meta, dict):
        raise SchemaError("sidecar must be a JSON object")
    for key in ("rows", "features", "chunk_size"):
        if key not in meta:
            raise SchemaError(f"sidecar is missing field {key!r}")
        if not isinstance(meta[key], int) or isinstance(meta[key], bool) or meta[key] < 0:
            raise SchemaError(f"sidecar field {key!r} must be a nonnegative integer")
    if meta["features"] < 1 or meta["chunk_size"] < 1:
        raise SchemaError("sidecar 'features' and 'chunk_size' must be positive")
    gt = meta.get("ground_truth")
    if gt is not None and not (isinstance(gt, list) and all(isinstance(v, int) for v in gt)):
        raise SchemaError("sidecar 'ground_truth' must be a list of integers")
    return meta


def read_raw_f32(data_path, sidecar_path=None) -> ChunkedStream:
    """Load a raw float32 stream described by its JSON sidecar."""
    data_path = Path(data_path)
    sidecar_path = sidecar_path_for(data_path) if sidecar_path is None else Path(sidecar_path)
    meta = _read_sidecar(sidecar_path)
    rows, features = meta["rows"], meta["features"]
    expected = rows * features * RAW_DTYPE.itemsize
    try:
        actual = os.path.getsize(data_path)
    except OSError as exc:
        raise FFMIOError(f"cannot stat {data_path}: {exc.strerror}") from exc
    if actual != expected:
        raise FormatError(
            f"{data_path} holds {actual} bytes, sidecar implies {expected} "
            f"({rows} rows x {features} features x 4)"
        )
    flat = np.fromfile(data_path, dtype=RAW_DTYPE)
    stream = ChunkedStream.from_rows(flat.reshape(rows, features), meta["chunk_size"], data_path.stem)
    gt = meta.get("ground_truth")
    if gt is not None:
        if len(gt) < len(stream):
            raise SchemaError(f"ground truth covers {len(gt)} chunks, stream has {len(stream)}")
        stream = ChunkedStream(stream.data, stream.source_name, np.asarray(gt[: len(stream)]))
    return stream


def write_raw_f32(stream, data_path, sidecar_path=None) -> None:
    """Write ``stream`` (chunked or synthetic) as raw float32 plus sidecar.

    Chunks are written one at a time, so lazily generated streams never need
    to be held in memory as a whole.
    """
    data_path = Path(data_path)
    sidecar_path = sidecar_path_for(data_path) if sidecar_path is None else Path(sidecar_path)
    n_chunks = len(stream)
    if n_chunks == 0 or stream.chunk_size == 0:
        raise EmptyStreamError("nothing to write: stream has no samples")
    meta = {
        "rows": n_chunks * stream.chunk_size,
        "features": int(stream.d),
        "chunk_size": int(stream.chunk_size),
    }
    gt = getattr(stream, "ground_truth", None)
    if gt is not None:
        meta["ground_truth"] = [int(v) for v in gt]
    try:
        with open(data_path, "wb") as fh:
            for chunk in stream.chunks:
                np.ascontiguousarray(chunk, dtype=RAW_DTYPE).tofile(fh)
        with open(sidecar_path, "w", encoding="utf-8") as fh:
            json.dump(meta, fh)
            fh.write("\n")
    except OSError as exc:
        raise FFMIOError(f"cannot write stream: {exc}") from exc
