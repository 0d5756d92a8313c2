"""Command-line front end.

Subcommands: generate, describe, cluster, identify, visualize, benchmark.
Failures print exactly one line, ``ffm: error[<kind>]: <message>``, to
stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .baselines import ced_describe, pca_describe
from .benchmark import run_benchmark
from .clustering import DEFAULT_REPLICATIONS, NORMALIZERS, identify_concept_count, kmeans, normalize
from .errors import ConfigurationError, FFMError, FFMIOError, SchemaError
from .imaging import write_strip
from .ingest import read_chunked_csv, read_raw_f32, write_raw_f32
from .metadescriptor import Metadescription, metadescribe, render_chunk_image
from .metrics import external_clustering_scores, internal_clustering_scores
from .streamgen import DriftType, StreamConfig, make_stream

EXIT_USAGE = 2
EXIT_FAILURE = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dump_json(path, doc) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise FFMIOError(f"cannot write {path}: {exc.strerror}") from exc


def _load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FFMIOError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc.msg}") from exc


def _load_meta(path) -> dict:
    doc = _load_json(path)
    if not isinstance(doc, dict) or "R" not in doc:
        raise SchemaError(f"{path} has no 'R' matrix")
    R = np.asarray(doc["R"], dtype=np.float64)
    if R.ndim != 2 or R.shape[0] < 2:
        raise SchemaError(f"{path}: 'R' must be a k x n matrix with k >= 2")
    doc["R"] = R
    return doc


def parse_chunk_list(selection: str) -> list[int]:
    """Parse ``"0-9,100,120-121"`` into a list of indices (inclusive ranges)."""
    out = []
    for part in selection.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                lo, hi = (int(v) for v in part.split("-", 1))
                if hi < lo:
                    raise ValueError
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise ConfigurationError(f"bad chunk selection {part!r}") from None
    if not out:
        raise ConfigurationError("empty chunk selection")
    return out


def _read_input(args):
    path = Path(args.input)
    fmt = args.format
    if fmt == "auto":
        fmt = "csv" if path.suffix.lower() == ".csv" else "raw"
    if fmt == "csv":
        if args.chunk_size is None:
            raise ConfigurationError("--chunk-size is required for CSV input")
        return read_chunked_csv(path, args.chunk_size, args.header, args.label_column)
    return read_raw_f32(path, args.sidecar)


def cmd_generate(args) -> None:
    cfg = StreamConfig(
        n_chunks=args.chunks,
        chunk_size=args.chunk_size,
        n_features=args.features,
        n_drifts=args.drifts,
        drift_type=DriftType(args.drift_type),
        recurring=args.recurring,
        seed=args.seed,
        center_scale=args.center_scale,
    )
    write_raw_f32(make_stream(cfg), args.out)


def cmd_describe(args) -> None:
    stream = _read_input(args)
    if args.method == "ffm":
        doc = metadescribe(stream, args.n).to_dict()
    elif args.method == "ced":
        R = ced_describe(stream.chunks)
        doc = {"n": R.shape[1], "d": stream.d, "R": R.tolist()}
    else:
        R, _ = pca_describe(stream.chunks)
        doc = {"n": R.shape[1], "d": stream.d, "R": R.tolist()}
    doc["method"] = args.method
    doc["source"] = stream.source_name
    if stream.ground_truth is not None:
        doc["ground_truth"] = [int(v) for v in stream.ground_truth]
    _dump_json(args.out, doc)


def cmd_cluster(args) -> None:
    meta = _load_meta(args.meta)
    X = normalize(meta["R"], args.normalize)
    result = kmeans(X, args.concepts, args.seed, args.replications, args.max_iter)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "labels.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["chunk_index", "concept_id"])
        writer.writerows(enumerate(int(v) for v in result.labels))
    _dump_json(out / "clustering.json", result.to_dict())
    truth = meta.get("ground_truth")
    if truth is not None:
        if len(truth) != len(result.labels):
            raise SchemaError("ground truth length does not match the number of chunks")
        _dump_json(out / "scores.json", external_clustering_scores(truth, result.labels, args.nmi_average))


def adjacency(labels) -> float:
    """Share of chunks whose label equals their predecessor's."""
    labels = np.asarray(labels)
    if labels.size < 2:
        return 1.0
    return float(np.mean(labels[1:] == labels[:-1]))


def cmd_identify(args) -> None:
    meta = _load_meta(args.meta)
    X = normalize(meta["R"], args.normalize)
    report = identify_concept_count(meta["R"], args.c_min, args.c_max, args.seed, args.replications, args.normalize)
    labels = report.clusterings[report.best_c].labels
    internal = internal_clustering_scores(X, labels)
    doc = report.to_dict()
    doc.update({
        "source": meta.get("source", ""),
        "concepts": report.best_c,
        "sil": internal["silhouette"],
        "c_h": internal["calinski_harabasz"],
        "d_b": internal["davies_bouldin"],
        "adjacency": adjacency(labels),
        "labels": [int(v) for v in labels],
    })
    _dump_json(args.out, doc)
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["data_stream", "concepts", "sil", "c_h", "d_b"])
            writer.writerow([doc["source"], doc["concepts"], repr(doc["sil"]), repr(doc["c_h"]), repr(doc["d_b"])])


def cmd_visualize(args) -> None:
    doc = _load_meta(args.meta)
    if "selected" not in doc:
        raise SchemaError("visualization needs an FFM metadescription (with 'selected')")
    doc["R"] = doc["R"].tolist()
    meta = Metadescription.from_dict(doc)
    images = [render_chunk_image(meta, t) for t in parse_chunk_list(args.chunks)]
    write_strip(images, args.columns, args.out)


def cmd_benchmark(args) -> None:
    overrides = {
        "n_chunks": args.chunks,
        "chunk_sizes": args.chunk_sizes,
        "n_features": args.features,
        "drift_counts": args.drifts,
    }
    run_benchmark(
        args.experiment,
        args.out_dir,
        seed=args.seed,
        replicas=args.replicas,
        replications=args.replications,
        normalization=args.normalize,
        force_ced=args.force_ced,
        overrides=overrides,
    )


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ffm", description="Frequency Filtering Metadescriptor toolchain")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic drifting stream")
    g.add_argument("--chunks", type=int, required=True)
    g.add_argument("--chunk-size", type=int, required=True)
    g.add_argument("--features", type=int, required=True)
    g.add_argument("--drifts", type=int, default=0)
    g.add_argument("--drift-type", choices=[t.value for t in DriftType], default="sudden")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--recurring", action="store_true")
    g.add_argument("--center-scale", type=float, default=StreamConfig.__dataclass_fields__["center_scale"].default)
    g.add_argument("--out", required=True, help="raw float32 path; the sidecar gets a .json suffix")
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("describe", help="compute a metadescription")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--format", choices=["auto", "raw", "csv"], default="auto")
    d.add_argument("--sidecar", help="sidecar path for raw input (default: <in> with .json suffix)")
    d.add_argument("--chunk-size", type=int, help="chunk size for CSV input")
    d.add_argument("--header", action="store_true", help="CSV has a header row")
    d.add_argument("--label-column", type=int, help="CSV column to drop (negative counts from the end)")
    d.add_argument("--n", type=int, default=8)
    d.add_argument("--method", choices=["ffm", "ced", "pca"], default="ffm")
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_describe)

    c = sub.add_parser("cluster", help="k-means over a metadescription")
    c.add_argument("--meta", required=True)
    c.add_argument("--concepts", type=int, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--replications", type=int, default=DEFAULT_REPLICATIONS)
    c.add_argument("--max-iter", type=int, default=300)
    c.add_argument("--normalize", choices=sorted(NORMALIZERS), default="minmax")
    c.add_argument("--nmi-average", choices=["geometric", "arithmetic"], default="geometric")
    c.add_argument("--out", required=True, help="output directory")
    c.set_defaults(func=cmd_cluster)

    i = sub.add_parser("identify", help="silhouette search for the number of concepts")
    i.add_argument("--meta", required=True)
    i.add_argument("--c-min", type=int, default=2)
    i.add_argument("--c-max", type=int, default=11)
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--replications", type=int, default=DEFAULT_REPLICATIONS)
    i.add_argument("--normalize", choices=sorted(NORMALIZERS), default="minmax")
    i.add_argument("--out", required=True)
    i.add_argument("--csv", help="also write a one-row sil/c-h/d-b summary CSV")
    i.set_defaults(func=cmd_identify)

    v = sub.add_parser("visualize", help="render chunk images into a PGM strip")
    v.add_argument("--meta", required=True)
    v.add_argument("--chunks", required=True, help="indices and inclusive ranges, e.g. 0-9,250-259")
    v.add_argument("--columns", type=int, default=10)
    v.add_argument("--out", required=True)
    v.set_defaults(func=cmd_visualize)

    b = sub.add_parser("benchmark", help="reproduce an experiment on synthetic streams")
    b.add_argument("--experiment", type=int, choices=[1, 2, 3], required=True)
    b.add_argument("--replicas", type=int, help="streams per setting (default 3 for experiment 1, else 10)")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--replications", type=int, default=DEFAULT_REPLICATIONS)
    b.add_argument("--normalize", choices=sorted(NORMALIZERS), default="minmax")
    b.add_argument("--force-ced", action="store_true", help="run CED even on wide streams")
    b.add_argument("--chunks", type=int, help="override the number of chunks")
    b.add_argument("--chunk-sizes", type=_int_list, help="override chunk sizes, e.g. 100,200")
    b.add_argument("--features", type=int, help="override the number of features")
    b.add_argument("--drifts", type=_int_list, help="override drift counts, e.g. 1,3")
    b.add_argument("--out-dir", required=True)
    b.set_defaults(func=cmd_benchmark)
    return p


def _one_line(text: str) -> str:
    return " ".join(str(text).split())


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"ffm: error[usage]: {_one_line(exc)}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args.func(args)
    except FFMError as exc:
        print(f"ffm: error[{exc.kind}]: {_one_line(exc)}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"ffm: error[io]: {_one_line(exc)}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as exc:
        print(f"ffm: error[value]: {_one_line(exc)}", file=sys.stderr)
        return EXIT_FAILURE
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
