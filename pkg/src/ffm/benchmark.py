"""Seeded reproductions of the three synthetic-stream experiments.

Every stream gets its own seed derived from ``(seed, experiment, stream
index, replica)``, so results do not depend on how work is scheduled across
threads. Outputs are plain CSV/JSON written into one directory.
"""

from __future__ import annotations

import csv
import itertools
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import ced_metafeatures, pca_fit, pca_project
from .clustering import DEFAULT_REPLICATIONS, identify_concept_count, kmeans, normalize
from .errors import ConfigurationError
from .metadescriptor import chunk_frequency_signature, metadescribe_signatures
from .metrics import external_clustering_scores, paired_t_test
from .streamgen import StreamConfig, make_stream

EXTERNAL_METRICS = ("nmi", "adjusted_rand", "completeness", "homogeneity")
METHODS = ("ced", "ffm", "pca")

# CED's pairwise correlation step gets expensive at this width
CED_FEATURE_LIMIT = 64


@dataclass
class ExperimentPlan:
    experiment: int
    n_chunks: int
    chunk_sizes: list[int]
    n_features: int
    drift_counts: list[int]
    drift_types: list[str]
    replicas: int
    n_values: list[int] = field(default_factory=list)
    c_range: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["c_range"] = list(self.c_range) if self.c_range else None
        return out


def default_plan(experiment: int) -> ExperimentPlan:
    if experiment == 1:
        return ExperimentPlan(1, 500, [50, 100, 200], 500, [1, 3, 5, 7, 9], ["sudden"], 3, [1, 2, 4, 8, 16])
    if experiment == 2:
        return ExperimentPlan(2, 1000, [256], 64, [3], ["sudden", "gradual", "incremental"], 10, [8])
    if experiment == 3:
        return ExperimentPlan(3, 500, [100, 200, 400], 500, [1, 3, 5, 7, 9], ["sudden"], 10, [16], (2, 11))
    raise ConfigurationError(f"unknown experiment {experiment}; choose 1, 2 or 3")


def derive_seed(seed: int, *key: int) -> int:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def worker_count() -> int:
    raw = os.environ.get("FFM_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigurationError(f"FFM_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigurationError(f"FFM_THREADS must be nonnegative, got {n}")
    return n or (os.cpu_count() or 1)


def stream_descriptors(stream, want_ced: bool):
    """One pass over a stream: FFM signatures, chunk means and optional CED rows."""
    sigs, means, ced = [], [], []
    for chunk in stream.chunks:
        sigs.append(chunk_frequency_signature(chunk).values)
        means.append(chunk.mean(axis=0))
        if want_ced:
            ced.append(ced_metafeatures(chunk))
    return np.vstack(sigs), np.vstack(means), (np.vstack(ced) if want_ced else None)


def _cluster_scores(R, truth, c, seed, replications, normalization) -> dict:
    labels = kmeans(normalize(R, normalization), c, seed, replications).labels
    return external_clustering_scores(truth, labels)


@dataclass
class StreamTask:
    index: int
    replica: int
    config: StreamConfig


def _tasks(plan: ExperimentPlan, seed: int) -> list[StreamTask]:
    tasks = []
    grid = itertools.product(plan.chunk_sizes, plan.drift_counts, plan.drift_types)
    for idx, (chunk_size, drifts, drift_type) in enumerate(grid):
        for r in range(plan.replicas):
            cfg = StreamConfig(
                n_chunks=plan.n_chunks,
                chunk_size=chunk_size,
                n_features=plan.n_features,
                n_drifts=drifts,
                drift_type=drift_type,
                seed=derive_seed(seed, plan.experiment, idx, r),
            )
            tasks.append(StreamTask(idx, r, cfg))
    return tasks


def _run_clustering_task(task: StreamTask, plan: ExperimentPlan, opts: dict) -> list[dict]:
    cfg = task.config
    stream = make_stream(cfg)
    want_ced = opts["force_ced"] or cfg.n_features <= CED_FEATURE_LIMIT
    F, means, ced = stream_descriptors(stream, want_ced)
    truth = stream.ground_truth
    c = cfg.n_concepts
    base = {
        "experiment": plan.experiment,
        "drift_type": cfg.drift_type.value,
        "chunk_size": cfg.chunk_size,
        "n_drifts": cfg.n_drifts,
        "replica": task.replica,
        "stream_seed": cfg.seed,
    }
    kseed = derive_seed(cfg.seed, 1)
    reps = opts["replications"]
    norm = opts["normalization"]
    rows = []
    for n in plan.n_values:
        R = metadescribe_signatures(F, min(n, cfg.n_features // 2), cfg.n_features).R
        rows.append({**base, "method": "ffm", "n": n, **_cluster_scores(R, truth, c, kseed, reps, norm)})
    pca_R = pca_project(pca_fit(means), means)
    rows.append({**base, "method": "pca", "n": 2, **_cluster_scores(pca_R, truth, c, kseed, reps, norm)})
    if want_ced:
        rows.append({**base, "method": "ced", "n": 10, **_cluster_scores(ced, truth, c, kseed, reps, norm)})
    return rows


def _run_count_task(task: StreamTask, plan: ExperimentPlan, opts: dict) -> list[dict]:
    cfg = task.config
    stream = make_stream(cfg)
    F = np.vstack([chunk_frequency_signature(ch).values for ch in stream.chunks])
    R = metadescribe_signatures(F, plan.n_values[0], cfg.n_features).R
    c_min, c_max = plan.c_range
    report = identify_concept_count(
        R, c_min, c_max, derive_seed(cfg.seed, 1), opts["replications"], opts["normalization"]
    )
    base = {
        "experiment": plan.experiment,
        "chunk_size": cfg.chunk_size,
        "true_concepts": cfg.n_concepts,
        "replica": task.replica,
        "stream_seed": cfg.seed,
        "best_c": report.best_c,
    }
    return [{**base, "c": c, "silhouette": s} for c, s in sorted(report.scores.items())]


def _mean_std(values) -> tuple[float, float]:
    a = np.asarray(values, dtype=np.float64)
    return float(a.mean()), float(a.std())


def _write_csv(path: Path, rows: list[dict], columns: list[str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row.get(k)) for k in columns})


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, bool):
        return str(value).lower()
    return "" if value is None else value


def _clustering_summaries(rows: list[dict], alpha: float):
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        key = (row["chunk_size"], row["n_drifts"], row["drift_type"], row["method"], row["n"])
        groups.setdefault(key, []).append(row)
    aggregate = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2], METHODS.index(k[3]), k[4])):
        g = groups[key]
        entry = dict(zip(("chunk_size", "n_drifts", "drift_type", "method", "n"), key))
        entry["replicas"] = len(g)
        for m in EXTERNAL_METRICS:
            entry[f"{m}_mean"], entry[f"{m}_std"] = _mean_std([r[m] for r in g])
        aggregate.append(entry)

    # paired tests across methods, matched by replica within each stream setting
    tests, table = [], []
    settings = sorted({(r["chunk_size"], r["n_drifts"], r["drift_type"]) for r in rows})
    for cs, nd, dt in settings:
        # one representative per method: FFM at the largest n examined
        per_method = {}
        for method in METHODS:
            cand = [r for r in rows if (r["chunk_size"], r["n_drifts"], r["drift_type"], r["method"]) == (cs, nd, dt, method)]
            if not cand:
                continue
            top_n = max(r["n"] for r in cand)
            per_method[method] = sorted((r for r in cand if r["n"] == top_n), key=lambda r: r["replica"])
        present = [m for m in METHODS if m in per_method]
        for metric in EXTERNAL_METRICS:
            better: dict[str, list[int]] = {m: [] for m in present}
            for a, b in itertools.permutations(present, 2):
                va = [r[metric] for r in per_method[a]]
                vb = [r[metric] for r in per_method[b]]
                if len(va) != len(vb) or len(va) < 2:
                    continue
                res = paired_t_test(va, vb, alpha)
                a_better = res["significant"] and np.mean(va) > np.mean(vb)
                if a_better:
                    better[a].append(METHODS.index(b))
                tests.append({
                    "chunk_size": cs, "n_drifts": nd, "drift_type": dt, "metric": metric,
                    "method_a": a, "method_b": b, "t": res["t"], "p": res["p"],
                    "significant": res["significant"], "a_better": bool(a_better),
                })
            for m in present:
                mean, std = _mean_std([r[metric] for r in per_method[m]])
                table.append({
                    "metric": metric, "chunk_size": cs, "n_drifts": nd, "drift_type": dt,
                    "method": m, "index": METHODS.index(m), "mean": mean, "std": std,
                    "better_than": " ".join(str(i) for i in sorted(better[m])),
                })
    return aggregate, tests, table


def _count_summaries(rows: list[dict]):
    groups: dict[tuple, list[float]] = {}
    picks: dict[tuple, dict[int, int]] = {}
    for row in rows:
        groups.setdefault((row["chunk_size"], row["true_concepts"], row["c"]), []).append(row["silhouette"])
        picks.setdefault((row["chunk_size"], row["true_concepts"]), {})[row["replica"]] = row["best_c"]
    heat = []
    for key in sorted(groups):
        mean, std = _mean_std(groups[key])
        heat.append({"chunk_size": key[0], "true_concepts": key[1], "c": key[2],
                     "silhouette_mean": mean, "silhouette_std": std})
    ident = []
    for (cs, truth), by_rep in sorted(picks.items()):
        # the best c of the mean-silhouette curve is the marker of the heatmap
        curve = {h["c"]: h["silhouette_mean"] for h in heat if (h["chunk_size"], h["true_concepts"]) == (cs, truth)}
        mean_best = max(curve, key=lambda c: (curve[c], -c))
        hits = sum(1 for v in by_rep.values() if v == truth)
        ident.append({"chunk_size": cs, "true_concepts": truth, "best_c_of_mean": mean_best,
                      "correct": hits, "replicas": len(by_rep)})
    return heat, ident


def run_benchmark(
    experiment: int,
    out_dir,
    seed: int = 0,
    replicas: int | None = None,
    replications: int = DEFAULT_REPLICATIONS,
    normalization: str = "minmax",
    force_ced: bool = False,
    alpha: float = 0.05,
    overrides: dict | None = None,
) -> dict:
    """Run one experiment and write its CSV/JSON outputs into ``out_dir``.

    ``overrides`` may replace any :class:`ExperimentPlan` field (for smaller
    runs). Returns the manifest that is also written to ``manifest.json``.
    """
    plan = default_plan(experiment)
    if replicas is not None:
        plan.replicas = replicas
    for key, value in (overrides or {}).items():
        if value is not None:
            if not hasattr(plan, key):
                raise ConfigurationError(f"unknown plan field {key!r}")
            setattr(plan, key, value)
    if plan.replicas < 1:
        raise ConfigurationError("replicas must be positive")
    normalize(np.zeros((1, 1)), normalization)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = _tasks(plan, seed)
    opts = {"replications": replications, "normalization": normalization, "force_ced": force_ced}
    runner = _run_count_task if experiment == 3 else _run_clustering_task
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(lambda t: runner(t, plan, opts), tasks))
    rows = [row for chunk in results for row in chunk]

    manifest = {
        "package_version": __version__,
        "experiment": experiment,
        "seed": seed,
        "plan": plan.to_dict(),
        "kmeans_replications": replications,
        "normalization": normalization,
        "alpha": alpha,
        "streams": [
            {"grid_index": t.index, "replica": t.replica, "config": t.config.to_dict(),
             "kmeans_seed": derive_seed(t.config.seed, 1)}
            for t in tasks
        ],
        "skipped": [],
        "outputs": [],
    }

    if experiment == 3:
        _write_csv(out / "per_stream.csv", rows,
                   ["experiment", "chunk_size", "true_concepts", "replica", "stream_seed", "c", "silhouette", "best_c"])
        heat, ident = _count_summaries(rows)
        _write_csv(out / "silhouette_heatmap.csv", heat,
                   ["chunk_size", "true_concepts", "c", "silhouette_mean", "silhouette_std"])
        _write_csv(out / "identification.csv", ident,
                   ["chunk_size", "true_concepts", "best_c_of_mean", "correct", "replicas"])
        manifest["outputs"] = ["per_stream.csv", "silhouette_heatmap.csv", "identification.csv"]
        manifest["methods"] = ["ffm"]
    else:
        cols = ["experiment", "drift_type", "chunk_size", "n_drifts", "replica", "stream_seed",
                "method", "n", *EXTERNAL_METRICS]
        _write_csv(out / "per_stream.csv", rows, cols)
        aggregate, tests, table = _clustering_summaries(rows, alpha)
        _write_csv(out / "aggregate.csv", aggregate,
                   ["chunk_size", "n_drifts", "drift_type", "method", "n", "replicas",
                    *[f"{m}_{s}" for m in EXTERNAL_METRICS for s in ("mean", "std")]])
        _write_csv(out / "ttest.csv", tests,
                   ["chunk_size", "n_drifts", "drift_type", "metric", "method_a", "method_b",
                    "t", "p", "significant", "a_better"])
        _write_csv(out / "comparison_table.csv", table,
                   ["metric", "chunk_size", "n_drifts", "drift_type", "method", "index", "mean", "std", "better_than"])
        manifest["outputs"] = ["per_stream.csv", "aggregate.csv", "ttest.csv", "comparison_table.csv"]
        manifest["methods"] = sorted({r["method"] for r in rows}, key=METHODS.index)
        if not force_ced and plan.n_features > CED_FEATURE_LIMIT:
            manifest["skipped"].append(
                {"method": "ced", "reason": f"n_features {plan.n_features} > {CED_FEATURE_LIMIT}; use --force-ced"}
            )
    manifest["outputs"].append("manifest.json")
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest
