import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from ffm.cli import adjacency, parse_chunk_list, run
from ffm.errors import ConfigurationError
from ffm.imaging import read_pgm


def _gen(tmp_path, name="s.f32", **kw):
    out = tmp_path / name
    args = {"chunks": 40, "chunk-size": 20, "features": 16, "drifts": 1, "seed": 3}
    args.update(kw)
    argv = ["generate", "--out", str(out)]
    for k, v in args.items():
        argv += [f"--{k}", str(v)]
    assert run(argv) == 0
    return out


def _error_lines(capsys):
    err = capsys.readouterr().err
    lines = err.strip().splitlines()
    assert len(lines) == 1, err
    return lines[0]


def test_generate_writes_raw_and_sidecar(tmp_path):
    out = _gen(tmp_path)
    assert out.stat().st_size == 40 * 20 * 16 * 4
    side = json.loads(out.with_suffix(".json").read_text())
    assert side["chunk_size"] == 20 and side["features"] == 16 and side["rows"] == 800
    assert side["ground_truth"] == [0] * 20 + [1] * 20


def test_describe_methods(tmp_path):
    data = _gen(tmp_path)
    for method, width in [("ffm", 4), ("ced", 10), ("pca", 2)]:
        meta = tmp_path / f"{method}.json"
        assert run(["describe", "--in", str(data), "--n", "4", "--method", method, "--out", str(meta)]) == 0
        doc = json.loads(meta.read_text())
        assert np.asarray(doc["R"]).shape == (40, width)
        assert doc["method"] == method
        assert len(doc["ground_truth"]) == 40


def test_describe_csv(tmp_path, rng):
    rows = rng.normal(size=(30, 6))
    path = tmp_path / "x.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"a{i}" for i in range(6)] + ["label"])
        for r in rows:
            w.writerow([*r, "k"])
    meta = tmp_path / "m.json"
    argv = ["describe", "--in", str(path), "--chunk-size", "10", "--header", "--label-column", "-1",
            "--n", "2", "--out", str(meta)]
    assert run(argv) == 0
    doc = json.loads(meta.read_text())
    assert doc["d"] == 6 and len(doc["R"]) == 3


def test_cluster_and_identify(tmp_path):
    data = _gen(tmp_path, chunks=60, drifts=2)
    meta = tmp_path / "m.json"
    run(["describe", "--in", str(data), "--n", "4", "--out", str(meta)])
    out = tmp_path / "cl"
    assert run(["cluster", "--meta", str(meta), "--concepts", "3", "--out", str(out)]) == 0
    with open(out / "labels.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["chunk_index", "concept_id"] and len(rows) == 61
    scores = json.loads((out / "scores.json").read_text())
    assert set(scores) == {"nmi", "adjusted_rand", "completeness", "homogeneity"}
    ident = tmp_path / "id.json"
    summary = tmp_path / "id.csv"
    assert run(["identify", "--meta", str(meta), "--c-min", "2", "--c-max", "6",
                "--out", str(ident), "--csv", str(summary)]) == 0
    doc = json.loads(ident.read_text())
    assert doc["concepts"] in range(2, 7)
    assert {"sil", "c_h", "d_b", "adjacency", "scores"} <= set(doc)
    assert summary.read_text().splitlines()[0] == "data_stream,concepts,sil,c_h,d_b"


def test_visualize(tmp_path):
    data = _gen(tmp_path, features=40)
    meta = tmp_path / "m.json"
    run(["describe", "--in", str(data), "--n", "16", "--out", str(meta)])
    img = tmp_path / "v.pgm"
    assert run(["visualize", "--meta", str(meta), "--chunks", "0-9,30-31", "--columns", "10", "--out", str(img)]) == 0
    assert read_pgm(img).shape == (2 * 16 + 1, 10 * 16 + 9)


def test_end_to_end_sudden_nmi(tmp_path):
    data = _gen(tmp_path, chunks=200, **{"chunk-size": 64, "features": 64, "drifts": 3, "seed": 0})
    meta = tmp_path / "m.json"
    assert run(["describe", "--in", str(data), "--method", "ffm", "--n", "8", "--out", str(meta)]) == 0
    out = tmp_path / "cl"
    assert run(["cluster", "--meta", str(meta), "--concepts", "4", "--out", str(out)]) == 0
    assert json.loads((out / "scores.json").read_text())["nmi"] >= 0.9


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["generate", "--chunks", "x"],
        ["describe", "--in", "/nonexistent/file.f32", "--out", "o.json"],
        ["cluster", "--meta", "/nonexistent.json", "--concepts", "2", "--out", "d"],
        ["generate", "--chunks", "0", "--chunk-size", "3", "--features", "4", "--out", "z.f32"],
    ],
)
def test_errors_are_single_line(tmp_path, capsys, monkeypatch, argv):
    monkeypatch.chdir(tmp_path)
    code = run(argv)
    assert code != 0
    assert _error_lines(capsys).startswith("ffm: error[")


def test_bad_meta_schema(tmp_path, capsys):
    meta = tmp_path / "m.json"
    meta.write_text('{"R": [[1, 2]]}')
    assert run(["cluster", "--meta", str(meta), "--concepts", "2", "--out", str(tmp_path)]) == 1
    assert "schema" in _error_lines(capsys)


def test_too_many_concepts(tmp_path, capsys):
    data = _gen(tmp_path, chunks=5, drifts=0)
    meta = tmp_path / "m.json"
    run(["describe", "--in", str(data), "--n", "2", "--out", str(meta)])
    assert run(["cluster", "--meta", str(meta), "--concepts", "9", "--out", str(tmp_path / "o")]) == 1
    _error_lines(capsys)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ffm", "describe"], capture_output=True, text=True)
    assert proc.returncode == 2
    assert proc.stderr.count("\n") == 1


def _pipeline_bytes(root):
    root.mkdir()
    data = _gen(root, chunks=50, drifts=2)
    meta = root / "m.json"
    run(["describe", "--in", str(data), "--n", "4", "--out", str(meta)])
    run(["cluster", "--meta", str(meta), "--concepts", "3", "--out", str(root / "cl")])
    run(["identify", "--meta", str(meta), "--c-max", "5", "--out", str(root / "id.json")])
    run(["benchmark", "--experiment", "2", "--replicas", "2", "--chunks", "30", "--features", "8",
         "--chunk-sizes", "16", "--replications", "2", "--out-dir", str(root / "bench")])
    return {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_reruns_are_byte_identical(tmp_path, monkeypatch):
    monkeypatch.setenv("FFM_THREADS", "1")
    a = _pipeline_bytes(tmp_path / "a")
    monkeypatch.setenv("FFM_THREADS", "4")
    b = _pipeline_bytes(tmp_path / "b")
    assert a.keys() == b.keys()
    for k in a:
        assert a[k] == b[k], k


def test_parse_chunk_list():
    assert parse_chunk_list("0-2,7, 9-9") == [0, 1, 2, 7, 9]
    for bad in ["", "3-1", "a", "1-b"]:
        with pytest.raises(ConfigurationError):
            parse_chunk_list(bad)


def test_adjacency():
    assert adjacency([0, 0, 1, 1]) == pytest.approx(2 / 3)
    assert adjacency([5]) == 1.0
