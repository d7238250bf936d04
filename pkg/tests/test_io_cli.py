import json
import math
from pathlib import Path

import numpy as np
import pytest

from mvfuse import io
from mvfuse.admm import solve
from mvfuse.cli import main
from mvfuse.data import HyperParams, View, assemble_dataset
from mvfuse.errors import ConfigError, EmptyFile, IoError, ParseError, RaggedRow, ValidationError
from mvfuse.graph import build_graph
from mvfuse.testing import make_blobs

SNAPSHOTS = Path(__file__).parent / "snapshots"


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


# ------------------------------------------------------------------ csv

def test_csv_plain(tmp_path):
    X = io.load_view_csv(_write(tmp_path, "a.csv", "1,2\n3,4\n5,6\n"))
    assert X.shape == (3, 2) and X[2, 1] == 6.0


def test_csv_header_and_blank_lines(tmp_path):
    X = io.load_view_csv(_write(tmp_path, "a.csv", "x,y\n1,2\n\n-3.5e1,.25\n"))
    assert X.tolist() == [[1.0, 2.0], [-35.0, 0.25]]


def test_csv_ragged_row_names_line(tmp_path):
    with pytest.raises(RaggedRow) as info:
        io.load_view_csv(_write(tmp_path, "a.csv", "1,2\n3,4\n5\n"))
    assert info.value.line == 3


@pytest.mark.parametrize("cell", ["abc", "nan", "inf", "0x10", "5e"])
def test_csv_parse_error(tmp_path, cell):
    with pytest.raises(ParseError) as info:
        io.load_view_csv(_write(tmp_path, "a.csv", f"1,2\n3,{cell}\n"))
    assert (info.value.line, info.value.column) == (2, 2)


@pytest.mark.parametrize("text", ["", "\n\n", "a,b\n"])
def test_csv_empty(tmp_path, text):
    with pytest.raises(EmptyFile):
        io.load_view_csv(_write(tmp_path, "a.csv", text))


def test_labels(tmp_path):
    assert io.load_labels(_write(tmp_path, "l.txt", "1\n2\n\n2\n")) == [1, 2, 2]
    assert io.load_labels(_write(tmp_path, "s.txt", "a\nb\n")) == ["a", "b"]
    with pytest.raises(EmptyFile):
        io.load_labels(_write(tmp_path, "e.txt", "\n"))


# ------------------------------------------------------------- documents

@pytest.fixture(scope="module")
def small_result():
    X, _ = make_blobs(20, 3, seed=2)
    ds = assemble_dataset([View(X)])
    g = build_graph(ds, 4, 1.0)
    return ds, solve(ds, g, HyperParams(eta=1.0, beta=0.5, k_neighbors=4))[1]


def test_document_round_trip(small_result):
    ds, res = small_result
    doc = io.result_document(res)
    back = json.loads(io.dumps(doc))
    assert back == doc
    assert len(back["labels"]) == ds.n
    assert io.hyperparams_from_document(back["hyperparameters"]) == res.hyperparams


def test_float_format():
    for x in (0.1, 1 / 3, 1e-300, 2.0, -7.25e17):
        assert float(io._format_float(x)) == x
    assert io._format_float(2.0) == "2.0"
    assert io.dumps({"a": [1, 2.5, None, True]}) == '{\n  "a": [1, 2.5, null, true]\n}'
    assert math.isnan(float(io._format_float(float("nan"))))


def test_write_result_io_error(small_result, tmp_path):
    with pytest.raises(IoError):
        io.write_result(small_result[1], tmp_path / "missing" / "out.json")


# ---------------------------------------------------------------- config

def _cfg(tmp_path, **over):
    _write(tmp_path, "v.csv", "1,2\n2,3\n8,9\n9,9\n")
    cfg = {"views": [{"path": "v.csv", "loss": "gaussian"}],
           "hyperparameters": {"k_neighbors": 2}}
    cfg.update(over)
    return _write(tmp_path, "c.json", json.dumps(cfg))


def test_config_resolves_relative_paths(tmp_path):
    cfg = io.load_config(_cfg(tmp_path))
    assert cfg.dataset.n == 4 and cfg.params.k_neighbors == 2


def test_config_yaml(tmp_path):
    _write(tmp_path, "v.csv", "1,2\n2,3\n8,9\n")
    p = _write(tmp_path, "c.yaml", "views:\n  - path: v.csv\n    loss: gaussian\nhyperparameters:\n  k_neighbors: 1\n")
    assert io.load_config(p).dataset.n == 3


@pytest.mark.parametrize("over", [
    dict(bogus=1),
    dict(views=[]),
    dict(views=[{"path": "v.csv", "loss": "poisson"}]),
    dict(hyperparameters={"theta": 2.0}),
    dict(hyperparameters={"k_neighbors": 9}),
    dict(path_spec={"eta_grid": [3, 2]}),
    dict(views=[{"path": "nope.csv", "loss": "gaussian"}]),
    dict(truth_labels_path="nope.txt"),
])
def test_config_rejected(tmp_path, over):
    with pytest.raises(ValidationError):
        io.load_config(_cfg(tmp_path, **over))


def test_config_truth_length(tmp_path):
    _write(tmp_path, "t.txt", "1\n2\n")
    with pytest.raises(ValidationError):
        io.load_config(_cfg(tmp_path, truth_labels_path="t.txt"))


def test_config_missing(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        io.load_config(tmp_path / "none.json")


# ------------------------------------------------------------------- cli

def test_cli_metrics_identical(tmp_path, capsys):
    a = _write(tmp_path, "a.txt", "1\n1\n2\n3\n")
    assert main(["metrics", "--truth", str(a), "--pred", str(a)]) == 0
    assert capsys.readouterr().out == "acc=1.000000\nnmi=1.000000\nari=1.000000\nfmi=1.000000\n"


def test_cli_missing_config(tmp_path, capsys):
    missing = tmp_path / "nothere.json"
    assert main(["cluster", "--config", str(missing)]) == 1
    err = capsys.readouterr().err
    assert str(missing) in err


def test_cli_bad_arguments(capsys):
    assert main(["frobnicate"]) == 1
    assert main([]) == 1


def test_cli_invalid_config_before_solve(tmp_path, capsys, monkeypatch):
    import mvfuse.cli as cli_mod

    def boom(*a, **k):
        raise AssertionError("solver should not run")

    monkeypatch.setattr(cli_mod, "solve", boom)
    assert main(["cluster", "--config", str(_cfg(tmp_path, bogus=1))]) == 1
    assert "bogus" in capsys.readouterr().err


def test_cli_unwritable_output(tmp_path, capsys):
    cfg = _cfg(tmp_path)
    assert main(["cluster", "--config", str(cfg), "--output", str(tmp_path / "no" / "x.json")]) == 2


def test_cli_graph(tmp_path, capsys):
    assert main(["graph", "--config", str(_cfg(tmp_path))]) == 0
    rows = [line.split(",") for line in capsys.readouterr().out.splitlines()]
    assert rows and all(len(r) == 3 for r in rows)
    for i, j, w in rows:
        assert 1 <= int(i) < int(j) <= 4 and 0 < float(w) <= 1


def test_cli_cluster_snapshot_and_determinism(planted_config):
    out1 = planted_config.parent / "a.json"
    out2 = planted_config.parent / "b.json"
    assert main(["cluster", "--config", str(planted_config), "--output", str(out1)]) == 0
    assert main(["cluster", "--config", str(planted_config), "--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    got = io.read_document(out1)
    want = io.read_document(SNAPSHOTS / "cluster_planted.json")
    for key in ("labels", "n_clusters", "selected_features", "converged", "iterations", "metrics"):
        assert got[key] == want[key], key
    np.testing.assert_allclose(got["objective_trace"], want["objective_trace"], rtol=1e-9)
    assert len(got["labels"]) == 60


def test_cli_path_writes_records(planted, tmp_path):
    from conftest import write_planted_files

    cfg = write_planted_files(planted, tmp_path, path_spec={
        "eta_grid": [1.0, 2.0], "beta_grid": [2.0], "theta_grid": [0.0625], "sigma_grid": [1.0]})
    out = tmp_path / "path.json"
    assert main(["path", "--config", str(cfg), "--output", str(out)]) == 0
    doc = io.read_document(out)
    assert len(doc["records"]) == 2
    assert doc["best"]["eta"] == 2.0 and doc["selection_error"] is None


def test_cli_path_no_selection_still_writes(planted, tmp_path):
    from conftest import write_planted_files

    cfg = write_planted_files(planted, tmp_path, path_spec={
        "eta_grid": [2.0], "beta_grid": [2.0], "theta_grid": [0.0625], "sigma_grid": [1.0],
        "target_clusters": 40})
    text = (tmp_path / "config.json").read_text()
    (tmp_path / "config.json").write_text(text.replace('"truth_labels_path": "truth.txt",', ""))
    out = tmp_path / "path.json"
    assert main(["path", "--config", str(cfg), "--output", str(out)]) == 0
    doc = io.read_document(out)
    assert doc["best"] is None and "40 clusters" in doc["selection_error"]
