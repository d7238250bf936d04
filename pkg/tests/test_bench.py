import csv
import io
import warnings

from mvfuse.admm import solve
from mvfuse.bench import TimingRow, main, run_scaling, to_csv
from mvfuse.data import HyperParams
from mvfuse.errors import ConvergenceWarning
from mvfuse.graph import CachedFactorization, build_graph

SMALL = ((20, 5), (30, 10))


def _parse(text):
    return list(csv.reader(io.StringIO(text)))


def test_schema_independent_of_repeats():
    one = run_scaling(SMALL, repeats=1, iters=3)
    five = run_scaling(SMALL, repeats=5, iters=3)
    a, b = _parse(to_csv(one)), _parse(to_csv(five))
    assert a[0] == b[0] == ["n", "p", "n_edges", "t_factor", "t_per_iter"]
    assert len(a) == len(b) == 3
    assert [r[:3] for r in a] == [r[:3] for r in b]


def test_rows_positive():
    for row in run_scaling(SMALL, repeats=1, iters=2):
        assert isinstance(row, TimingRow)
        assert row.n_edges > 0 and row.t_factor > 0 and row.t_per_iter > 0


def test_csv_file(tmp_path):
    rows = run_scaling(SMALL[:1], repeats=1, iters=2)
    out = tmp_path / "t.csv"
    text = to_csv(rows, out)
    assert out.read_text() == text


def test_cli(capsys):
    main(["--repeats", "1", "--iters", "1"])
    rows = _parse(capsys.readouterr().out)
    assert len(rows) == 10


def test_one_factorization_per_graph(planted_dataset):
    graph = build_graph(planted_dataset, 5, 5.0)
    before = CachedFactorization.count
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        for eta in (1.0, 2.0, 4.0):
            solve(planted_dataset, graph, HyperParams(eta=eta, beta=1.0, phi=5.0, k_neighbors=5))
    assert CachedFactorization.count == before + 1
