import numpy as np
import pytest

from mvfuse.graph import build_graph
from mvfuse.testing import make_planted

# graph settings used for every planted-instance test
PLANTED_K = 5
PLANTED_PHI = 5.0


@pytest.fixture(scope="session")
def planted():
    return make_planted(7)


@pytest.fixture(scope="session")
def planted_dataset(planted):
    return planted.dataset()


@pytest.fixture(scope="session")
def planted_graph(planted_dataset):
    return build_graph(planted_dataset, PLANTED_K, PLANTED_PHI)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# best planted grid point found by the acceptance sweep
PLANTED_BEST = dict(eta=2.0, beta=2.0, theta=0.0625, sigma=1.0, phi=PLANTED_PHI, k_neighbors=PLANTED_K)


def write_planted_files(inst, folder, hyper=None, **extra):
    """Write the planted views, truth and a JSON config into ``folder``."""
    import json

    folder.mkdir(parents=True, exist_ok=True)
    for name, X in (("gaussian", inst.gaussian), ("counts", inst.counts)):
        header = ",".join(f"f{j}" for j in range(X.shape[1]))
        np.savetxt(folder / f"{name}.csv", X, delimiter=",", fmt="%.17g", header=header, comments="")
    (folder / "truth.txt").write_text("".join(f"{x}\n" for x in inst.labels))
    cfg = {
        "views": [{"path": "gaussian.csv", "loss": "gaussian"}, {"path": "counts.csv", "loss": "manhattan"}],
        "hyperparameters": dict(PLANTED_BEST if hyper is None else hyper),
        "truth_labels_path": "truth.txt",
        **extra,
    }
    path = folder / "config.json"
    path.write_text(json.dumps(cfg, indent=1))
    return path


@pytest.fixture
def planted_config(planted, tmp_path):
    return write_planted_files(planted, tmp_path / "run")


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
