from pathlib import Path

import numpy as np
import pytest

from simplegate.corpus import tokenize
from simplegate.features import build_resources

DATA = Path(__file__).parent / "data"

# Toy corpus whose Model 1 tables are worked out by hand in test_lexicon.
HOUSE_CORPUS = [("the house", "das haus"), ("the", "das")]


def tok(text):
    return tokenize(text)


def blobs(n=400, dim=17, separation=4.0, seed=13):
    """Two unit-variance Gaussian classes whose means differ by
    ``separation`` standard deviations along the first axis."""
    rng = np.random.default_rng(seed)
    y = np.repeat([1, 0], n // 2)
    X = rng.normal(size=(n, dim))
    X[:, 0] += np.where(y == 1, separation / 2, -separation / 2)
    return X, y


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def house_pairs():
    return [(tok(s), tok(t)) for s, t in HOUSE_CORPUS]


@pytest.fixture
def house_resources(house_pairs):
    return build_resources(house_pairs, iterations=1)


@pytest.fixture(scope="session")
def toy_parallel():
    from simplegate.corpus import read_parallel

    return read_parallel(DATA / "toy_parallel.src", DATA / "toy_parallel.tgt")


@pytest.fixture(scope="session")
def toy_resources(toy_parallel):
    return build_resources(toy_parallel)


@pytest.fixture(scope="session")
def toy_annotated():
    from simplegate.corpus import load_annotated

    return load_annotated(DATA / "toy_annotated.jsonl")


# One verdict line per acceptance criterion, printed at the end of the run.
_VERDICTS = pytest.StashKey[list]()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if not item.nodeid.startswith("tests/test_acceptance.py::"):
        return
    if rep.when != "call" and rep.passed:  # setup/teardown only count when they break
        return
    doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
    verdicts = item.config.stash.setdefault(_VERDICTS, [])
    verdicts.append(f"{'PASS' if rep.passed else 'FAIL'}  {doc}  ({rep.duration:.2f}s)")


def pytest_terminal_summary(terminalreporter, config):
    verdicts = config.stash.get(_VERDICTS, [])
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for line in verdicts:
            terminalreporter.write_line(line)
