import numpy as np
import pytest

from kselect import AffinityMatrix, ClusterAssignment

from oracles import block_affinity


_LINES = pytest.StashKey[list]()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def blocks():
    """Factory for exact block-diagonal affinities and their labels."""

    def make(sizes):
        m, labels = block_affinity(sizes)
        return AffinityMatrix(np.array(m)), ClusterAssignment(np.array(labels))

    return make


@pytest.fixture
def random_affinity(rng):
    def make(n):
        m = np.triu(rng.uniform(0, 1, size=(n, n)), 1)
        m = m + m.T
        np.fill_diagonal(m, 1.0)
        return AffinityMatrix(m)

    return make


@pytest.fixture
def criterion(request):
    """Record one acceptance line; printed in the terminal summary."""
    lines = request.config.stash.setdefault(_LINES, [])

    def record(name, passed, detail=""):
        lines.append(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}".rstrip())
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
