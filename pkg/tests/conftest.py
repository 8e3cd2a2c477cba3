import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ispwl.graph import Graph, generate_ba, generate_er, generate_named  # noqa: E402


def k3_pendant() -> Graph:
    """Triangle 0-1-2 with pendant node 3 hanging off node 0."""
    return Graph.from_edges(4, [(0, 1), (1, 2), (0, 2), (0, 3)])


def random_corpus(count: int, seed: int, max_n: int = 300, min_n: int = 4):
    """Alternating BA and Erdos-Renyi graphs with sizes up to ``max_n``."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(min_n, max_n)
        if i % 2 == 0:
            m = rng.randint(1, min(4, n - 1))
            out.append(generate_ba(n, m, rng.randrange(2**32)))
        else:
            p = min(1.0, rng.uniform(1.0, 6.0) / n)
            out.append(generate_er(n, p, rng.randrange(2**32)))
    return out


@pytest.fixture
def c6():
    return generate_named("cycle", 6)


@pytest.fixture
def two_k3():
    return generate_named("disjoint_cliques", 2, 3)


@pytest.fixture
def k4():
    return generate_named("clique", 4)


@pytest.fixture
def pendant():
    return k3_pendant()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
