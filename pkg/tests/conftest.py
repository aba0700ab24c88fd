import numpy as np
import pytest

from outerlip.freeprod import MarkedGraph, identity_marking
from outerlip.graph import GraphOfGroups
from outerlip.groups import GroupSpec
from outerlip.scene import load_preset, parse_scene, test_graphs

CHAIN_ELL = (0.25, 0.75)
CHAIN_MID = (0.5, 0.5)
TAU = (1.0, -1.0)


def chain_graph() -> GraphOfGroups:
    return GraphOfGroups.build([("v1", 1), ("v2", 2), ("v3", 3)], [("e1", "v1", "v2"), ("e2", "v2", "v3")])


def rose_graph() -> GraphOfGroups:
    return GraphOfGroups.build([("v1", 1)], [("a", "v1", "v1"), ("b", "v1", "v1")])


def marked(graph, metric, groups=None):
    groups = groups if groups is not None else GroupSpec.uniform(graph.r)
    return MarkedGraph(graph, tuple(metric), groups, identity_marking(graph))


@pytest.fixture(scope="session")
def chain():
    return chain_graph()


@pytest.fixture(scope="session")
def z3():
    return GroupSpec.uniform(3)


@pytest.fixture(scope="session")
def rose():
    return rose_graph()


@pytest.fixture(scope="session")
def ex1():
    return load_preset("example1")


@pytest.fixture(scope="session")
def ex2():
    return load_preset("example2")


@pytest.fixture(scope="session")
def fib():
    return load_preset("fibonacci")


@pytest.fixture(scope="session")
def graphs():
    return test_graphs()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
