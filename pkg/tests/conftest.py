import numpy as np
import pytest

from flexdesign.model import Arc, Demand, Network, Supplier


@pytest.fixture
def unit_net():
    return Network(("n1",), (), (Supplier("s1", "n1", 1.0),), (Demand("r1", "n1", 1),))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def two_node(cap_arc=1.0, cap_sup=2.0):
    return Network(
        ("a", "b"),
        (Arc("ab", "a", "b", cap_arc),),
        (Supplier("g", "a", cap_sup),),
        (Demand("da", "a", 1), Demand("db", "b", 2)),
    )


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
