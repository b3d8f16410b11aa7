import random

import pytest
from hypothesis import strategies as st

from bipswitch.bigraph import Realization

LIMIT = 64


@st.composite
def realizations(draw, max_side: int = 4):
    nA = draw(st.integers(1, max_side))
    nB = draw(st.integers(1, max_side))
    bits = draw(st.lists(st.booleans(), min_size=nA * nB, max_size=nA * nB))
    edges = [(i + 1, j + 1) for i in range(nA) for j in range(nB) if bits[i * nB + j]]
    return Realization.from_edges(nA, nB, edges)


@pytest.fixture
def rnd():
    return random.Random(20240601)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
