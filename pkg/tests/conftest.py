import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from normality_lab.automata import Dfa, rotator_dfa, toggle_dfa  # noqa: E402


@pytest.fixture
def toggle():
    return toggle_dfa()


@pytest.fixture
def rotator():
    return rotator_dfa(3)


bits = st.text(alphabet="01", max_size=64)


@st.composite
def dfas(draw, max_states=4):
    n = draw(st.integers(1, max_states))
    delta = tuple(tuple(draw(st.integers(0, n - 1)) for _ in range(2)) for _ in range(n))
    acc = draw(st.frozensets(st.integers(0, n - 1)))
    start = draw(st.integers(0, n - 1))
    return Dfa(n, delta, start, acc)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
