from __future__ import annotations

import numpy as np
import pytest

from csflock.topology import CyclicSchedule, Digraph, SwitchingSignal

# filled by tests/test_acceptance.py, echoed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def three_leader_graphs() -> dict:
    return {
        1: Digraph(3, frozenset({(1, 2), (1, 3)})),
        2: Digraph(3, frozenset({(2, 1), (2, 3)})),
        3: Digraph(3, frozenset({(3, 1), (3, 2)})),
    }


@pytest.fixture
def leader_graphs():
    return three_leader_graphs()


@pytest.fixture
def rotating_signal():
    return SwitchingSignal(three_leader_graphs(), CyclicSchedule((1, 2, 3), 1))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
