import sys

import numpy as np
import pytest

from mirrorpo.mdp import make_random_mdp, make_short_corridor
from mirrorpo.oracle import TrajectoryTree

FIXTURE_SEEDS = (0, 1, 2)
CAP = 20


def small_mdp(seed, gamma=0.95):
    # one nonterminal successor per (s, a) keeps enumeration within the guard
    return make_random_mdp(2, 2, seed=seed, gamma=gamma, successors=1)


@pytest.fixture(scope="session")
def corridor():
    return make_short_corridor()


@pytest.fixture(scope="session")
def fixtures():
    return [small_mdp(s) for s in FIXTURE_SEEDS]


@pytest.fixture(scope="session")
def trees(fixtures):
    return [TrajectoryTree(m, CAP) for m in fixtures]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "REPORT_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
