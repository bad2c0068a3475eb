import sys

import numpy as np
import pytest

from correq.game import NormalFormGame, g_star


@pytest.fixture
def gstar():
    return g_star()


def random_game(rng, counts, low=0.0, high=1.0):
    size = int(np.prod(counts))
    return NormalFormGame(tuple(counts), rng.uniform(low, high, (len(counts), size)))


def constant_game(counts, values):
    size = int(np.prod(counts))
    return NormalFormGame(tuple(counts), np.repeat(np.asarray(values, float)[:, None], size, axis=1))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)
