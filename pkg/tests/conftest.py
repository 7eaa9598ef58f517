import sys

import pytest

from femtohandover import sim
from femtohandover.config import SimConfig

SMALL = SimConfig(offered_calls=2000, threshold_time_s=10.0, seed=11)


@pytest.fixture(scope="session")
def small_log():
    return sim.run(SMALL)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
