import sys

import pytest

from vanetcert.protocol import ProtocolConfig
from vanetcert.world import World


@pytest.fixture
def world():
    """Road with vehicles 1..10 enrolled; pseudonyms cover the first hour."""
    w = World(config=ProtocolConfig(), horizon=3600)
    for vid in range(1, 11):
        w.add_vehicle(vid)
    return w



def pytest_terminal_summary(terminalreporter):
    module = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
