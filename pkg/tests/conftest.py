import math

import pytest

from crossext.catalog import get_function
from crossext.cross import CrossSpec
from crossext.geometry import arc_set_normalize

HALF = math.pi / 2


@pytest.fixture(scope="session")
def fix_a():
    return arc_set_normalize([[-HALF, HALF]])


@pytest.fixture(scope="session")
def full_circle():
    return arc_set_normalize([[-math.pi, math.pi]])


@pytest.fixture(scope="session")
def fix_2d(fix_a):
    return CrossSpec(fix_a, fix_a, get_function("rational2d"), "FIX-2D")


ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []


@pytest.fixture
def acceptance_log(request):
    return request.config.stash[ACCEPTANCE_LINES]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
