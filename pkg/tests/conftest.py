import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rackcodes import CodeParams, MbrrCode, MsrrCode, prime_field  # noqa: E402

# small worked instances: a 6x5 grid and a 4x4 grid
GRID_6x5 = CodeParams(30, 5, 24, 3, 2)
GRID_4x4 = CodeParams(16, 4, 13, 2, 2)


@pytest.fixture(scope="session")
def gf29():
    return prime_field(29)


@pytest.fixture(scope="session")
def msrr_4x4(gf29):
    return MsrrCode(GRID_4x4, gf29)


@pytest.fixture(scope="session")
def mbrr_4x4(gf29):
    return MbrrCode(GRID_4x4, gf29)


@pytest.fixture(scope="session")
def msrr_6x5():
    return MsrrCode(GRID_6x5)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
