import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from risbeam.em_cell import CellGeometry, VaractorParams, build_lut  # noqa: E402

# Filled by test_acceptance; printed at the end of the session.
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def table_lut():
    return build_lut(VaractorParams(), CellGeometry())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
