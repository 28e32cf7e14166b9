import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line)


import numpy as np
import pytest

from subfreq import Dataset

WORKED_ROWS = [[1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, 1, 0]]


@pytest.fixture
def worked():
    return Dataset(np.array(WORKED_ROWS), 2)


@pytest.fixture
def worked_file(tmp_path):
    path = tmp_path / "worked.txt"
    path.write_text("5 3 2\n" + "".join(" ".join(map(str, r)) + "\n" for r in WORKED_ROWS))
    return path
