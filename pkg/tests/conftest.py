import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from test_acceptance import VERDICTS  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(VERDICTS):
        terminalreporter.write_line(VERDICTS[k])
