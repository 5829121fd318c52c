import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from catalog import FIXTURES  # noqa: E402


@pytest.fixture(params=sorted(FIXTURES))
def any_fixture(request):
    return request.param, FIXTURES[request.param]()


ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record one acceptance line; returns ``report(n, ok, detail)``."""

    def report(n, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
        ACCEPTANCE[n] = line
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
