from pathlib import Path

import pytest

from cssmaxsat.codes import load_code

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def steane():
    return load_code(DATA / "steane.txt")


@pytest.fixture(scope="session")
def data_dir():
    return DATA


ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """``criterion(num, ok, detail)`` prints and records one PASS/FAIL line, then asserts."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, {})

    def report(num, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {num:>2}: {detail}"
        print(line)
        lines[request.node.nodeid] = line
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, {})
    failed = [r.nodeid for r in terminalreporter.stats.get("failed", []) if "test_acceptance" in r.nodeid]
    for nodeid in failed:
        lines.setdefault(nodeid, f"FAIL {nodeid.split('::')[-1]}: raised before reporting")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines.values(), key=lambda l: l.split(":")[0].split()[-1].zfill(3)):
            terminalreporter.write_line(line)
