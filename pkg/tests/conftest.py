import pytest

from leofso.config import load_config
from leofso.experiments import calibrate_threshold


@pytest.fixture(scope="session")
def cfg():
    return load_config()


@pytest.fixture(scope="session")
def calibration(cfg):
    return calibrate_threshold(cfg)


ACCEPTANCE_LINES = {}


@pytest.fixture
def report(request):
    """Record one summary line for an acceptance criterion."""

    def _report(criterion: int, passed: bool, detail: str):
        line = f"criterion {criterion:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[criterion] = line
        print(line)
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
