import pytest

# one summary line per acceptance criterion, filled in by test_acceptance
CRITERIA: dict = {}


@pytest.fixture
def record():
    def _record(key, passed, detail):
        CRITERIA[key] = (passed, detail)
        print(f"criterion {key}: {'PASS' if passed else 'FAIL'} {detail}")
    return _record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA):
        passed, detail = CRITERIA[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'}  {detail}")
