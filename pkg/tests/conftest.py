import pytest

AC_LINES = {}


@pytest.fixture
def report_ac():
    """Record one acceptance line; printed in the terminal summary."""
    def record(key, ok, text):
        line = f"{key}: {'PASS' if ok else 'FAIL'} {text}"
        AC_LINES[key] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not AC_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(AC_LINES, key=lambda k: int(k[2:])):
        terminalreporter.write_line(AC_LINES[key])
