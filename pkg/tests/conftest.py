import pytest

_CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """``criterion(n, title, checks, detail)`` records one acceptance line, then asserts it."""

    def record(n, title, checks, detail=""):
        failed = [name for name, ok in checks.items() if not ok]
        ok = not failed
        line = f"{title}" + (f" [{detail}]" if detail else "")
        if failed:
            line += " failed: " + ", ".join(failed)
        _CRITERIA[n] = (ok, line)
        print(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {line}")
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, line = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {line}")
