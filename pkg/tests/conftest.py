import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Store one summary line per acceptance criterion."""
    def _record(number: int, ok: bool, detail: str):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {detail}")
        print(ACCEPTANCE_LINES[-1])
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
