import time
from contextlib import contextmanager

ACCEPTANCE_LINES: list[str] = []


@contextmanager
def criterion(number: int, title: str, limit: float):
    """Time one acceptance criterion and record a PASS/FAIL line for the summary."""
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        _record(number, title, False, elapsed, limit, type(exc).__name__)
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < limit
    _record(number, title, ok, elapsed, limit, "" if ok else "over time limit")
    assert ok, f"criterion {number} took {elapsed:.2f}s, limit {limit}s"


def _record(number, title, ok, elapsed, limit, note):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  ({elapsed:.2f}s / {limit}s)"
    if note:
        line += f"  [{note}]"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
