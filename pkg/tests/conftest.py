import time

import pytest

# criterion id -> (description, passed, detail); filled by the acceptance tests
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


class Criterion:
    def __init__(self, number, title, limit):
        self.number, self.title, self.limit = number, title, limit
        self.details: list[str] = []

    def note(self, text):
        self.details.append(text)

    def __enter__(self):
        self.t0 = time.perf_counter()
        ACCEPTANCE[self.number] = (self.title, False, "did not finish")
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        self.details.append(f"{elapsed:.2f}s/{self.limit}s")
        ok = exc_type is None and elapsed < self.limit
        if exc_type is not None:
            self.details.append(f"{exc_type.__name__}: {exc}".splitlines()[0][:120])
        ACCEPTANCE[self.number] = (self.title, ok, "; ".join(self.details))
        if exc_type is None and not ok:
            raise AssertionError(f"criterion {self.number} took {elapsed:.2f}s, limit {self.limit}s")
        return False


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title} ({detail})")
