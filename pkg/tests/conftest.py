import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from shortdlog.group import make_safe_prime_instance


@pytest.fixture(scope="session")
def small_instance():
    # m = 10, l = 10: 22-bit safe prime, exhaustive checks stay cheap
    return make_safe_prime_instance(24, 10, 0, seed=11)


ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []


@pytest.fixture
def report(pytestconfig):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    start = time.perf_counter()

    def _report(number, title, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail} ({time.perf_counter() - start:.1f}s)"
        pytestconfig.stash[ACCEPTANCE_LINES].append((number, line))
        print(line)
        assert ok, detail

    return _report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
