import time

import pytest

from tmfdual.presentation import AlgebraPresentation
from tmfdual.sseq import SSWindow, load_differentials, run_pages

# filled in by test_acceptance, printed at the end of the session
ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def pres():
    return AlgebraPresentation.default()


@pytest.fixture(scope="session")
def specs(pres):
    return load_differentials(pres)


@pytest.fixture(scope="session")
def small_window():
    return SSWindow(stems=(-4, 70), smax=14, M=4)


@pytest.fixture(scope="session")
def small_pages(pres, specs, small_window):
    return run_pages(pres, specs, small_window)


@pytest.fixture(scope="session")
def full_run(pres, specs):
    """N = 4, M = 16, stems -8..208, s <= 28, single-threaded."""
    t0 = time.perf_counter()
    pages = run_pages(pres, specs, SSWindow(), jobs=1)
    return pages, time.perf_counter() - t0


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {status}  {detail}")
