import pytest

from thetalab.enumeration import CACHE_ENV

# One line per acceptance criterion, echoed at the end of the run.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(autouse=True)
def _no_ambient_cache(request, monkeypatch):
    """Unit tests run without a disk cache; a module opts in to managing its
    own cache directory by setting USE_DISK_CACHE = True."""
    if getattr(request.module, "USE_DISK_CACHE", False):
        yield
        return
    monkeypatch.delenv(CACHE_ENV, raising=False)
    yield


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
