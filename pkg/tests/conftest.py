import pytest

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance(request):
    """Record one acceptance line and fail the test if the check failed."""
    lines = request.config.stash[_ACCEPTANCE]

    def record(criterion: str, ok: bool, detail: str):
        lines.append(f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}")
        assert ok, f"{criterion}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
