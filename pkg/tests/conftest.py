import pytest


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    if config.acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in config.acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def verdict(request):
    """Print one PASS/FAIL line for a criterion, then assert it."""

    def emit(name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
        print(line)
        request.config.acceptance_lines.append(line)
        assert ok, line

    return emit
