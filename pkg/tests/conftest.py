import pytest


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Collector for the per-criterion PASS/FAIL lines shown after the run."""
    config = request.config
    if not hasattr(config, "acceptance_lines"):
        config.acceptance_lines = []
    return config.acceptance_lines.append
