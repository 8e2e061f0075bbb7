import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("factalg", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("factalg")


@pytest.fixture(scope="session")
def paper_config():
    from factalg.config import paper_examples
    return paper_examples()


@pytest.fixture(scope="session")
def paper_report(paper_config):
    """The full shipped-examples run, computed once per session."""
    from factalg.cli import run_suite
    return run_suite(paper_config)


@pytest.fixture(scope="session")
def paper_results(paper_report):
    return {r.id: r for r in paper_report.results}


CRITERIA_LINES: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    n = item.get_closest_marker("criterion")
    if n is not None and (rep.when == "call" or (rep.when == "setup" and rep.failed)):
        CRITERIA_LINES[n.args[0]] = f"criterion {n.args[0]:2d}: {'PASS' if rep.passed else 'FAIL'}  {n.args[1]}"


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA_LINES):
            terminalreporter.write_line(CRITERIA_LINES[n])
