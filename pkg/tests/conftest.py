import pytest
from hypothesis import HealthCheck, settings

from okounkov import load_problem

settings.register_profile("repo", derandomize=True, max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def problems():
    return {name: load_problem(name) for name in ("cusp", "veronese", "segre", "even", "cusp_missing")}


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
