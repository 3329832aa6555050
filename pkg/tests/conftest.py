import pytest

from armfatigue.anthropometry import Subject, derive_segments
from armfatigue.scenario import load_scenario, run


@pytest.fixture(scope="session")
def case_study():
    return load_scenario("paper_case_study")


@pytest.fixture(scope="session")
def case_result(case_study):
    return run(case_study)


@pytest.fixture(scope="session")
def segments():
    return derive_segments(Subject(1.88, 90.0, "male"))


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion."""

    class Recorder:
        def __init__(self):
            self.details = []

        def note(self, text):
            self.details.append(text)

    rec = Recorder()
    yield rec
    failed = getattr(request.node, "rep_call", None) is None or request.node.rep_call.failed
    name = request.node.get_closest_marker("criterion").args[0]
    status = "FAIL" if failed else "PASS"
    ACCEPTANCE_LINES.append(f"[{status}] {name}" + (f"  ({'; '.join(rec.details)})" if rec.details else ""))


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion label")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
