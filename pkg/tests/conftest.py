import numpy as np
import pytest

from bklab import task

_CRITERIA: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion this test decides")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        detail = dict(item.user_properties).get("detail", "")
        _CRITERIA[str(mark.args[0])] = ("PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")

    def order(label):
        head, _, tail = label.partition(" ")
        return (int(head), tail)

    for label in sorted(_CRITERIA, key=order):
        status, detail = _CRITERIA[label]
        terminalreporter.write_line(f"CRITERION {label}: {status}  {detail}".rstrip())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="module")
def small_state():
    # small keys keep unit tests quick; the encoding logic does not care
    return task.gen(128, 256, 8, np.random.default_rng(2024))
