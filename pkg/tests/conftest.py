import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import corpus  # noqa: E402
from popmatch import fixtures  # noqa: E402


@pytest.fixture(scope="session")
def small_corpus():
    return corpus(60)


@pytest.fixture
def F1():
    return fixtures.f1()


@pytest.fixture
def F2():
    return fixtures.f2()


@pytest.fixture
def F3():
    return fixtures.f3()


@pytest.fixture
def F4():
    return fixtures.f4()


_CRITERIA = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_CRITERIA] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and rep.passed:
        return
    n, label = mark.args
    detail = dict(item.user_properties).get("detail", "")
    item.config.stash[_CRITERIA][n] = (label, rep.passed, detail)


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash[_CRITERIA]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        label, passed, detail = results[n]
        line = f"criterion {n}: {'PASS' if passed else 'FAIL'}  {label}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
