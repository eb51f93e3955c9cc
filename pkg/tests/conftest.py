import os
from pathlib import Path

import numpy as np
import pytest

from rankagg import Dataset

_OUTCOMES: dict[str, list[str]] = {}
_ORDER: list[str] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion this test belongs to")


def pytest_collection_finish(session):
    for item in session.items:
        mark = item.get_closest_marker("criterion")
        if mark:
            item.user_properties.append(("criterion", mark.args[0]))
            if mark.args[0] not in _ORDER:
                _ORDER.append(mark.args[0])


def pytest_runtest_logreport(report):
    name = dict(report.user_properties).get("criterion")
    if name is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _OUTCOMES.setdefault(name, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _ORDER:
        return
    terminalreporter.section("acceptance criteria")
    for name in _ORDER:
        outcomes = _OUTCOMES.get(name, [])
        ok = bool(outcomes) and all(o == "passed" for o in outcomes)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def sushi_path():
    """Location of the public sushi-10 SOC file, if one has been provided."""
    env = os.environ.get("RANKAGG_SUSHI")
    if env:
        return Path(env)
    return Path(__file__).parent / "data" / "sushi10.soc"


def tiny(rankings, labels=None):
    return Dataset.from_rankings(rankings, labels)
