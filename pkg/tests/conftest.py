import os
import sys
import warnings

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from totcurv import AmbientSpace  # noqa: E402
from totcurv.errors import AccuracyWarning  # noqa: E402


@pytest.fixture
def E2():
    return AmbientSpace.euclidean(2)


@pytest.fixture
def E3():
    return AmbientSpace.euclidean(3)


@pytest.fixture
def H2():
    return AmbientSpace.hyperbolic(2, 1.0)


@pytest.fixture
def H3():
    return AmbientSpace.hyperbolic(3, 1.0)


@pytest.fixture(autouse=True)
def _quiet_accuracy():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        yield


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


ALL_SPACES = [AmbientSpace.euclidean(2), AmbientSpace.euclidean(3),
              AmbientSpace.hyperbolic(2, 1.0), AmbientSpace.hyperbolic(3, 1.0)]


def pytest_terminal_summary(terminalreporter):
    # acceptance verdict lines recorded via record_property("verdict", ...)
    lines = [value for rep in terminalreporter.stats.get("passed", []) +
             terminalreporter.stats.get("failed", [])
             if rep.when == "call"
             for key, value in rep.user_properties if key == "verdict"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s.split("criterion")[1]):
            terminalreporter.write_line(line)
