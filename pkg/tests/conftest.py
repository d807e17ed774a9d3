import math

import numpy as np
import pytest

from anyon_interferometry.models import BUILTIN_NAMES, builtin_model

PHI = (1 + math.sqrt(5)) / 2
SEED = 20240611


@pytest.fixture(params=BUILTIN_NAMES)
def model(request):
    return builtin_model(request.param)


@pytest.fixture
def ising():
    return builtin_model("ising")


@pytest.fixture
def fibonacci():
    return builtin_model("fibonacci")


@pytest.fixture
def semion():
    return builtin_model("semion")


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
