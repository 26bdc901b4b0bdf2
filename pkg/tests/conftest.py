from __future__ import annotations

import numpy as np
import pytest

from rotform.geometry import SymmetricForm
from rotform.rotation_group import make_oracle
from rotform.verification import random_spd

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def spd(seed: int, cond: float = 1e3) -> SymmetricForm:
    return random_spd(np.random.default_rng([2024, seed]), cond)


FORMS = {
    "euclidean": SymmetricForm.identity(),
    "diag149": SymmetricForm.diagonal(1, 4, 9),
    "random": spd(0),
}


@pytest.fixture(params=sorted(FORMS))
def form(request) -> SymmetricForm:
    return FORMS[request.param]


@pytest.fixture
def oracle(form):
    return make_oracle(form)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
