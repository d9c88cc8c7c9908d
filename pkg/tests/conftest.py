import sys
from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"

# 4x4 worked example: A of index 2 and the printed core part L_B of its perturbation
WORKED_A = [[1, 2, F(1, 10), F(1, 10)], [2, 1, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0]]
WORKED_LB = [
    [1, 2, F(1, 10), F(1, 10)],
    [2, 1, F(1, 5), F(1, 5)],
    [F(1, 5), F(2, 5), F(1, 50), F(1, 50)],
    [F(1, 10), F(1, 5), F(1, 100), F(1, 100)],
]
WORKED_B1 = [[1, 2], [2, 1]]
WORKED_P = [[F(1, 10), F(1, 10)], [0, 0]]
WORKED_Q = [[F(1, 5), 0], [F(1, 10), 0]]

# printed result tables
WORKED_ACEP = [[F(-1, 3), F(2, 3), 0, 0], [F(2, 3), F(-1, 3), 0, 0], [0] * 4, [0] * 4]
WORKED_API = [[0] * 4, [0] * 4, [0, 0, 1, 0], [0, 0, 0, 1]]
WORKED_BCEP = [
    [F(-409, 1327), F(200, 309), F(-400, 6489), F(-200, 6489)],
    [F(40, 63), F(-1, 3), F(8, 63), F(4, 63)],
    [F(-400, 6489), F(40, 309), F(-80, 6489), F(-40, 6489)],
    [F(-200, 6489), F(20, 309), F(-40, 6489), F(-20, 6489)],
]
WORKED_BPI = [
    [F(1, 21), 0, F(-4, 21), F(-2, 21)],
    [0, 0, 0, 0],
    [F(-4, 21), 0, F(101, 105), F(-2, 105)],
    [F(-2, 21), 0, F(-2, 105), F(104, 105)],
]
WORKED_EB = [
    [0, 0, 0, 0],
    [0, 0, F(1, 5), F(1, 5)],
    [F(1, 5), F(2, 5), F(1, 50), F(-49, 50)],
    [F(1, 10), F(1, 5), F(1, 100), F(1, 100)],
]
WORKED_FB = [
    [0, 0, F(1, 10), F(1, 10)],
    [0, 0, F(1, 5), F(1, 5)],
    [F(1, 10), F(2, 5), F(1, 50), F(1, 50)],
    [0, F(1, 5), F(-99, 100), F(1, 100)],
]


def arr(rows):
    return np.array([[float(x) for x in r] for r in rows], dtype=complex)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def worked_a():
    return arr(WORKED_A)


@pytest.fixture
def worked_lb():
    return arr(WORKED_LB)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
