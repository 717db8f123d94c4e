import math

import numpy as np
import pytest

from mmwsched.antenna import AlignmentParams
from mmwsched.config import SimConfig
from mmwsched.metrics import Radio


@pytest.fixture
def cfg():
    return SimConfig()


@pytest.fixture
def radio(cfg):
    return cfg.radio()


@pytest.fixture
def timing():
    return AlignmentParams(math.pi / 2, math.pi / 2, 1e-5, 1e-3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def make_radio(side_lobe=0.1, ratio=0.01, continuous=False, noise=None):
    base = SimConfig()
    return Radio(AlignmentParams.from_ratio(ratio), base.p_max, noise or base.noise, side_lobe, continuous)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)
