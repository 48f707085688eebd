import numpy as np
import pytest

import hcf


@pytest.fixture(scope="session")
def grid():
    return hcf.F0Grid()


@pytest.fixture(scope="session")
def bank(grid):
    return hcf.build_bank(grid)


@pytest.fixture(scope="session")
def frame_cfg():
    return hcf.FrameConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
