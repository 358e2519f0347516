import numpy as np
import pytest

from biphoton import SystemParams, TimeGridConfig


@pytest.fixture
def default_params():
    return SystemParams()


@pytest.fixture
def detuned_params():
    # strongly detuned case with a well separated narrow mode
    return SystemParams(delta_c=28.3, omega_c=14.8)


@pytest.fixture
def default_grid():
    return TimeGridConfig(tau_max=400.0, n_points=2000)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
