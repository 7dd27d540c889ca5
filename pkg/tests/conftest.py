'''
conftest.py: shared fixtures for the taudnn tests
'''

import numpy as np
import pytest

from taudnn.core import Dataset, NetworkSpec, Theta
from taudnn.ui import UI


def random_instance(kind, widths, seed, gamma = None, eta = 0.1, samples = 3,
                    weight_scale = 0.8, tau_range = (0.5, 1.5)):
    '''A network spec, random parameters and a random dataset.  eta = 0.1
    keeps finite differences away from the kinks of the activation.'''
    rng = np.random.default_rng(seed)
    spec = NetworkSpec(kind, widths, gamma, eta)
    weights = [rng.uniform(-weight_scale, weight_scale, spec.weight_shape(l))
               for l in range(spec.depth)]
    biases = [rng.uniform(-0.3, 0.3, widths[l + 1]) for l in range(spec.depth - 1)]
    taus = rng.uniform(tau_range[0], tau_range[1], spec.n_taus)
    data = Dataset(rng.uniform(-1, 1, (samples, widths[0])),
                   rng.uniform(-1, 1, (samples, widths[-1])))
    return spec, Theta(weights, biases, taus), data


def max_relative_error(actual, expected):
    '''max |actual - expected| / max |expected|.'''
    actual = np.asarray(actual, dtype = float)
    expected = np.asarray(expected, dtype = float)
    scale = np.max(np.abs(expected))
    diff = np.max(np.abs(actual - expected))
    return diff / scale if scale > 0 else diff


@pytest.fixture
def make_instance():
    return random_instance


@pytest.fixture
def rel_error():
    return max_relative_error


@pytest.fixture(autouse = True)
def fresh_ui():
    UI.reset()
    yield
    UI.reset()
