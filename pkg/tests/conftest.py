import numpy as np
import pytest

from gsparse import CLDiscreteRegularizer, L1Regularizer


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def l1_unit():
    return L1Regularizer(1.0, n=3)


@pytest.fixture
def cl_two_atoms():
    return CLDiscreteRegularizer(1.0, [1.0, 3.0], [0.5, 0.5], n=3)


def random_spd(rng, n):
    G = rng.standard_normal((n, n))
    return G @ G.T + n * np.eye(n)
