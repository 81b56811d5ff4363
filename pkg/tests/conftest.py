import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bjorth import ModuleSpace

settings.register_profile(
    "bjorth", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("bjorth")


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


@pytest.fixture
def c2():
    return ModuleSpace.of([1, 1])


@pytest.fixture
def m2():
    return ModuleSpace.of([2])


def ginibre(rng, m, n):
    return (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2)


def random_element(rng, space):
    return space.element([ginibre(rng, m, n) for m, n in space.shapes])
