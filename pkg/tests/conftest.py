import numpy as np
import pytest

from pmono import instances


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def singleton():
    return instances.named("singleton")


@pytest.fixture
def rotation_samples():
    return instances.rotation_samples()


@pytest.fixture
def rotation():
    return instances.named("rotation")
