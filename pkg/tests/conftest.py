import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from anyent.model import builtin_model
from anyent.ops import BasisDescriptor, SystemGeometry

settings.register_profile(
    "default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

MODELS = ("ising", "fibonacci", "z_2", "z_3")


@pytest.fixture(scope="session")
def ising():
    return builtin_model("ising")


@pytest.fixture(scope="session")
def fib():
    return builtin_model("fibonacci")


@pytest.fixture(scope="session")
def six_sigma(ising):
    return SystemGeometry.build(ising, [(str(k), "sigma") for k in range(1, 7)])


@pytest.fixture(scope="session")
def basis_over():
    return BasisDescriptor(("1", "2", "4", "3", "5", "6"), ((3, 1),))


@pytest.fixture(scope="session")
def basis_under():
    return BasisDescriptor(("1", "2", "4", "3", "5", "6"), ((3, -1),))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
