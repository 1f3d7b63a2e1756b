import numpy as np
import pytest

from wellexit import landscape as ls


@pytest.fixture(scope="session")
def quad_landscape():
    return ls.make_builtin_landscape("quadratic-disc-caps", {"a": 0.1})


@pytest.fixture(scope="session")
def quad_inventory(quad_landscape):
    return ls.build_inventory(quad_landscape)


@pytest.fixture(scope="session")
def corniche_landscape():
    return ls.make_builtin_landscape("corniche")


@pytest.fixture(scope="session")
def corniche_inventory(corniche_landscape):
    return ls.build_inventory(corniche_landscape)


@pytest.fixture(scope="session")
def interval_landscape():
    # f(x) = x^2 on [-1, 2]
    return ls.make_builtin_landscape(
        "interval-1d", {"coeffs": (0.0, 0.0, 1.0), "z1": -1.0, "z2": 2.0})


@pytest.fixture(scope="session")
def interval_inventory(interval_landscape):
    return ls.build_inventory(interval_landscape)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240807)
