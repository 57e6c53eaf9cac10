import random

import pytest
from gmpy2 import mpq

from hitchin_coords import fixtures
from hitchin_coords.scalars import Matrix, det


@pytest.fixture(scope="session", params=fixtures.NAMES)
def fixture_name(request):
    return request.param


@pytest.fixture(scope="session")
def pants():
    return fixtures.load("pants")


@pytest.fixture(scope="session")
def single_leaf():
    return fixtures.load("single_leaf")


def q(x):
    return mpq(x)


def mat(rows):
    return Matrix([[mpq(x) for x in r] for r in rows])


def random_invertible(rng, n, lo=-5, hi=5):
    while True:
        m = Matrix([[mpq(rng.randint(lo, hi)) for _ in range(n)] for _ in range(n)])
        if det(m) != 0:
            return m


@pytest.fixture
def rng():
    return random.Random(20240611)
