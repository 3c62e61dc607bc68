import math

import pytest

from shrinkerlab.analytic import make_analytic
from shrinkerlab.generate import gen_mesh

SQRT2 = math.sqrt(2.0)


@pytest.fixture(scope="session")
def ico3():
    return gen_mesh("icosphere", resolution=3, radius=2.0)


@pytest.fixture(scope="session")
def ico4():
    return gen_mesh("icosphere", resolution=4, radius=2.0)


@pytest.fixture(scope="session")
def tube32():
    return gen_mesh("tube", resolution=32)


@pytest.fixture(scope="session")
def disk():
    return gen_mesh("disk")


@pytest.fixture(scope="session")
def grim():
    return gen_mesh("grim_reaper")


@pytest.fixture(scope="session")
def tube_exact():
    return make_analytic("cylinder", n=2, k=1, half_length=8.0)


@pytest.fixture(scope="session")
def sphere_exact():
    return make_analytic("sphere", n=2)
