import random

import pytest
from gmpy2 import mpq

from awbispec.awcore import QParams
from awbispec.qseries import QBase


@pytest.fixture
def base():
    return QBase(mpq(1, 2))  # q = 1/4


@pytest.fixture
def base_real():
    return QBase(mpq(1, 2), real_mode=True)


@pytest.fixture
def params1(base_real):
    return QParams(1, base_real, (mpq(2), mpq(1, 2), mpq(1, 4), mpq(1)))


@pytest.fixture
def params2(base_real):
    return QParams(2, base_real, (mpq(2), mpq(1, 2), mpq(1, 4), mpq(1, 8), mpq(1)))


@pytest.fixture
def params3(base_real):
    return QParams(
        3, base_real, (mpq(2), mpq(1, 2), mpq(1, 4), mpq(1, 8), mpq(1, 16), mpq(1))
    )


@pytest.fixture
def rng():
    return random.Random(20240901)


def rand_rational(rng, bound=200, positive=False):
    num = rng.randint(1, bound)
    den = rng.randint(1, bound)
    if not positive and rng.random() < 0.5:
        num = -num
    return mpq(num, den)
