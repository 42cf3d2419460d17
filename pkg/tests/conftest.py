import random

import pytest

from udp6 import Params


@pytest.fixture
def p41() -> Params:
    # parameter set satisfying both first-order reduction conditions
    return Params.make(100, (25, 46, 67, 23), (59, 65, 1, 42))


@pytest.fixture
def p42() -> Params:
    # parameter set satisfying the evolution constraint (177 = 177)
    return Params.make(100, (32, 33, 37, 22), (53, 65, 8, 4))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20130719)
