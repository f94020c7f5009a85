import random

import pytest

from navstruct.fixtures import plus_hub, straight_corridor


@pytest.fixture(scope="session")
def corridor():
    """12-square straight corridor with side walls and 2 open ends."""
    return straight_corridor(12)


@pytest.fixture(scope="session")
def hub():
    """Plus-shaped hub with 4 open arm ends."""
    return plus_hub(2)


@pytest.fixture()
def rng():
    return random.Random(20260823)
