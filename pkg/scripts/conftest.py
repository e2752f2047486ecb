import random

import pytest

from phinabla.logger import Log

Log.enabled = False


@pytest.fixture
def rng():
    return random.Random(20240611)
