import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fractoback.mlf import FractionalOrders  # noqa: E402


@pytest.fixture
def two_term():
    return FractionalOrders((0.8, 0.4), (1.0, 1.0))


@pytest.fixture
def three_term():
    return FractionalOrders((0.7, 0.5, 0.1), (1.0, 2.0, 0.5))
