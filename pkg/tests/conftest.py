import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("qsfddvv", max_examples=60, deadline=None)
settings.load_profile("qsfddvv")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
