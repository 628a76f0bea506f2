import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from chaintrick.model_core import DANA_MALGRANGE, MacroParams


@pytest.fixture
def inv_dm():
    return DANA_MALGRANGE


@pytest.fixture
def baseline():
    """Parameter set of the numerical tables: alpha=1, T=1, g=0.016, m=1."""
    return MacroParams(
        alpha=1.0, gamma=0.15, delta=0.007, g=0.016, G0=2.0, T=1.0, m=1
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
