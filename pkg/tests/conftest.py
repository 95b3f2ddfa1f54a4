import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bmlab import curves


@pytest.fixture(scope="session")
def hyperboloid_seq():
    return curves.build_dyadic_slope_sequence(curves.hyperboloid(), 12)


@pytest.fixture(scope="session")
def power1_seq():
    return curves.build_dyadic_slope_sequence(curves.power_law(1.0), 12)


@pytest.fixture(scope="session")
def exp_norm_seq():
    renorm = curves.renormalize(curves.exponential(), "unit_slope_origin")
    return curves.build_dyadic_slope_sequence(renorm, 24)


@pytest.fixture
def rng():
    return np.random.default_rng(20240)
