import os
from fractions import Fraction

import numpy as np
import pytest

from core.models import BaseConfig, QuadratureConfig, SolverConfig


@pytest.fixture
def base():
    return BaseConfig(Fraction(1), Fraction(1), Fraction(1, 2))


@pytest.fixture
def quad():
    return QuadratureConfig()


@pytest.fixture
def solver():
    return SolverConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(int(os.getenv("LSHAPE_SEED", "0")))
