import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from steadycast.core import ForecastMatrix
from steadycast.synth import synthetic_dataset

DATA_DIR = Path(__file__).parent / "data"


def random_matrix(rng, n_origins=None, horizon=None, anchored=True):
    O = n_origins or int(rng.integers(1, 7))
    h = horizon or int(rng.integers(1, 9))
    rows = rng.normal(0, 10, size=(O, h))
    t0 = int(rng.integers(max(2, h), 30)) if anchored else None
    return ForecastMatrix(series_id="r", first_origin_time=t0, horizon=h, rows=rows)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20250810)


@pytest.fixture(scope="session")
def small_dataset():
    return synthetic_dataset(n_series=3, length=48, seasonal_period=4, seed=11)


@pytest.fixture(scope="session")
def fixture_dataset():
    return synthetic_dataset(n_series=10, length=60, seasonal_period=12, seed=7)
