import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # oracle_utils importable

from unembed import example

DATA_DIR = Path(__file__).parent.parent / "src" / "unembed" / "data"


@pytest.fixture
def unrestricted():
    return example("unrestricted")


@pytest.fixture
def centered():
    return example("centered")


@pytest.fixture
def centered_unit():
    return example("centered_unit")


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
