import os

import numpy as np
import pytest

from sextic.config import REPO_ROOT, Settings
from sextic.lattice import GramLattice, read_gram

FIXTURES = REPO_ROOT / "data" / "fixtures"


@pytest.fixture
def settings() -> Settings:
    return Settings(events_path=None)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(int(os.environ.get("SEXTIC_SEED", "20240601")))


@pytest.fixture
def gram_fixture():
    def load(name: str) -> GramLattice:
        return read_gram(FIXTURES / f"{name}.gram")

    return load
