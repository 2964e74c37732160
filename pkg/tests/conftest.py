import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from condtest.families import builtin_family


@pytest.fixture(scope="session")
def poisson():
    return builtin_family("poisson")


@pytest.fixture(scope="session")
def geometric():
    return builtin_family("geometric")
