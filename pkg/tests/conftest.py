import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hardcore.treegibbs import ModelParams, solve_fixed_points


@pytest.fixture(scope="session")
def fp61():
    """Fixed points at d=6, fugacity 1 (the certified case)."""
    return solve_fixed_points(ModelParams(6, 1.0), tol=1e-14)


@pytest.fixture(scope="session")
def fp38():
    """Fixed points at d=3, fugacity 8 (well above criticality, used by the
    reduction experiments)."""
    return solve_fixed_points(ModelParams(3, 8.0), tol=1e-14)


@pytest.fixture(scope="session")
def params61():
    return ModelParams(6, 1.0)
