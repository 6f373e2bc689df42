from pathlib import Path

import pytest

from promo_gym.frozen_lake import make_frozen_lake
from promo_gym.promoenv import build_promo_mdp, reference_grid_spec

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def reference_table():
    """The bundled demo promo MDP (5 rows x 10 columns, goal at (2, 4))."""
    return build_promo_mdp(reference_grid_spec())


@pytest.fixture(scope="session")
def lake_table():
    return make_frozen_lake(slippery=False)


@pytest.fixture(scope="session")
def lake_table_slippery():
    return make_frozen_lake(slippery=True)
