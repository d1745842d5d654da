import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest


@pytest.fixture(scope="session")
def full_sweep():
    """Default grid with 400-start basins in every cell (several minutes)."""
    from hawkdove.experiments import run_sweep
    return run_sweep(basins=True, n=400, seed=0)
