import numpy as np
import pytest

from modlab.config import SAMPLING_SEED
from modlab.grids import Grid, PixelMask


@pytest.fixture
def rng():
    return np.random.default_rng(SAMPLING_SEED)


@pytest.fixture
def unit_grid_17():
    return Grid((0.0, 0.0), 1.0, 17)


def random_mask(grid: Grid, rng, density: float = 0.1) -> PixelMask:
    occ = rng.random((grid.n, grid.n)) < density
    if not occ.any():
        occ[grid.n // 2, grid.n // 2] = True
    return PixelMask(grid, occ)
