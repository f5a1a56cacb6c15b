import math

import numpy as np
import pytest

from conftest import random_mask
from modlab.errors import DomainError, ParameterError
from modlab.grids import Grid, PixelMask, ScalarField
from modlab.weights import (UNDERFLOW_CLAMP, WeightKind, WeightSpec,
                            distance_transform, eval_weight,
                            log_weight_values, weight_bound_check)


def brute_distance(mask):
    """O(nodes * occupied) exact nearest-occupied-node distance."""
    g = mask.grid
    X, Y = g.node_xy()
    px = X[mask.occupied]
    py = Y[mask.occupied]
    d = np.full((g.n, g.n), np.inf)
    for i in range(g.n):
        for j in range(g.n):
            d[i, j] = np.min(np.hypot(px - X[i, j], py - Y[i, j]))
    return d


def test_distance_transform_matches_brute_force(rng):
    g = Grid((0.0, 0.0), 1.0, 17)
    mask = random_mask(g, rng, density=0.15)
    delta = distance_transform(mask)
    assert np.allclose(delta.values, brute_distance(mask), atol=1e-12)
    assert np.all(delta.values[mask.occupied] == 0.0)


def test_distance_transform_empty_mask():
    g = Grid((0.0, 0.0), 1.0, 5)
    with pytest.raises(DomainError):
        distance_transform(PixelMask(g, np.zeros((5, 5), dtype=bool)))


def _field(g, vals):
    return ScalarField(g, np.asarray(vals, dtype=float))


def test_self_power_values():
    g = Grid((0.0, 0.0), 1.0, 3)
    d = _field(g, [[0.0, 0.25, 0.5], [1.0, 2.0, 0.9], [1e-4, 0.1, 0.75]])
    w = eval_weight(d, WeightSpec(WeightKind.SELF_POWER)).values
    assert w[0, 0] == 0.0
    assert w[0, 1] == pytest.approx(0.25 ** 4.0)      # t**(1/t) at t=1/4
    assert w[0, 2] == pytest.approx(0.25)             # 0.5**2
    assert w[1, 0] == 1.0 and w[1, 1] == 1.0
    assert w[1, 2] == pytest.approx(0.9 ** (1.0 / 0.9))
    # t**(1/t) at t=1e-4 is far below the clamp: exact zero, no denormal noise
    assert math.log(1e-4) / 1e-4 < math.log(UNDERFLOW_CLAMP)
    assert w[2, 0] == 0.0
    assert w[2, 1] == pytest.approx(0.1 ** 10.0)


def test_power_and_indicator():
    g = Grid((0.0, 0.0), 1.0, 3)
    d = _field(g, [[0.0, 0.5, 2.0]] * 3)
    w2 = eval_weight(d, WeightSpec(WeightKind.POWER, p=2.0)).values
    assert w2[0, 0] == 0.0 and w2[0, 1] == 0.25 and w2[0, 2] == 1.0
    wi = eval_weight(d, WeightSpec(WeightKind.INDICATOR)).values
    assert wi[0, 0] == 0.0 and wi[0, 1] == 1.0 and wi[0, 2] == 1.0
    with pytest.raises(ParameterError):
        WeightSpec(WeightKind.POWER)
    with pytest.raises(ParameterError):
        WeightSpec(WeightKind.POWER, p=-1.0)


def test_negative_distance_rejected():
    g = Grid((0.0, 0.0), 1.0, 3)
    d = ScalarField(g, np.full((3, 3), -0.1))
    with pytest.raises(ParameterError):
        eval_weight(d, WeightSpec(WeightKind.SELF_POWER))
    with pytest.raises(ParameterError):
        log_weight_values(d, WeightSpec(WeightKind.SELF_POWER))


def test_log_weight_consistent_with_weight(rng):
    g = Grid((0.0, 0.0), 1.0, 17)
    mask = random_mask(g, rng, density=0.1)
    delta = distance_transform(mask)
    for spec in (WeightSpec(WeightKind.SELF_POWER),
                 WeightSpec(WeightKind.POWER, p=3.0),
                 WeightSpec(WeightKind.INDICATOR)):
        w = eval_weight(delta, spec).values
        lw = log_weight_values(delta, spec)
        pos = w > 0
        assert np.allclose(lw[pos], np.log(w[pos]), atol=1e-12)
        # -inf exactly on the occupied set for these distance fields
        assert np.all(np.isneginf(lw[~pos]) | (w[~pos] > 0))
        assert np.all(np.isneginf(lw[mask.occupied]))


def test_log_weight_survives_underflow():
    g = Grid((0.0, 0.0), 1.0, 3)
    d = _field(g, [[1e-4, 0.5, 1.0]] * 3)
    spec = WeightSpec(WeightKind.SELF_POWER)
    w = eval_weight(d, spec).values
    lw = log_weight_values(d, spec)
    assert w[0, 0] == 0.0                       # clamped in linear space
    assert np.isfinite(lw[0, 0])                # but exact in log space
    assert lw[0, 0] == pytest.approx(math.log(1e-4) / 1e-4)


def test_weight_bound_check():
    g = Grid((0.0, 0.0), 1.0, 65)
    occ = np.zeros((65, 65), dtype=bool)
    occ[32, 32] = True
    delta = distance_transform(PixelMask(g, occ))
    omega = eval_weight(delta, WeightSpec(WeightKind.SELF_POWER))
    assert weight_bound_check(omega, delta, p=3.0, center=(0.5, 0.5), radius=0.3)
    with pytest.raises(ParameterError):
        weight_bound_check(omega, delta, p=3.0, center=(0.5, 0.5), radius=0.5)
