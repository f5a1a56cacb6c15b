import math

import numpy as np
import pytest

from modlab.errors import DomainError, ParameterError
from modlab.grids import Grid, PixelMask, ScalarField
from modlab.hausdorff import (BoxDimensionResult, HausdorffQuery, MetricKind,
                              _component_representatives, box_dimension,
                              connected_content_identity_check, content_upper,
                              euclidean_diameter, normalizer)
from modlab.metric import build
from modlab.sets import CompactSetSpec, SetKind, rasterize


def test_normalizer_reference_values():
    assert normalizer(1.0) == pytest.approx(1.0)
    assert normalizer(2.0) == pytest.approx(math.pi / 4.0)
    assert normalizer(0.0) == pytest.approx(1.0)


def test_euclidean_diameter_brute_force(rng):
    for _ in range(5):
        pts = rng.random((40, 2))
        d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
        assert euclidean_diameter(pts) == pytest.approx(math.sqrt(d2.max()))
    # collinear input exercises the hull fallback
    t = np.sort(rng.random(30))
    pts = np.column_stack([t, 2.0 * t + 1.0])
    expect = math.hypot(t[-1] - t[0], 2.0 * (t[-1] - t[0]))
    assert euclidean_diameter(pts) == pytest.approx(expect)
    assert euclidean_diameter(pts[:1]) == 0.0


def test_query_validation():
    with pytest.raises(ParameterError):
        HausdorffQuery(-1.0)
    with pytest.raises(ParameterError):
        HausdorffQuery(1.0, scale_cap=0.0)


def _mask(grid, ij_list):
    occ = np.zeros((grid.n, grid.n), dtype=bool)
    for i, j in ij_list:
        occ[i, j] = True
    return PixelMask(grid, occ)


def test_content_single_and_split():
    g = Grid((0.0, 0.0), 1.0, 17)
    cell = g.h * math.sqrt(2.0)
    single = _mask(g, [(8, 8)])
    assert content_upper(single, HausdorffQuery(1.0)) == pytest.approx(cell)
    # two far-apart nodes: one cover set costs diam + cell, two singletons
    # cost 2 * cell; the optimizer must take the cheaper split
    two = _mask(g, [(0, 0), (16, 16)])
    assert content_upper(two, HausdorffQuery(1.0)) == pytest.approx(2.0 * cell)
    # for s = 0 the count itself is the content: splitting costs more
    assert content_upper(two, HausdorffQuery(0.0)) == pytest.approx(1.0)
    assert content_upper(_mask(g, []), HausdorffQuery(1.0)) == 0.0


def test_content_scale_cap_forces_split():
    g = Grid((0.0, 0.0), 1.0, 17)
    two = _mask(g, [(0, 0), (16, 0)])
    un = content_upper(two, HausdorffQuery(0.0))
    capped = content_upper(two, HausdorffQuery(0.0, scale_cap=0.5))
    assert un == pytest.approx(1.0)
    assert capped == pytest.approx(2.0)


def test_weighted_content_requires_graph():
    g = Grid((0.0, 0.0), 1.0, 17)
    m = _mask(g, [(8, 8)])
    with pytest.raises(ParameterError):
        content_upper(m, HausdorffQuery(1.0, metric=MetricKind.WEIGHTED))


def test_weighted_content_zero_weight_collapses():
    g = Grid((0.0, 0.0), 1.0, 17)
    m = _mask(g, [(0, 0), (16, 16)])
    graph = build(ScalarField(g, np.zeros((17, 17))))
    # everything is one metric point: a single zero-diameter ball
    assert content_upper(m, HausdorffQuery(1.0, metric=MetricKind.WEIGHTED),
                         graph=graph) == 0.0


def test_scale_validation():
    g = Grid((0.0, 0.0), 1.0, 17)
    m = _mask(g, [(0, 0), (4, 4), (8, 8)])
    with pytest.raises(ParameterError):
        box_dimension(m, [0.5, 0.25])
    with pytest.raises(ParameterError):
        box_dimension(m, [0.5, 0.4, 0.3])
    with pytest.raises(ParameterError):
        box_dimension(m, [0.5, -0.25, 0.125])
    with pytest.raises(DomainError):
        box_dimension(_mask(g, []), [0.5, 0.25, 0.125])


def test_box_dimension_full_square_exact():
    g = Grid((0.0, 0.0), 1.0, 65)
    full = PixelMask(g, np.ones((65, 65), dtype=bool))
    r = box_dimension(full, [2.0 ** -j for j in range(1, 5)])
    assert r.slope == pytest.approx(2.0, abs=1e-9)
    assert r.counts == (4, 16, 64, 256)


def test_box_dimension_segment_slope_one():
    g = Grid((0.0, 0.0), 1.0, 129)
    seg = rasterize(CompactSetSpec(SetKind.SEGMENT, p0=(0.0, 0.5), p1=(1.0, 0.5)),
                    0, g)
    r = box_dimension(seg, [2.0 ** -j for j in range(1, 6)])
    assert r.slope == pytest.approx(1.0, abs=0.05)


def test_weighted_box_count_counts_components():
    g = Grid((0.0, 0.0), 1.0, 17)
    m = _mask(g, [(2, 2), (2, 3), (14, 14)])
    graph = build(ScalarField(g, np.ones((17, 17))))
    r = box_dimension(m, [2.0, 1.0, 0.1, 0.01], metric=MetricKind.WEIGHTED,
                      graph=graph)
    # two components; large radius merges them, small radius separates
    assert r.counts[0] == 1
    assert r.counts[-1] == 2


def test_component_representatives():
    g = Grid((0.0, 0.0), 1.0, 17)
    m = _mask(g, [(2, 2), (3, 3), (10, 10), (0, 16)])
    reps = _component_representatives(m)
    assert reps.size == 3                       # diagonal pair is 8-connected
    assert np.all(m.occupied.ravel()[reps])


def test_connected_identity_requires_continuum():
    g = Grid((0.0, 0.0), 1.0, 17)
    with pytest.raises(DomainError):
        connected_content_identity_check(_mask(g, [(0, 0), (16, 16)]))
    with pytest.raises(DomainError):
        connected_content_identity_check(_mask(g, []))
    content, diam = connected_content_identity_check(
        _mask(g, [(4, 8), (5, 8), (6, 8), (7, 8)]))
    assert content == pytest.approx(diam, abs=4.0 * g.h)
