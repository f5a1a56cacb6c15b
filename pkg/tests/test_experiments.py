import json
import math

import numpy as np
import pytest

from modlab.errors import GeometryError, ParameterError
from modlab.experiments import (CANONICAL_EXTENT, CANONICAL_ORIGIN, SNAP,
                                _check_sides_clear, _log_minimax_matrix,
                                _log_scale_counts, _trend_word, ab_deficiency,
                                canonical_grid, make_battery,
                                qc_dimension_experiment, reciprocality_probe)
from modlab.grids import Grid, PixelMask
from modlab.modulus import Quadrilateral
from modlab.sets import CompactSetSpec, SetKind, rasterize
from modlab.weights import (WeightKind, WeightSpec, distance_transform,
                            log_weight_values)
from oracles import minimax_log_distances


def test_canonical_grid_window():
    g = canonical_grid(33)
    assert g.origin == CANONICAL_ORIGIN
    assert g.extent == CANONICAL_EXTENT
    # every generator bounding box fits with frame room
    for spec in (CompactSetSpec(SetKind.CANTOR_PRODUCT, ratio=0.5),
                 CompactSetSpec(SetKind.FAT_CANTOR)):
        assert g.covers(*spec.bounding_box())


def _on_lattice(v):
    t = (v - CANONICAL_ORIGIN[0]) / SNAP
    return abs(t - round(t)) < 1e-9


def test_battery_snapped_and_inside_window():
    lo = CANONICAL_ORIGIN[0]
    hi = CANONICAL_ORIGIN[0] + CANONICAL_EXTENT
    for bbox in ((0.0, 1.0, 0.0, 0.0), (0.0, 1.0, 0.0, 1.0),
                 (lo, hi, lo, hi), (0.3, 0.31, 0.3, 0.31)):
        battery = make_battery(bbox)
        assert len(battery) == 6
        assert {q.name for q in battery} == {
            "crossing_h", "crossing_v", "offset_h", "offset_v",
            "frame_1.5x", "frame_2x"}
        for q in battery:
            x0, x1, y0, y1 = q.rect
            assert x0 < x1 and y0 < y1
            for v in q.rect:
                assert lo - 1e-12 <= v <= hi + 1e-12
                assert _on_lattice(v)


def test_battery_crossing_quads_span_the_set():
    bbox = (0.0, 1.0, 0.0, 0.0)
    by_name = {q.name: q for q in make_battery(bbox)}
    x0, x1, y0, y1 = by_name["crossing_v"].rect
    # transverse extent strictly inside the set's horizontal span
    assert x0 > bbox[0] and x1 < bbox[1]
    assert y0 < bbox[2] and y1 > bbox[3]


def test_check_sides_clear():
    g = canonical_grid(33)
    mask = rasterize(CompactSetSpec(SetKind.SEGMENT, p0=(0.0, 0.0), p1=(1.0, 0.0)),
                     0, g)
    clear = Quadrilateral((-0.25, 1.25, -0.25, 0.25), "horizontal", "ok")
    _check_sides_clear(clear, g, mask)
    touching = Quadrilateral((0.0, 1.0, -0.25, 0.25), "horizontal", "bad")
    with pytest.raises(GeometryError, match="bad"):
        _check_sides_clear(touching, g, mask)


def test_trend_word():
    assert _trend_word([]) == "flat"
    assert _trend_word([1.0]) == "flat"
    assert _trend_word([0.5, 0.7]) == "increasing"
    assert _trend_word([0.7, 0.5]) == "decreasing"
    assert _trend_word([0.5, 0.5]) == "flat"


def test_deficiency_empty_set_all_ones():
    g = canonical_grid(17)
    empty = CompactSetSpec(SetKind.RAW_MASK,
                           mask=PixelMask(g, np.zeros((17, 17), dtype=bool)))
    battery = make_battery(empty.bounding_box())
    rep = ab_deficiency(empty, (0,), battery, (17, 33))
    assert rep.verdict == "no counterexample found"
    for cell in rep.cells:
        assert cell.ratio == 1.0
        assert cell.flag == "empty set"
    payload = json.loads(rep.to_json())
    assert payload["experiment"] == "deficiency"
    rows = list(rep.csv_rows())
    assert rows[0].startswith("set,depth,quad_id,n,")
    assert len(rows) == 1 + len(rep.cells)


def test_deficiency_ratios_at_most_one():
    spec = CompactSetSpec(SetKind.CANTOR_PRODUCT, ratio=0.5)
    battery = make_battery(spec.bounding_box())
    rep = ab_deficiency(spec, (3,), battery, (33,))
    for cell in rep.cells:
        assert 0.0 < cell.ratio <= 1.0 + 1e-9


def test_log_minimax_matches_floyd_warshall():
    n = 9
    g = Grid((0.0, 0.0), 1.0, n)
    occ = np.zeros((n, n), dtype=bool)
    occ[1, 1] = True
    occ[7, 2] = True
    occ[4, 7] = True
    mask = PixelMask(g, occ)
    logw = log_weight_values(distance_transform(mask),
                             WeightSpec(WeightKind.SELF_POWER))
    lam = _log_minimax_matrix(mask, logw)

    lw = logw.ravel()

    def edge_cost(u, v):
        iu, ju = divmod(u, n)
        iv, jv = divmod(v, n)
        lf = math.sqrt(2.0) if (iu != iv and ju != jv) else 1.0
        return math.log(g.h * lf * 0.5) + np.logaddexp(lw[u], lw[v])

    oracle = minimax_log_distances(n, edge_cost)
    reps = np.flatnonzero(mask.occupied.ravel())
    for a in range(3):
        for b in range(3):
            if a == b:
                continue
            assert lam[a, b] == pytest.approx(oracle[reps[a], reps[b]], abs=1e-9)


def test_log_scale_counts_two_points():
    # two metric points at log distance -10: one ball above, two below
    lam = np.array([[-math.inf, -10.0], [-10.0, -math.inf]])
    r = _log_scale_counts(lam, [-5.0, -8.0, -12.0, -15.0])
    assert r.counts == (1, 1, 2, 2)
    assert r.slope > 0.0


def test_reciprocality_product_near_one_unweighted():
    g = canonical_grid(17)
    empty = CompactSetSpec(SetKind.RAW_MASK,
                           mask=PixelMask(g, np.zeros((17, 17), dtype=bool)))
    battery = make_battery(empty.bounding_box())[:1]
    rep = reciprocality_probe(empty, WeightSpec(WeightKind.SELF_POWER),
                              battery, (17,))
    assert len(rep.cells) == 1
    cell = rep.cells[0]
    assert cell.converged
    assert cell.product == pytest.approx(1.0, abs=1e-3)
    rows = list(rep.csv_rows())
    assert rows[0].startswith("set,quad_id,n,")


def test_qc_dimension_requires_cantor_kind():
    with pytest.raises(ParameterError):
        qc_dimension_experiment(
            CompactSetSpec(SetKind.SEGMENT, p0=(0.0, 0.0), p1=(1.0, 0.0)),
            (0,), (65,))
    with pytest.raises(ParameterError):
        qc_dimension_experiment(CompactSetSpec(SetKind.CANTOR_LINE, ratio=1 / 3),
                                (1, 2), (65, 129, 257))


def test_qc_dimension_weighted_below_euclidean():
    spec = CompactSetSpec(SetKind.CANTOR_LINE, ratio=1 / 3)
    rep = qc_dimension_experiment(spec, (6,), (65, 129))
    assert len(rep.cells) == 2
    for cell in rep.cells:
        assert cell.weighted.slope < cell.euclidean.slope
        assert cell.weighted.slope >= 0.0
    payload = json.loads(rep.to_json())
    assert "log_scales" in payload["cells"][0]["weighted"]
