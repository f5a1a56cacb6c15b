import math

import networkx as nx
import numpy as np
import pytest

from conftest import random_mask
from modlab.errors import DomainError, ParameterError
from modlab.grids import Grid, PixelMask, ScalarField
from modlab.metric import (SQRT2, ball_distance_excess, build,
                           distance_between, edge_endpoints,
                           quadrature_tolerance, shortest_distances,
                           weighted_diameter)
from modlab.weights import (WeightKind, WeightSpec, distance_transform,
                            eval_weight)


def test_edge_endpoints_counts_and_lengths():
    for n in (3, 5, 9):
        a, b, lf = edge_endpoints(n)
        # n(n-1) horizontal + n(n-1) vertical + 2(n-1)^2 diagonal edges
        assert a.size == 2 * n * (n - 1) + 2 * (n - 1) ** 2
        ia, ja = np.divmod(a, n)
        ib, jb = np.divmod(b, n)
        di = np.abs(ia - ib)
        dj = np.abs(ja - jb)
        assert np.all(np.maximum(di, dj) == 1)
        assert np.allclose(lf, np.where(di + dj == 2, SQRT2, 1.0))
        # undirected edge list: each unordered pair appears once
        keys = set(zip(np.minimum(a, b).tolist(), np.maximum(a, b).tolist()))
        assert len(keys) == a.size


def test_build_rejects_negative_weight():
    g = Grid((0.0, 0.0), 1.0, 3)
    with pytest.raises(ParameterError):
        build(ScalarField(g, np.full((3, 3), -1.0)))


def _nx_oracle(g, w):
    """Independent shortest-path oracle for the trapezoid edge costs."""
    n = g.n
    a, b, lf = edge_endpoints(n)
    G = nx.Graph()
    G.add_nodes_from(range(n * n))
    wf = w.ravel()
    for u, v, f in zip(a.tolist(), b.tolist(), lf.tolist()):
        G.add_edge(u, v, weight=f * g.h * 0.5 * (wf[u] + wf[v]))
    return G


def test_distances_match_networkx(rng):
    g = Grid((0.0, 0.0), 1.0, 9)
    w = rng.random((9, 9))
    G = _nx_oracle(g, w)
    dist = shortest_distances(build(ScalarField(g, w)), [0]).values
    oracle = nx.single_source_dijkstra_path_length(G, 0)
    for u in range(81):
        assert dist[u] == pytest.approx(oracle[u], abs=1e-12)


def test_unweighted_distance_is_king_metric():
    g = Grid((0.0, 0.0), 1.0, 9)
    mg = build(ScalarField(g, np.ones((9, 9))))
    # straight runs cost h per step, diagonal runs h*sqrt(2)
    assert distance_between(mg, (0, 0), (5, 0)) == pytest.approx(5 * g.h)
    assert distance_between(mg, (0, 0), (4, 4)) == pytest.approx(4 * g.h * SQRT2)
    assert distance_between(mg, (0, 0), (5, 3)) == \
        pytest.approx(3 * g.h * SQRT2 + 2 * g.h)


def test_symmetry(rng):
    g = Grid((0.0, 0.0), 1.0, 9)
    mg = build(ScalarField(g, rng.random((9, 9))))
    # the defining data is exactly symmetric
    assert (mg.adjacency != mg.adjacency.T).nnz == 0
    # distances agree up to summation order of identical edge costs
    nodes = rng.integers(0, 81, size=12)
    for u, v in zip(nodes[::2], nodes[1::2]):
        duv = distance_between(mg, int(u), int(v))
        dvu = distance_between(mg, int(v), int(u))
        assert duv == pytest.approx(dvu, rel=1e-13, abs=0.0)


def test_triangle_inequality_sampled(rng):
    g = Grid((0.0, 0.0), 1.0, 17)
    mask = random_mask(g, rng, density=0.1)
    omega = eval_weight(distance_transform(mask), WeightSpec(WeightKind.SELF_POWER))
    mg = build(omega)
    ids = np.sort(rng.choice(17 * 17, size=24, replace=False))
    from scipy.sparse.csgraph import dijkstra
    d = dijkstra(mg.adjacency, directed=False, indices=ids)
    sub = d[:, ids]
    triples = rng.integers(0, ids.size, size=(200, 3))
    for x, y, z in triples:
        assert sub[x, z] <= sub[x, y] + sub[y, z] + 1e-12


def test_source_order_irrelevant(rng):
    g = Grid((0.0, 0.0), 1.0, 9)
    mg = build(ScalarField(g, rng.random((9, 9))))
    a = shortest_distances(mg, [3, 40, 77]).values
    b = shortest_distances(mg, [77, 3, 40]).values
    assert np.array_equal(a, b)
    with pytest.raises(DomainError):
        shortest_distances(mg, [])


def test_weighted_diameter_exact_and_sweep():
    g = Grid((0.0, 0.0), 1.0, 9)
    mg = build(ScalarField(g, np.ones((9, 9))))
    nodes = [(0, 0), (8, 8), (0, 8), (4, 4)]
    d_exact, exact = weighted_diameter(mg, nodes)
    assert exact
    assert d_exact == pytest.approx(8 * g.h * SQRT2)
    d_sweep, exact2 = weighted_diameter(mg, nodes, exact_limit=2)
    assert not exact2
    assert d_sweep <= d_exact + 1e-12


def test_ball_distance_excess_parameters():
    g = Grid((0.0, 0.0), 1.0, 33)
    mg = build(ScalarField(g, np.ones((33, 33))))
    with pytest.raises(ParameterError):
        ball_distance_excess(mg, (0.5, 0.5), 0.6, 2.0)


def test_quadrature_tolerance_value():
    assert quadrature_tolerance(0.01, 0.3, 2.0) == pytest.approx(2 * 0.01 * 0.09)
