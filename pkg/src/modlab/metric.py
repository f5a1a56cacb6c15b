"""Weighted grid graph realizing the path metric induced by a weight field.

Nodes are the grid nodes, connectivity is 8-neighbor, and an edge (u, v)
costs |u - v| * (w(u) + w(v)) / 2 -- the trapezoid quadrature of the line
integral of the weight along the edge.  Shortest-path distances on this
graph are the discrete stand-in for the infimal weighted length over all
rectifiable curves; grid paths are a strict subset of those curves, so
refinement trends rather than convergence rates are reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .errors import DomainError, GeometryError, ParameterError
from .grids import Grid, ScalarField, nodes_in_ball, require_ball_inside

SQRT2 = float(np.sqrt(2.0))

# (di, dj, euclidean length factor) for the 4 undirected neighbor offsets
_OFFSETS = ((1, 0, 1.0), (0, 1, 1.0), (1, 1, SQRT2), (1, -1, SQRT2))


def edge_endpoints(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Undirected 8-neighbor edge list on an n x n lattice.

    Returns (a, b, length_factor) with flat node ids ``i * n + j``.
    """
    aa, bb, ll = [], [], []
    idx = np.arange(n * n).reshape(n, n)
    for di, dj, lf in _OFFSETS:
        if dj >= 0:
            src = idx[: n - di if di else n, : n - dj if dj else n]
            dst = idx[di:, dj:] if dj else idx[di:, :]
        else:
            src = idx[: n - di, -dj:]
            dst = idx[di:, :dj]
        aa.append(src.ravel())
        bb.append(dst.ravel())
        ll.append(np.full(src.size, lf))
    return np.concatenate(aa), np.concatenate(bb), np.concatenate(ll)


@dataclass(frozen=True)
class MetricGraph:
    grid: Grid
    omega: np.ndarray = field(repr=False)        # flat (n*n,) node weights
    adjacency: sp.csr_matrix = field(repr=False)  # symmetric, nonnegative

    @property
    def n(self) -> int:
        return self.grid.n


@dataclass(frozen=True)
class DistanceField:
    graph: MetricGraph
    sources: np.ndarray = field(repr=False)       # flat node ids
    values: np.ndarray = field(repr=False)        # flat (n*n,) distances

    def as_field(self) -> ScalarField:
        n = self.graph.n
        return ScalarField(self.graph.grid, self.values.reshape(n, n))

    def at(self, i: int, j: int) -> float:
        return float(self.values[i * self.graph.n + j])


def build(omega: ScalarField) -> MetricGraph:
    """Assemble the weighted 8-neighbor graph for a nonnegative weight."""
    w = omega.values
    if np.any(w < 0):
        raise ParameterError("weight must be nonnegative")
    n = omega.grid.n
    h = omega.grid.h
    a, b, lf = edge_endpoints(n)
    wf = w.ravel()
    cost = lf * h * 0.5 * (wf[a] + wf[b])
    m = sp.csr_matrix(
        (np.concatenate([cost, cost]),
         (np.concatenate([a, b]), np.concatenate([b, a]))),
        shape=(n * n, n * n),
    )
    return MetricGraph(omega.grid, wf, m)


def shortest_distances(g: MetricGraph, sources) -> DistanceField:
    """Exact multi-source shortest-path distances (nonnegative weights).

    ``sources`` is an iterable of flat node ids or (i, j) pairs.  The result
    does not depend on iteration order.
    """
    src = _flat_ids(g, sources)
    if src.size == 0:
        raise DomainError("source set must be nonempty")
    d = dijkstra(g.adjacency, directed=False, indices=src, min_only=True)
    return DistanceField(g, src, d)


def _flat_ids(g: MetricGraph, nodes) -> np.ndarray:
    n = g.n
    out = []
    for item in nodes:
        if np.isscalar(item) or isinstance(item, (int, np.integer)):
            out.append(int(item))
        else:
            i, j = item
            out.append(int(i) * n + int(j))
    ids = np.array(sorted(set(out)), dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= n * n):
        raise ParameterError("node id out of range")
    return ids


def distance_between(g: MetricGraph, u, v) -> float:
    """d_w between two nodes (single Dijkstra from u)."""
    return float(shortest_distances(g, [u]).values[_flat_ids(g, [v])[0]])


def ball_distance_excess(
    g: MetricGraph,
    center: tuple[float, float],
    radius: float,
    p: float,
) -> float:
    """Worst signed slack of the power-integral distance bound on a ball.

    For a center on the set and radius d < 1/p, the weighted distance from
    the center to any point of the closed ball is bounded by
    ``d**(p+1) / (p+1)`` (integral of t**p along the radius).  Returns
    ``max_x d_w(center, x) - d**(p+1)/(p+1)`` over ball nodes; tests assert
    this does not exceed the quadrature tolerance tau(h) = 2 * h * d**p.
    """
    if not (radius < 1.0 / p < 1.0):
        raise ParameterError(f"need radius < 1/p < 1, got radius={radius}, p={p}")
    require_ball_inside(g.grid, center, radius)
    ball = nodes_in_ball(g.grid, center, radius).ravel()
    if not ball.any():
        raise GeometryError("ball contains no grid nodes")
    cidx = g.grid.index_of(*center)
    dist = shortest_distances(g, [cidx]).values
    bound = radius ** (p + 1.0) / (p + 1.0)
    return float(np.max(dist[ball]) - bound)


def quadrature_tolerance(h: float, radius: float, p: float) -> float:
    """tau(h) for the ball bound test; the constant 2 absorbs the one-cell
    rasterization offset and the trapezoid quadrature error."""
    return 2.0 * h * radius ** p


def weighted_diameter(g: MetricGraph, nodes, exact_limit: int = 512) -> tuple[float, bool]:
    """Diameter of a node set in the graph metric.

    Exact all-pairs sweep when the set has at most ``exact_limit`` nodes;
    otherwise a 2-sweep lower bound, flagged by the second return value
    (True = exact).
    """
    ids = _flat_ids(g, nodes)
    if ids.size == 0:
        raise DomainError("node set must be nonempty")
    if ids.size == 1:
        return 0.0, True
    if ids.size <= exact_limit:
        d = dijkstra(g.adjacency, directed=False, indices=ids)
        return float(d[:, ids].max()), True
    # 2-sweep: farthest from an arbitrary start, then farthest from that
    d0 = dijkstra(g.adjacency, directed=False, indices=[ids[0]], min_only=True)
    far = ids[int(np.argmax(d0[ids]))]
    d1 = dijkstra(g.adjacency, directed=False, indices=[far], min_only=True)
    return float(d1[ids].max()), False
