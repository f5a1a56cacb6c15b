"""Hausdorff content upper bounds and box-counting dimension estimates.

Everything here produces certified one-sided estimates: covers are chosen
from a restricted class (hierarchical dyadic boxes, greedy metric balls),
so content values are upper bounds and never underestimates of the best
cover in the same class.  Dimension is estimated by box counting, which
upper-bounds Hausdorff dimension; all callers report it as a
"box-dimension estimate", not a dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull, QhullError

from .errors import DomainError, NumericError, ParameterError
from .grids import PixelMask
from .metric import MetricGraph, shortest_distances


class MetricKind(str, Enum):
    EUCLIDEAN = "euclidean"
    WEIGHTED = "weighted"


def normalizer(s: float) -> float:
    """c(s) = pi**(s/2) / (2**s * Gamma(s/2 + 1)): the s-volume of a ball of
    unit diameter.  c(1) = 1 and c(2) = pi/4."""
    return math.pi ** (s / 2.0) / (2.0 ** s * math.gamma(s / 2.0 + 1.0))


@dataclass(frozen=True)
class HausdorffQuery:
    """Parameters of a content estimate: exponent, cover scale cap, metric."""

    s: float
    scale_cap: float = math.inf
    metric: MetricKind = MetricKind.EUCLIDEAN

    def __post_init__(self):
        if self.s < 0:
            raise ParameterError(f"exponent s must be >= 0, got {self.s}")
        if not self.scale_cap > 0:
            raise ParameterError(f"scale cap must be > 0, got {self.scale_cap}")
        object.__setattr__(self, "metric", MetricKind(self.metric))


def _point_coords(mask: PixelMask) -> np.ndarray:
    """(k, 2) array of occupied node coordinates, in flat-index order."""
    ii, jj = np.nonzero(mask.occupied)
    g = mask.grid
    return np.column_stack([g.origin[0] + g.h * ii, g.origin[1] + g.h * jj])


def euclidean_diameter(pts: np.ndarray) -> float:
    """Exact diameter of a finite planar point set."""
    if len(pts) < 2:
        return 0.0
    if len(pts) > 8:
        try:
            pts = pts[ConvexHull(pts).vertices]
        except QhullError:
            # collinear input: the coordinate extremes contain both endpoints
            cand = []
            for key in (pts[:, 0], pts[:, 1]):
                cand.append(pts[np.argmin(key)])
                cand.append(pts[np.argmax(key)])
            pts = np.array(cand)
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    return float(np.sqrt(d2.max()))


def _dyadic_cover_cost(pts: np.ndarray, s: float, cap: float, c_s: float,
                       cell: float) -> float:
    """Cheapest hierarchical cover cost c(s) * sum(diam**s).

    Recursively compares covering a subdivision box by one set against the
    sum over its four children; diameters above the scale cap force a
    split.  Each node stands for a closed cell of side h, so every
    diameter is inflated by the cell diagonal ``cell``; this keeps single
    cells at positive content and stops the recursion from dissolving the
    set into zero-cost points.
    """

    def best(sub: np.ndarray, size: float) -> float:
        diam = euclidean_diameter(sub) + cell
        if diam <= cap:
            whole = c_s * diam ** s
            if len(sub) < 2:
                return whole
        else:
            whole = math.inf
        half = size / 2.0
        if half < cell:
            return whole
        parts = 0.0
        mid = sub.min(axis=0) + half
        for qx in (False, True):
            for qy in (False, True):
                sel = ((sub[:, 0] >= mid[0]) == qx) & ((sub[:, 1] >= mid[1]) == qy)
                if sel.any():
                    parts += best(sub[sel], half)
            if parts >= whole:
                return whole
        return min(whole, parts)

    span = float(np.ptp(pts, axis=0).max())
    return best(pts, span if span > 0 else cell)


def _greedy_ball_cover(
    graph: MetricGraph,
    flat_ids: np.ndarray,
    radius: float,
) -> tuple[int, float]:
    """Greedy cover of a node set by metric balls of the given radius.

    Representatives are taken in flat-index order; each opens a ball, and
    every remaining node within ``radius`` of it (every reachable node if
    the radius is infinite) is covered.  Returns (ball count, sum over
    balls of a diameter upper bound for the covered subset, namely twice
    the largest center distance).
    """
    remaining = np.ones(flat_ids.size, dtype=bool)
    count = 0
    diam_sum = 0.0
    while remaining.any():
        rep = flat_ids[np.argmax(remaining)]
        dist = shortest_distances(graph, [int(rep)]).values[flat_ids]
        if math.isinf(radius):
            inside = np.isfinite(dist) & remaining
        else:
            inside = (dist <= radius) & remaining
        covered = dist[inside]
        diam_sum += 2.0 * float(covered.max()) if covered.size else 0.0
        remaining &= ~inside
        count += 1
    return count, diam_sum


def content_upper(
    mask: PixelMask,
    q: HausdorffQuery,
    graph: MetricGraph | None = None,
) -> float:
    """Upper bound on the s-content H^s_cap of the occupied node set.

    Euclidean metric: optimal cover within the hierarchical dyadic-box
    class, each box charged c(s) * diam**s of the points it contains.
    Weighted metric: greedy metric-ball cover on the supplied graph with
    balls of radius scale_cap / 2, each charged c(s) * diam**s of the
    subset it covers.
    """
    if mask.count == 0:
        return 0.0
    c_s = normalizer(q.s)
    if q.metric is MetricKind.EUCLIDEAN:
        cell = mask.grid.h * math.sqrt(2.0)
        return _dyadic_cover_cost(_point_coords(mask), q.s, q.scale_cap, c_s, cell)
    if graph is None:
        raise ParameterError("weighted content requires a metric graph")
    if graph.grid != mask.grid:
        raise ParameterError("metric graph must live on the mask grid")
    flat = np.flatnonzero(mask.occupied.ravel())
    remaining = np.ones(flat.size, dtype=bool)
    total = 0.0
    while remaining.any():
        rep = flat[np.argmax(remaining)]
        dist = shortest_distances(graph, [int(rep)]).values[flat]
        if math.isinf(q.scale_cap):
            inside = np.isfinite(dist) & remaining
        else:
            inside = (dist <= q.scale_cap / 2.0) & remaining
        covered = dist[inside]
        diam = min(2.0 * float(covered.max()), q.scale_cap) if covered.size else 0.0
        total += c_s * diam ** q.s
        remaining &= ~inside
    return total


@dataclass(frozen=True)
class BoxDimensionResult:
    slope: float
    residual: float
    scales: tuple[float, ...]
    counts: tuple[int, ...]

    def rows(self):
        """(scale, count) pairs for CSV emission."""
        return list(zip(self.scales, self.counts))


def _check_scales(scales) -> np.ndarray:
    eps = np.asarray(sorted(set(float(e) for e in scales), reverse=True))
    if eps.size < 3:
        raise ParameterError("need at least 3 distinct scales")
    if np.any(eps <= 0):
        raise ParameterError("scales must be positive")
    if eps[0] / eps[-1] < 4.0:
        raise ParameterError("scales must span at least two octaves")
    return eps


def _regression(eps: np.ndarray, counts: np.ndarray) -> tuple[float, float]:
    x = np.log(1.0 / eps)
    y = np.log(counts.astype(float))
    if np.ptp(x) == 0.0:
        raise NumericError("degenerate regression: scales have zero variance")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(np.sqrt(np.mean(resid ** 2)))


def box_dimension(
    mask: PixelMask,
    scales,
    metric: MetricKind = MetricKind.EUCLIDEAN,
    graph: MetricGraph | None = None,
) -> BoxDimensionResult:
    """Box-counting dimension estimate: slope of log N(eps) vs log(1/eps).

    Euclidean counts are occupied boxes of an eps-grid partition anchored
    at the window origin; weighted counts are greedy metric balls of
    radius eps on the supplied graph.  Returns the least-squares slope,
    the RMS regression residual, and the per-scale counts.
    """
    if mask.count == 0:
        raise DomainError("cannot estimate the dimension of an empty set")
    eps = _check_scales(scales)
    metric = MetricKind(metric)
    counts = []
    if metric is MetricKind.EUCLIDEAN:
        pts = _point_coords(mask)
        org = np.array(mask.grid.origin)
        for e in eps:
            # nodes exactly on a partition line are snapped into the lower
            # box, so lattice-aligned sets are not double counted
            t = (pts - org) / e
            cells = np.floor(t * (1.0 - 1e-12)).astype(np.int64)
            counts.append(len(np.unique(cells, axis=0)))
    else:
        if graph is None:
            raise ParameterError("weighted box counting requires a metric graph")
        if graph.grid != mask.grid:
            raise ParameterError("metric graph must live on the mask grid")
        flat = _component_representatives(mask)
        for e in eps:
            n_balls, _ = _greedy_ball_cover(graph, flat, float(e))
            counts.append(n_balls)
    counts_arr = np.asarray(counts)
    slope, resid = _regression(eps, counts_arr)
    return BoxDimensionResult(slope, resid, tuple(float(e) for e in eps),
                              tuple(int(c) for c in counts_arr))


def _component_representatives(mask: PixelMask) -> np.ndarray:
    """One flat node id per 8-connected component of the occupied set.

    The weight vanishes on the occupied set, so every component is at
    metric distance zero from its representative; counting balls over
    representatives equals counting over all occupied nodes.
    """
    structure = ndimage.generate_binary_structure(2, 2)
    labels, k = ndimage.label(mask.occupied, structure=structure)
    flat_labels = labels.ravel()
    reps = np.zeros(k, dtype=np.int64)
    for c in range(1, k + 1):
        reps[c - 1] = np.argmax(flat_labels == c)
    return reps


def connected_content_identity_check(mask: PixelMask) -> tuple[float, float]:
    """(H^1 content estimate, Euclidean diameter) for a connected mask.

    For a continuum the two agree; the caller compares them against the
    grid-scale tolerance.  Raises DomainError if the occupied set is not
    8-connected.
    """
    if mask.count == 0:
        raise DomainError("mask is empty")
    structure = ndimage.generate_binary_structure(2, 2)
    _, k = ndimage.label(mask.occupied, structure=structure)
    if k != 1:
        raise DomainError(f"occupied set has {k} components, expected a continuum")
    content = content_upper(mask, HausdorffQuery(1.0))
    diam = euclidean_diameter(_point_coords(mask))
    return content, diam
