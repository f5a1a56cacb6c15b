"""Generators and rasterization for the planar compact test sets.

Each set is described by a :class:`CompactSetSpec` and realized at a finite
recursion depth as a union of geometric primitives (boxes, segments,
circles).  Rasterization marks a grid node occupied iff the closed cell of
side h centered at the node intersects the depth-d generation, which
over-approximates the true (infinite-depth) set -- the safe direction when
curves are required to avoid it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import GeometryError, ParameterError
from .grids import Grid, PixelMask


class SetKind(str, Enum):
    CANTOR_LINE = "cantor_line"
    CANTOR_PRODUCT = "cantor_product"
    FAT_CANTOR = "fat_cantor"
    SEGMENT = "segment"
    POLYLINE_ARC = "polyline_arc"
    CIRCLE = "circle"
    RAW_MASK = "raw_mask"

CANTOR_KINDS = {SetKind.CANTOR_LINE, SetKind.CANTOR_PRODUCT, SetKind.FAT_CANTOR}


def default_fat_cantor_gaps(depth: int) -> list[float]:
    """Gap removed per interval at stage k: 4**-(k+1).  Total removed
    measure sums to 1/2, leaving a nowhere-dense set of length 1/2."""
    return [4.0 ** -(k + 1) for k in range(depth)]


@dataclass(frozen=True)
class CompactSetSpec:
    """Generator description of a planar compact set.

    Supported kinds and their parameters:

    * ``cantor_line``: middle-``ratio`` removal on the unit segment
      ``[0, 1] x {0}``; params: ``ratio`` in (0, 1).
    * ``cantor_product``: cartesian square of the cantor line construction
      on ``[0, 1]^2``; params: ``ratio``.
    * ``fat_cantor``: positive-length nowhere-dense subset of
      ``[0, 1] x {0}``; params: optional ``gaps`` (length removed per
      interval per stage, must sum with multiplicities to < 1).
    * ``segment``: params ``p0``, ``p1``.
    * ``polyline_arc``: params ``points`` (>= 2 vertices).
    * ``circle``: params ``center``, ``radius`` (the curve, not the disk).
    * ``raw_mask``: params ``mask`` (a PixelMask taken as-is).
    """

    kind: SetKind
    ratio: float | None = None
    gaps: tuple[float, ...] | None = None
    p0: tuple[float, float] | None = None
    p1: tuple[float, float] | None = None
    points: tuple[tuple[float, float], ...] | None = None
    center: tuple[float, float] | None = None
    radius: float | None = None
    mask: "PixelMask | None" = field(default=None, repr=False)

    def __post_init__(self):
        k = SetKind(self.kind)
        object.__setattr__(self, "kind", k)
        if k in (SetKind.CANTOR_LINE, SetKind.CANTOR_PRODUCT):
            if self.ratio is None or not (0.0 < self.ratio < 1.0):
                raise ParameterError(f"ratio must lie strictly in (0,1), got {self.ratio}")
        elif k is SetKind.FAT_CANTOR:
            if self.gaps is not None:
                total = sum((2 ** i) * g for i, g in enumerate(self.gaps))
                if any(g <= 0 for g in self.gaps) or total >= 1.0:
                    raise ParameterError(
                        f"gaps must be positive with total removed measure < 1, got {total}")
        elif k is SetKind.SEGMENT:
            if self.p0 is None or self.p1 is None:
                raise ParameterError("p0 and p1 are required for kind segment")
        elif k is SetKind.POLYLINE_ARC:
            if self.points is None or len(self.points) < 2:
                raise ParameterError("points must hold at least 2 vertices")
        elif k is SetKind.CIRCLE:
            if self.center is None or self.radius is None or self.radius <= 0:
                raise ParameterError(f"radius must be > 0, got {self.radius}")
        elif k is SetKind.RAW_MASK:
            if self.mask is None:
                raise ParameterError("mask is required for kind raw_mask")

    def bounding_box(self) -> tuple[float, float, float, float]:
        """(x0, x1, y0, y1) containing the generated set at every depth."""
        k = self.kind
        if k in (SetKind.CANTOR_LINE, SetKind.FAT_CANTOR):
            return (0.0, 1.0, 0.0, 0.0)
        if k is SetKind.CANTOR_PRODUCT:
            return (0.0, 1.0, 0.0, 1.0)
        if k is SetKind.SEGMENT:
            (x0, y0), (x1, y1) = self.p0, self.p1
            return (min(x0, x1), max(x0, x1), min(y0, y1), max(y0, y1))
        if k is SetKind.POLYLINE_ARC:
            xs = [p[0] for p in self.points]
            ys = [p[1] for p in self.points]
            return (min(xs), max(xs), min(ys), max(ys))
        if k is SetKind.CIRCLE:
            (cx, cy), r = self.center, self.radius
            return (cx - r, cx + r, cy - r, cy + r)
        g = self.mask.grid
        return (g.origin[0], g.origin[0] + g.extent, g.origin[1], g.origin[1] + g.extent)


@dataclass(frozen=True)
class Generation:
    """Finite union of primitives realizing a spec at one recursion depth."""

    spec: CompactSetSpec
    depth: int
    intervals: tuple[tuple[float, float], ...] = ()      # on the line y = 0
    boxes: tuple[tuple[float, float, float, float], ...] = ()  # (x0, x1, y0, y1)
    segments: tuple[tuple[tuple[float, float], tuple[float, float]], ...] = ()
    circle: tuple[tuple[float, float], float] | None = None
    mask: "PixelMask | None" = None


def _cantor_intervals(ratio: float, depth: int) -> list[tuple[float, float]]:
    ivs = [(0.0, 1.0)]
    for _ in range(depth):
        child = (1.0 - ratio) / 2.0
        nxt = []
        for a, b in ivs:
            ln = b - a
            nxt.append((a, a + child * ln))
            nxt.append((b - child * ln, b))
        ivs = nxt
    return ivs


def _fat_cantor_intervals(gaps: list[float], depth: int) -> list[tuple[float, float]]:
    ivs = [(0.0, 1.0)]
    for k in range(depth):
        g = gaps[k]
        nxt = []
        for a, b in ivs:
            mid = (a + b) / 2.0
            left, right = mid - g / 2.0, mid + g / 2.0
            if left <= a or right >= b:
                raise ParameterError(
                    f"gaps: stage-{k} gap {g} does not fit inside interval of length {b - a}")
            nxt.append((a, left))
            nxt.append((right, b))
        ivs = nxt
    return ivs


def generate(spec: CompactSetSpec, depth: int) -> Generation:
    """Exact interval/box/segment description of the set at ``depth``.

    For Cantor-type kinds the generations are nested: every depth-(d+1)
    component is contained in a depth-d component.
    """
    if depth < 0:
        raise ParameterError(f"depth must be >= 0, got {depth}")
    k = spec.kind
    if k is SetKind.CANTOR_LINE:
        return Generation(spec, depth, intervals=tuple(_cantor_intervals(spec.ratio, depth)))
    if k is SetKind.CANTOR_PRODUCT:
        ivs = _cantor_intervals(spec.ratio, depth)
        boxes = tuple((a, b, c, d) for a, b in ivs for c, d in ivs)
        return Generation(spec, depth, boxes=boxes)
    if k is SetKind.FAT_CANTOR:
        gaps = list(spec.gaps) if spec.gaps is not None else default_fat_cantor_gaps(depth)
        if len(gaps) < depth:
            raise ParameterError(
                f"gaps: need {depth} stages, got {len(gaps)}")
        return Generation(spec, depth, intervals=tuple(_fat_cantor_intervals(gaps, depth)))
    if k is SetKind.SEGMENT:
        return Generation(spec, depth, segments=((spec.p0, spec.p1),))
    if k is SetKind.POLYLINE_ARC:
        segs = tuple((spec.points[i], spec.points[i + 1]) for i in range(len(spec.points) - 1))
        return Generation(spec, depth, segments=segs)
    if k is SetKind.CIRCLE:
        return Generation(spec, depth, circle=(spec.center, spec.radius))
    return Generation(spec, depth, mask=spec.mask)


def _cells_meeting_boxes(grid: Grid, boxes, occ: np.ndarray) -> None:
    """Mark nodes whose closed h-cell intersects any closed box."""
    h = grid.h
    half = h / 2.0
    ox, oy = grid.origin
    n = grid.n
    for (x0, x1, y0, y1) in boxes:
        # node centers whose cell [-half, half] overlaps [x0, x1]
        i0 = max(0, math.ceil((x0 - ox - half) / h - 1e-12))
        i1 = min(n - 1, math.floor((x1 - ox + half) / h + 1e-12))
        j0 = max(0, math.ceil((y0 - oy - half) / h - 1e-12))
        j1 = min(n - 1, math.floor((y1 - oy + half) / h + 1e-12))
        if i0 <= i1 and j0 <= j1:
            occ[i0:i1 + 1, j0:j1 + 1] = True


def _seg_point_dist(px, py, ax, ay, bx, by):
    """Distance from points (px,py) to segment (a,b); vectorized."""
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return np.hypot(px - ax, py - ay)
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / L2, 0.0, 1.0)
    return np.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _cells_meeting_segment(grid: Grid, a, b, occ: np.ndarray) -> None:
    """Mark nodes whose closed square cell intersects segment [a, b].

    A square with center c and half-side s intersects the segment iff the
    Chebyshev-like test below passes; we use the exact criterion that the
    segment, clipped to the cell's bounding square, is nonempty, decided by
    conservative candidate selection followed by an exact clip test.
    """
    h = grid.h
    half = h / 2.0
    X, Y = grid.node_xy()
    # candidates: cell bounding circle reaches the segment
    d = _seg_point_dist(X, Y, a[0], a[1], b[0], b[1])
    cand = d <= half * math.sqrt(2.0) + 1e-12
    ii, jj = np.nonzero(cand)
    for i, j in zip(ii, jj):
        cx, cy = X[i, j], Y[i, j]
        if _segment_hits_square(a, b, cx, cy, half):
            occ[i, j] = True


def _segment_hits_square(a, b, cx, cy, half) -> bool:
    """Exact closed-segment / closed-axis-square intersection (Liang-Barsky)."""
    x0, y0 = a[0] - cx, a[1] - cy
    x1, y1 = b[0] - cx, b[1] - cy
    dx, dy = x1 - x0, y1 - y0
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, x0 + half), (dx, half - x0), (-dy, y0 + half), (dy, half - y0)):
        if p == 0.0:
            if q < -1e-12:
                return False
        else:
            t = q / p
            if p < 0:
                t0 = max(t0, t)
            else:
                t1 = min(t1, t)
            if t0 > t1 + 1e-12:
                return False
    return True


def _cells_meeting_circle(grid: Grid, center, radius, occ: np.ndarray) -> None:
    """Closed cell meets the circle curve iff min and max distance from the
    cell to the center straddle the radius."""
    half = grid.h / 2.0
    X, Y = grid.node_xy()
    ax = np.abs(X - center[0])
    ay = np.abs(Y - center[1])
    dmin = np.hypot(np.maximum(ax - half, 0.0), np.maximum(ay - half, 0.0))
    dmax = np.hypot(ax + half, ay + half)
    occ |= (dmin <= radius + 1e-12) & (dmax >= radius - 1e-12)


def rasterize(spec: CompactSetSpec, depth: int, grid: Grid) -> PixelMask:
    """Occupancy of the depth-``depth`` generation on ``grid``.

    Deterministic; a node is occupied iff its closed cell intersects the
    generation.  Raises GeometryError if the grid does not cover the spec's
    bounding box.
    """
    bb = spec.bounding_box()
    if not grid.covers(*bb):
        raise GeometryError(
            f"grid window does not cover the set bounding box {bb}")
    gen = generate(spec, depth)
    if gen.mask is not None:
        if gen.mask.count == 0:
            # the empty set rasterizes to the empty mask on any grid
            return PixelMask(grid, np.zeros((grid.n, grid.n), dtype=bool))
        if gen.mask.grid != grid:
            raise GeometryError("raw_mask grid differs from the rasterization grid")
        return gen.mask
    occ = np.zeros((grid.n, grid.n), dtype=bool)
    if gen.intervals:
        _cells_meeting_boxes(grid, [(a, b, 0.0, 0.0) for a, b in gen.intervals], occ)
    if gen.boxes:
        _cells_meeting_boxes(grid, gen.boxes, occ)
    for a, b in gen.segments:
        _cells_meeting_segment(grid, a, b, occ)
    if gen.circle is not None:
        _cells_meeting_circle(grid, gen.circle[0], gen.circle[1], occ)
    return PixelMask(grid, occ)
