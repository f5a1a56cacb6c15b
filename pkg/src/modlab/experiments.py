"""The three headline experiments of the laboratory.

* Deficiency: does removing the set from a quadrilateral lower the modulus
  of its connecting family?  Ratios equal to 1 across a battery of
  quadrilaterals are evidence of removability; a persistent gap is a
  certificate of deficiency at the tested scales.
* Reciprocality probe: the product of the moduli of a quadrilateral's two
  connecting families, computed in the weighted geometry.  The product is
  1 in the unweighted plane; drifting out of band signals that the
  weighted surface fails reciprocality.
* Dimension: box-dimension estimate of the set under the weighted path
  metric against the Euclidean estimate.

Every verdict is a trend over resolutions, never a boolean: any finite
rasterization of the set is a finite union of cells, so only refinement
behavior carries information.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, ParameterError
from .grids import Grid, PixelMask, ScalarField
import scipy.sparse as sp
from scipy.sparse.csgraph import minimum_spanning_tree

from .hausdorff import (BoxDimensionResult, box_dimension,
                        _component_representatives)
from .metric import edge_endpoints
from .modulus import (CurveFamilySpec, FamilyKind, Marking, ModulusResult,
                      Quadrilateral, quad_modulus_conductance,
                      family_modulus_cutting_plane, region_indices, _side_masks)
from .sets import CANTOR_KINDS, CompactSetSpec, rasterize
from .weights import (WeightKind, WeightSpec, distance_transform, eval_weight,
                      log_weight_values)

# canonical experiment window: contains every generator's bounding box
# ([0,1] segment constructions and the unit-square product) with room for
# enclosing frames.  Dyadic origin and extent keep the dyadic-endpoint
# constructions (middle-halves product, fat Cantor gaps) exactly aligned
# with the node lattice at every resolution, so refinement trends are not
# polluted by alignment noise.
CANONICAL_ORIGIN = (-0.5, -0.5)
CANONICAL_EXTENT = 2.0

# battery coordinates are snapped to this lattice so they align with the
# nodes of every grid of n >= 17 over the canonical window
SNAP = CANONICAL_EXTENT / 16.0


def canonical_grid(n: int) -> Grid:
    return Grid(CANONICAL_ORIGIN, CANONICAL_EXTENT, n)


def _snap(v: float, up: bool) -> float:
    """Snap to the battery lattice (window origin plus multiples of SNAP),
    outward, clamped into the canonical window."""
    t = (v - CANONICAL_ORIGIN[0]) / SNAP
    k = math.ceil(t - 1e-9) if up else math.floor(t + 1e-9)
    k = min(max(k, 0), 16)
    return CANONICAL_ORIGIN[0] + k * SNAP


def _shift(v: float, move: bool) -> float:
    """Shift a battery coordinate one lattice step, clamped to the window."""
    if not move:
        return v
    return min(v + SNAP, CANONICAL_ORIGIN[0] + CANONICAL_EXTENT)


def make_battery(bbox: tuple[float, float, float, float]) -> tuple[Quadrilateral, ...]:
    """Six quadrilaterals probing a set with the given bounding box.

    Two crossings (horizontal and vertical marking), two offset crossings,
    and two enclosing frames scaled 1.5x and 2x around the bounding box.
    All corners snap outward to the battery lattice, so the marked sides
    stay clear of the set and every quadrilateral aligns with grid nodes.
    """
    bx0, bx1, by0, by1 = bbox
    if not (bx0 <= bx1 and by0 <= by1):
        raise ParameterError(f"bad bounding box {bbox}")
    w, hgt = bx1 - bx0, by1 - by0
    side = max(w, hgt, 2.0 * SNAP)
    cx, cy = (bx0 + bx1) / 2.0, (by0 + by1) / 2.0
    m = max(side / 4.0, 2.0 * SNAP)

    def rect(x0, x1, y0, y1):
        return (_snap(x0, False), _snap(x1, True), _snap(y0, False), _snap(y1, True))

    def inner(lo, hi, span):
        # transverse extent strictly inside the set's span, so connecting
        # curves must traverse the set when it separates the quadrilateral
        if span >= 4.0 * SNAP:
            return _snap(lo + span / 4.0, True), _snap(hi - span / 4.0, False)
        return _snap((lo + hi) / 2.0 - 2.0 * SNAP, False), \
            _snap((lo + hi) / 2.0 + 2.0 * SNAP, True)

    vx0, vx1 = inner(bx0, bx1, w)
    hy0, hy1 = inner(by0, by1, hgt)
    cross_v = (vx0, vx1, _snap(by0 - m, False), _snap(by1 + m, True))
    cross_h = (_snap(bx0 - m, False), _snap(bx1 + m, True), hy0, hy1)
    quads = [
        Quadrilateral(cross_h, Marking.HORIZONTAL, "crossing_h"),
        Quadrilateral(cross_v, Marking.VERTICAL, "crossing_v"),
        Quadrilateral(tuple(_shift(v, i < 2) for i, v in enumerate(cross_h)),
                      Marking.HORIZONTAL, "offset_h"),
        Quadrilateral(tuple(_shift(v, i >= 2) for i, v in enumerate(cross_v)),
                      Marking.VERTICAL, "offset_v"),
    ]
    for scale, name in ((1.5, "frame_1.5x"), (2.0, "frame_2x")):
        half = scale * side / 2.0
        quads.append(Quadrilateral(
            rect(cx - half, cx + half, cy - half, cy + half),
            Marking.HORIZONTAL, name))
    return tuple(quads)


def _check_sides_clear(q: Quadrilateral, grid: Grid, mask: PixelMask) -> None:
    box = region_indices(grid, q.rect)
    s0, s1 = _side_masks(grid.n, box, q.marking)
    if (mask.occupied & (s0 | s1)).any():
        raise GeometryError(
            f"marked sides of quadrilateral {q.name or q.rect} intersect the set")


@dataclass(frozen=True)
class DeficiencyCell:
    depth: int
    quad: str
    n: int
    mod_full: float
    mod_removed: float
    ratio: float
    flag: str = ""


@dataclass(frozen=True)
class DeficiencyReport:
    set_spec: CompactSetSpec
    depths: tuple[int, ...]
    battery: tuple[Quadrilateral, ...]
    resolutions: tuple[int, ...]
    cells: tuple[DeficiencyCell, ...]
    trends: dict = field(default_factory=dict)   # quad name -> trend word
    verdict: str = ""

    def to_json(self) -> str:
        payload = {
            "experiment": "deficiency",
            "set": repr(self.set_spec),
            "depths": list(self.depths),
            "battery": [{"name": q.name, "rect": list(q.rect),
                         "marking": q.marking.value} for q in self.battery],
            "resolutions": list(self.resolutions),
            "cells": [vars(c).copy() for c in self.cells],
            "trends": self.trends,
            "verdict": self.verdict,
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    def csv_rows(self):
        yield "set,depth,quad_id,n,mod_full,mod_removed,ratio"
        name = self.set_spec.kind.value
        for c in self.cells:
            yield (f"{name},{c.depth},{c.quad},{c.n},{c.mod_full!r},"
                   f"{c.mod_removed!r},{c.ratio!r}")


def _trend_word(values) -> str:
    if len(values) < 2:
        return "flat"
    d = values[-1] - values[-2]
    if d > 0:
        return "increasing"
    if d < 0:
        return "decreasing"
    return "flat"


def ab_deficiency(
    set_spec: CompactSetSpec,
    depths,
    battery,
    resolutions,
    grid_factory=canonical_grid,
) -> DeficiencyReport:
    """Deficiency ratios mod(removed) / mod(full) over a quadrilateral battery.

    Both moduli come from the conductance solver.  An empty rasterization
    removes nothing, so its ratio is recorded as exactly 1 without a
    second solve.
    """
    depths = tuple(int(d) for d in depths)
    resolutions = tuple(int(n) for n in resolutions)
    battery = tuple(battery)
    if not battery:
        raise ParameterError("battery must be nonempty")
    cells = []
    finals: dict[str, list[float]] = {q.name: [] for q in battery}
    for depth in depths:
        for q in battery:
            for n in resolutions:
                grid = grid_factory(n)
                mask = rasterize(set_spec, depth, grid)
                full = quad_modulus_conductance(q, grid)
                if mask.count == 0:
                    removed_value, ratio, flag = full.value, 1.0, "empty set"
                else:
                    _check_sides_clear(q, grid, mask)
                    removed = quad_modulus_conductance(q, grid, removed=mask)
                    removed_value, flag = removed.value, removed.flag
                    ratio = removed_value / full.value if full.value > 0 else math.inf
                cells.append(DeficiencyCell(depth, q.name, n, full.value,
                                            removed_value, ratio, flag))
                if depth == depths[-1]:
                    finals[q.name].append(ratio)
    trends = {name: _trend_word(vals) for name, vals in finals.items()}
    gap = any(vals and vals[-1] < 0.95 and _trend_word(vals) != "increasing"
              for vals in finals.values())
    verdict = "deficiency detected" if gap else "no counterexample found"
    return DeficiencyReport(set_spec, depths, battery, resolutions,
                            tuple(cells), trends, verdict)


@dataclass(frozen=True)
class ReciprocalityCell:
    quad: str
    n: int
    mod_primal: float
    mod_dual: float
    product: float
    converged: bool
    flag: str = ""


@dataclass(frozen=True)
class ReciprocalityReport:
    set_spec: CompactSetSpec
    weight: WeightSpec
    battery: tuple[Quadrilateral, ...]
    resolutions: tuple[int, ...]
    cells: tuple[ReciprocalityCell, ...]

    def to_json(self) -> str:
        payload = {
            "experiment": "reciprocality",
            "set": repr(self.set_spec),
            "weight": {"kind": self.weight.kind.value, "p": self.weight.p},
            "battery": [{"name": q.name, "rect": list(q.rect),
                         "marking": q.marking.value} for q in self.battery],
            "resolutions": list(self.resolutions),
            "cells": [vars(c).copy() for c in self.cells],
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    def csv_rows(self):
        yield "set,quad_id,n,mod_primal,mod_dual,product,converged"
        name = self.set_spec.kind.value
        for c in self.cells:
            yield (f"{name},{c.quad},{c.n},{c.mod_primal!r},{c.mod_dual!r},"
                   f"{c.product!r},{int(c.converged)}")

    def products_for(self, quad_name: str):
        return [c.product for c in self.cells if c.quad == quad_name]


def _weight_field(set_spec: CompactSetSpec, depth: int, grid: Grid,
                  weight: WeightSpec) -> ScalarField:
    mask = rasterize(set_spec, depth, grid)
    if mask.count == 0:
        return ScalarField(grid, np.ones((grid.n, grid.n)))
    return eval_weight(distance_transform(mask), weight)


def reciprocality_probe(
    set_spec: CompactSetSpec,
    weight: WeightSpec,
    battery,
    resolutions,
    depth: int = 0,
    grid_factory=canonical_grid,
    tol: float = 1e-3,
    max_paths: int = 5000,
) -> ReciprocalityReport:
    """Products mod(primal) * mod(dual) of weighted quadrilateral moduli.

    Both moduli come from the cutting-plane solver with the weight as
    length density and its square as area density.  Non-convergent cells
    are flagged and kept, never dropped.
    """
    battery = tuple(battery)
    resolutions = tuple(int(n) for n in resolutions)
    if not battery:
        raise ParameterError("battery must be nonempty")
    cells = []
    for q in battery:
        for n in resolutions:
            grid = grid_factory(n)
            omega = _weight_field(set_spec, depth, grid, weight)
            results: list[ModulusResult] = []
            for kind in (FamilyKind.QUAD_PRIMAL, FamilyKind.QUAD_DUAL):
                f = CurveFamilySpec(kind, grid, quad=q, length_weight=omega)
                results.append(family_modulus_cutting_plane(f, tol=tol,
                                                            max_paths=max_paths))
            rp, rd = results
            if math.isinf(rp.value) or math.isinf(rd.value):
                product = math.inf
            else:
                product = rp.value * rd.value
            flag = "; ".join(x for x in (rp.flag, rd.flag) if x)
            cells.append(ReciprocalityCell(q.name, n, rp.value, rd.value, product,
                                           rp.converged and rd.converged, flag))
    return ReciprocalityReport(set_spec, weight, battery, resolutions, tuple(cells))


@dataclass(frozen=True)
class QcDimensionCell:
    n: int
    depth: int
    euclidean: BoxDimensionResult
    weighted: BoxDimensionResult


@dataclass(frozen=True)
class QcDimensionReport:
    set_spec: CompactSetSpec
    cells: tuple[QcDimensionCell, ...]

    def to_json(self) -> str:
        payload = {
            "experiment": "qc_dimension",
            "set": repr(self.set_spec),
            "cells": [{
                "n": c.n,
                "depth": c.depth,
                "euclidean": {"slope": c.euclidean.slope,
                              "residual": c.euclidean.residual,
                              "scales": list(c.euclidean.scales),
                              "counts": list(c.euclidean.counts)},
                # weighted scales are natural logs of the ball radius
                "weighted": {"slope": c.weighted.slope,
                             "residual": c.weighted.residual,
                             "log_scales": list(c.weighted.scales),
                             "counts": list(c.weighted.counts)},
            } for c in self.cells],
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    def csv_rows(self):
        # weighted scales are natural logs of the ball radius
        yield "set,n,depth,metric,scale,count"
        name = self.set_spec.kind.value
        for c in self.cells:
            for metric, r in (("euclidean", c.euclidean), ("weighted", c.weighted)):
                for scale, count in r.rows():
                    yield f"{name},{c.n},{c.depth},{metric},{scale!r},{count}"


def _log_minimax_matrix(mask: PixelMask, logw: np.ndarray) -> np.ndarray:
    """Pairwise log-bottleneck distances among component representatives.

    The self-power weight separates consecutive gap levels of a Cantor
    construction by hundreds of orders of magnitude, so the cost of a path
    is dominated by its single most expensive gap crossing and true path
    sums underflow long before the hierarchy is exhausted.  The bottleneck
    (minimax edge) distance in the log domain keeps every level resolvable:
    it equals the single-linkage merge height over the minimum spanning
    tree of log edge costs.

    Returns a (k, k) matrix of log distances; -inf marks components merged
    through zero-weight corridors.
    """
    g = mask.grid
    n = g.n
    a, b, lf = edge_endpoints(n)
    lw = logw.ravel()
    lam = np.log(g.h * lf * 0.5) + np.logaddexp(lw[a], lw[b])
    finite = np.isfinite(lam)
    base = float(lam[finite].min()) if finite.any() else 0.0
    # strictly positive costs for the sparse representation: zero-weight
    # edges sit below every finite cost and merge first
    cost = np.where(finite, lam - base + 1.0, 0.5)
    mst = minimum_spanning_tree(
        sp.csr_matrix((cost, (a, b)), shape=(n * n, n * n))).tocoo()
    order = np.argsort(mst.data, kind="stable")

    reps = _component_representatives(mask)
    k = reps.size
    out = np.full((k, k), math.inf)
    np.fill_diagonal(out, -math.inf)
    parent = np.arange(n * n)

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    holders: dict[int, list[int]] = {}
    for i, r in enumerate(reps):
        holders.setdefault(find(int(r)), []).append(i)
    live = len(holders)
    mu, mv, mw = mst.row[order], mst.col[order], mst.data[order]
    for u, v, w in zip(mu, mv, mw):
        ru, rv = find(int(u)), find(int(v))
        if ru == rv:
            continue
        parent[ru] = rv
        hu, hv = holders.pop(ru, None), holders.pop(rv, None)
        if hu and hv:
            height = w - 1.0 + base if w >= 1.0 else -math.inf
            for i in hu:
                for j in hv:
                    out[i, j] = out[j, i] = height
            holders[find(int(v))] = hu + hv
            live -= 1
            if live == 1:
                break
        elif hu or hv:
            holders[find(int(v))] = hu or hv
    return out


def _log_scale_counts(lammat: np.ndarray, log_scales) -> BoxDimensionResult:
    """Greedy metric-ball counts over a log-distance matrix.

    Scales are natural logs of the ball radius; the regression of log count
    against -log scale is the usual box-count slope, carried out entirely
    in the log domain so radii far below floating underflow participate.
    """
    k = lammat.shape[0]
    eps = sorted((float(e) for e in set(log_scales)), reverse=True)
    counts = []
    for e in eps:
        remaining = np.ones(k, dtype=bool)
        balls = 0
        while remaining.any():
            rep = int(np.argmax(remaining))
            remaining &= ~(lammat[rep] <= e)
            balls += 1
        counts.append(balls)
    x = -np.asarray(eps)
    y = np.log(np.asarray(counts, dtype=float))
    if np.ptp(y) == 0.0:
        slope, resid = 0.0, 0.0
    else:
        coef = np.polyfit(x, y, 1)
        slope = float(coef[0])
        resid = float(np.sqrt(np.mean((y - np.polyval(coef, x)) ** 2)))
    return BoxDimensionResult(slope, resid, tuple(eps), tuple(counts))


def qc_dimension_experiment(
    set_spec: CompactSetSpec,
    depths,
    resolutions,
    grid_factory=canonical_grid,
    n_scales: int = 6,
) -> QcDimensionReport:
    """Weighted vs Euclidean box-dimension estimates across resolutions.

    Restricted to Cantor kinds (totally disconnected constructions).  The
    weighted counts use log-bottleneck distances and log-domain scales that
    span the whole resolved distance hierarchy, so the regression always
    sees every gap level the grid can separate.
    """
    if set_spec.kind not in CANTOR_KINDS:
        raise ParameterError(
            f"dimension experiment requires a totally disconnected Cantor kind, "
            f"got {set_spec.kind.value}")
    depths = tuple(int(d) for d in depths)
    resolutions = tuple(int(n) for n in resolutions)
    if len(depths) == 1:
        depths = depths * len(resolutions)
    if len(depths) != len(resolutions):
        raise ParameterError("depths must match resolutions in length (or be one value)")
    cells = []
    for depth, n in zip(depths, resolutions):
        grid = grid_factory(n)
        mask = rasterize(set_spec, depth, grid)
        extent = grid.extent
        eu_scales = [extent * 2.0 ** -j for j in range(2, 2 + n_scales)]
        eu = box_dimension(mask, eu_scales)
        logw = log_weight_values(distance_transform(mask),
                                 WeightSpec(WeightKind.SELF_POWER))
        lammat = _log_minimax_matrix(mask, logw)
        off = lammat[~np.eye(lammat.shape[0], dtype=bool)]
        finite = off[np.isfinite(off)]
        if finite.size == 0:
            # the whole rasterized set is a single metric point
            weighted = BoxDimensionResult(0.0, 0.0, (0.0, -1.0, -2.0), (1, 1, 1))
        else:
            # log scales span the entire resolved distance hierarchy; the
            # double-exponential decay of deep-gap crossing costs is what
            # drives the estimate toward zero with refinement
            hi, lo = float(finite.max()) + 1.0, float(finite.min()) - 1.0
            if hi - lo < 2.0 * math.log(4.0):
                lo = hi - 2.0 * math.log(4.0)
            weighted = _log_scale_counts(lammat,
                                         np.linspace(hi, lo, max(n_scales, 4)))
        cells.append(QcDimensionCell(n, depth, eu, weighted))
    return QcDimensionReport(set_spec, tuple(cells))
