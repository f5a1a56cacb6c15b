"""Discrete 2-modulus of curve families on grid domains.

Two solvers with disjoint strengths:

* ``quad_modulus_conductance`` -- the classical identity between the
  modulus of the connecting family of a quadrilateral and the Dirichlet
  energy of the harmonic potential with unit drop across the marked sides.
  Fast and exact at the discrete level for unweighted domains; removed
  nodes are deleted from the network.

* ``family_modulus_cutting_plane`` -- direct optimization of the defining
  program: minimize the density energy subject to every connecting path
  having unit density-length.  Paths are generated lazily as most-violated
  constraints (shortest density-length paths); handles removed sets,
  degenerate length weights, and arbitrary source/target families.

Cross-validation between the two is itself a test of both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse as sp
from scipy import ndimage
from scipy.sparse.csgraph import dijkstra
from scipy.sparse.linalg import cg

from .errors import DomainError, GeometryError, NumericError, ParameterError
from .grids import Grid, PixelMask, ScalarField, nodes_in_ball, require_ball_inside
from .metric import SQRT2, edge_endpoints

CG_RTOL = 1e-10
CUT_TOL = 1e-3
MAX_PATHS = 5000
# violated targets picked per constraint-generation round (spread evenly
# over the target side); keeps rounds few without burning the path budget
PATHS_PER_ROUND = 16


class Marking(str, Enum):
    """Which pair of opposite sides the connecting family joins."""
    HORIZONTAL = "horizontal"   # left <-> right
    VERTICAL = "vertical"       # bottom <-> top


@dataclass(frozen=True)
class Quadrilateral:
    """Axis-aligned rectangle with a cyclic side marking.

    With horizontal marking the connecting family joins the left and right
    sides; the dual family joins bottom and top.  ``dual()`` swaps them.
    """

    rect: tuple[float, float, float, float]   # (x0, x1, y0, y1)
    marking: Marking = Marking.HORIZONTAL
    name: str = ""

    def __post_init__(self):
        x0, x1, y0, y1 = self.rect
        if not (x0 < x1 and y0 < y1):
            raise ParameterError(f"rect must satisfy x0 < x1 and y0 < y1, got {self.rect}")
        object.__setattr__(self, "marking", Marking(self.marking))

    def dual(self) -> "Quadrilateral":
        m = Marking.VERTICAL if self.marking is Marking.HORIZONTAL else Marking.HORIZONTAL
        return Quadrilateral(self.rect, m, self.name + "*" if self.name else "")


@dataclass(frozen=True)
class ModulusResult:
    value: float
    rho: ScalarField | None
    iterations: int
    certificate: float
    solver: str
    tolerance: float
    converged: bool = True
    flag: str = ""

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "iterations": self.iterations,
            "certificate": self.certificate,
            "solver": self.solver,
            "grid_n": self.rho.grid.n if self.rho is not None else None,
            "tolerance": self.tolerance,
            "converged": self.converged,
            "flag": self.flag,
        }


def region_indices(grid: Grid, rect: tuple[float, float, float, float]) -> tuple[int, int, int, int]:
    """Inclusive node-index rectangle for a real rectangle; the rectangle
    must align with grid nodes."""
    x0, x1, y0, y1 = rect
    h = grid.h
    out = []
    for val, org in ((x0, grid.origin[0]), (x1, grid.origin[0]),
                     (y0, grid.origin[1]), (y1, grid.origin[1])):
        t = (val - org) / h
        k = round(t)
        if abs(t - k) > 1e-9 * max(1.0, abs(t)):
            raise GeometryError(f"rectangle coordinate {val} does not align with grid nodes")
        if not (0 <= k <= grid.n - 1):
            raise GeometryError(f"rectangle coordinate {val} lies outside the grid")
        out.append(int(k))
    i0, i1, j0, j1 = out
    if not (i0 < i1 and j0 < j1):
        raise GeometryError(f"degenerate index rectangle {out}")
    return i0, i1, j0, j1


def _side_masks(n: int, box: tuple[int, int, int, int], marking: Marking):
    i0, i1, j0, j1 = box
    s0 = np.zeros((n, n), dtype=bool)
    s1 = np.zeros((n, n), dtype=bool)
    if marking is Marking.HORIZONTAL:
        s0[i0, j0:j1 + 1] = True
        s1[i1, j0:j1 + 1] = True
    else:
        s0[i0:i1 + 1, j0] = True
        s1[i0:i1 + 1, j1] = True
    return s0, s1


def _region_mask(n: int, box: tuple[int, int, int, int]) -> np.ndarray:
    i0, i1, j0, j1 = box
    m = np.zeros((n, n), dtype=bool)
    m[i0:i1 + 1, j0:j1 + 1] = True
    return m


def _connected(active: np.ndarray, s0: np.ndarray, s1: np.ndarray, connectivity: int) -> bool:
    structure = ndimage.generate_binary_structure(2, connectivity)
    labels, _ = ndimage.label(active, structure=structure)
    return bool(np.intersect1d(labels[s0 & active], labels[s1 & active]).size)


def _dirichlet_energy(grid, box, active, dir0, dir1, rtol, maxiter=None):
    """Solve the 5-point Laplace problem on the active region with unit
    potential drop and return (energy, potential, cg_iterations).

    Edge conductance is 1 in the interior and 1/2 along the region boundary
    (half-cell transverse extent), which makes uniform rectangles exact.
    """
    n = grid.n
    i0, i1, j0, j1 = box
    u = np.zeros((n, n))
    u[dir1] = 1.0
    fixed = dir0 | dir1
    free = active & ~fixed
    nfree = int(free.sum())
    idx = -np.ones((n, n), dtype=np.int64)
    idx[free] = np.arange(nfree)

    def edges():
        # horizontal (along x) then vertical (along y) nearest-neighbor edges
        for axis in (0, 1):
            if axis == 0:
                a_i, a_j = np.meshgrid(np.arange(i0, i1), np.arange(j0, j1 + 1), indexing="ij")
                b_i, b_j = a_i + 1, a_j
                c = np.where((a_j == j0) | (a_j == j1), 0.5, 1.0)
            else:
                a_i, a_j = np.meshgrid(np.arange(i0, i1 + 1), np.arange(j0, j1), indexing="ij")
                b_i, b_j = a_i, a_j + 1
                c = np.where((a_i == i0) | (a_i == i1), 0.5, 1.0)
            ok = active[a_i, a_j] & active[b_i, b_j]
            yield a_i[ok], a_j[ok], b_i[ok], b_j[ok], c[ok]

    if nfree == 0:
        energy = 0.0
        for ai, aj, bi, bj, c in edges():
            d = u[bi, bj] - u[ai, aj]
            energy += float(np.sum(c * d * d))
        return energy, u, 0

    diag = np.zeros(nfree)
    b_rhs = np.zeros(nfree)
    rows, cols, vals = [], [], []
    for ai, aj, bi, bj, c in edges():
        fa = free[ai, aj]
        fb = free[bi, bj]
        ka = idx[ai, aj]
        kb = idx[bi, bj]
        both = fa & fb
        rows += [ka[both], kb[both]]
        cols += [kb[both], ka[both]]
        vals += [-c[both], -c[both]]
        np.add.at(diag, ka[fa], c[fa])
        np.add.at(diag, kb[fb], c[fb])
        m = fa & ~fb
        np.add.at(b_rhs, ka[m], c[m] * u[bi[m], bj[m]])
        m = fb & ~fa
        np.add.at(b_rhs, kb[m], c[m] * u[ai[m], aj[m]])
    A = sp.csr_matrix(
        (np.concatenate(vals + [diag]),
         (np.concatenate(rows + [np.arange(nfree)]),
          np.concatenate(cols + [np.arange(nfree)]))),
        shape=(nfree, nfree),
    )
    dinv = A.diagonal()
    dinv[dinv == 0] = 1.0
    M = sp.diags(1.0 / dinv)
    iters = 0

    def count(_):
        nonlocal iters
        iters += 1

    maxiter = maxiter if maxiter is not None else 10 * n * n
    x, info = cg(A, b_rhs, rtol=rtol, atol=0.0, maxiter=maxiter, M=M, callback=count)
    if info != 0:
        raise NumericError(f"conjugate gradient did not converge (info={info})")
    u[free] = x
    energy = 0.0
    for ai, aj, bi, bj, c in edges():
        d = u[bi, bj] - u[ai, aj]
        energy += float(np.sum(c * d * d))
    return energy, u, iters


def _gradient_density(grid, box, active, u) -> ScalarField:
    """|grad u| per node inside the active region (diagnostic density)."""
    n = grid.n
    h = grid.h
    i0, i1, j0, j1 = box
    sub = u[i0:i1 + 1, j0:j1 + 1].copy()
    gx, gy = np.gradient(sub, h, edge_order=1)
    rho = np.zeros((n, n))
    rho[i0:i1 + 1, j0:j1 + 1] = np.hypot(gx, gy)
    rho[~active] = 0.0
    return ScalarField(grid, rho)


def _min_density_length(grid, active, rho_flat, src_flat, dst_flat) -> float:
    """Shortest trapezoid-quadrature rho-length over 8-connected active paths."""
    n = grid.n
    a, b, lf = edge_endpoints(n)
    act = active.ravel()
    keep = act[a] & act[b]
    a, b, lf = a[keep], b[keep], lf[keep]
    cost = lf * grid.h * 0.5 * (rho_flat[a] + rho_flat[b])
    m = sp.csr_matrix(
        (np.concatenate([cost, cost]),
         (np.concatenate([a, b]), np.concatenate([b, a]))),
        shape=(n * n, n * n),
    )
    src = np.flatnonzero(src_flat & act)
    dst = np.flatnonzero(dst_flat & act)
    if src.size == 0 or dst.size == 0:
        return math.inf
    d = dijkstra(m, directed=False, indices=src, min_only=True)
    return float(d[dst].min())


def quad_modulus_conductance(
    q: Quadrilateral,
    grid: Grid,
    removed: PixelMask | None = None,
    cg_rtol: float = CG_RTOL,
) -> ModulusResult:
    """Modulus of the connecting family of a marked rectangle.

    Removed nodes are deleted from the network; if they disconnect the
    marked sides the family contains no admissible curve and the modulus
    is 0 (flagged on the result).
    """
    box = region_indices(grid, q.rect)
    n = grid.n
    region = _region_mask(n, box)
    active = region.copy()
    if removed is not None:
        if removed.grid != grid:
            raise ParameterError("removed mask must live on the solve grid")
        active &= ~removed.occupied
    dir0, dir1 = _side_masks(n, box, q.marking)
    if not (dir0 & active).any() or not (dir1 & active).any():
        raise DomainError("a marked side is fully covered by removed nodes")
    if not _connected(active, dir0, dir1, connectivity=1):
        return ModulusResult(0.0, None, 0, math.inf, "conductance", cg_rtol,
                             flag="family of no rectifiable admissible curves")
    energy, u, iters = _dirichlet_energy(grid, box, active, dir0 & active, dir1 & active, cg_rtol)
    rho = _gradient_density(grid, box, active, u)
    cert = _min_density_length(grid, active, rho.values.ravel(),
                               (dir0 & active).ravel(), (dir1 & active).ravel())
    return ModulusResult(energy, rho, iters, cert, "conductance", cg_rtol)


def annulus_modulus(
    center: tuple[float, float],
    r: float,
    R: float,
    grid: Grid,
    cg_rtol: float = CG_RTOL,
) -> ModulusResult:
    """Modulus of the family joining the boundary circles of an annulus.

    Continuum value: 2*pi / log(R/r).  Inner Dirichlet zone: nodes within
    r of the center; outer: nodes at distance >= R.
    """
    if not (0 < r < R):
        raise ParameterError(f"need 0 < r < R, got r={r}, R={R}")
    if r <= 2 * grid.h:
        raise GeometryError(f"inner radius {r} must exceed 2h = {2 * grid.h}")
    require_ball_inside(grid, center, R)
    n = grid.n
    box = (0, n - 1, 0, n - 1)
    active = np.ones((n, n), dtype=bool)
    inner = nodes_in_ball(grid, center, r)
    X, Y = grid.node_xy()
    outer = (X - center[0]) ** 2 + (Y - center[1]) ** 2 >= R * R - 1e-15
    energy, u, iters = _dirichlet_energy(grid, box, active, inner, outer, cg_rtol)
    rho = _gradient_density(grid, box, active, u)
    cert = _min_density_length(grid, active, rho.values.ravel(),
                               inner.ravel(), outer.ravel())
    return ModulusResult(energy, rho, iters, cert, "conductance", cg_rtol)


def small_ball_decay(
    mask: PixelMask,
    center: tuple[float, float],
    r: float,
    R: float,
    cg_rtol: float = CG_RTOL,
) -> ModulusResult:
    """Modulus of the family joining an occupied set to a small ball.

    Requires the closed ball of radius R around the center to be disjoint
    from the occupied set; the value is bounded by the annulus modulus
    2*pi / log(R/r) and decays as r shrinks.
    """
    grid = mask.grid
    if mask.count == 0:
        raise DomainError("occupied set is empty")
    if not (0 < r < R):
        raise ParameterError(f"need 0 < r < R, got r={r}, R={R}")
    require_ball_inside(grid, center, r)
    big = nodes_in_ball(grid, center, R)
    if (big & mask.occupied).any():
        raise ParameterError(f"ball of radius R={R} intersects the occupied set")
    n = grid.n
    box = (0, n - 1, 0, n - 1)
    active = np.ones((n, n), dtype=bool)
    small = nodes_in_ball(grid, center, r)
    energy, u, iters = _dirichlet_energy(grid, box, active, mask.occupied, small, cg_rtol)
    rho = _gradient_density(grid, box, active, u)
    cert = _min_density_length(grid, active, rho.values.ravel(),
                               mask.occupied.ravel(), small.ravel())
    return ModulusResult(energy, rho, iters, cert, "conductance", cg_rtol)


class FamilyKind(str, Enum):
    QUAD_PRIMAL = "quad_primal"
    QUAD_DUAL = "quad_dual"
    ANNULUS = "annulus"
    CUSTOM = "custom"


@dataclass(frozen=True)
class CurveFamilySpec:
    """A connecting curve family for the cutting-plane solver.

    ``length_weight``, when given, measures admissibility in the weighted
    length (the per-edge quadrature of rho * omega) and the energy in the
    matching omega**2 area density.  Curves must avoid ``removed`` nodes.
    """

    kind: FamilyKind
    grid: Grid
    quad: Quadrilateral | None = None
    center: tuple[float, float] | None = None
    radii: tuple[float, float] | None = None
    sources: tuple | None = None   # iterables of (i, j) pairs for kind custom
    targets: tuple | None = None
    removed: PixelMask | None = None
    length_weight: ScalarField | None = None

    def __post_init__(self):
        k = FamilyKind(self.kind)
        object.__setattr__(self, "kind", k)
        if k in (FamilyKind.QUAD_PRIMAL, FamilyKind.QUAD_DUAL) and self.quad is None:
            raise ParameterError("quad is required for quadrilateral families")
        if k is FamilyKind.ANNULUS:
            if self.center is None or self.radii is None:
                raise ParameterError("center and radii are required for annulus families")
            r, R = self.radii
            if not (0 < r < R):
                raise ParameterError(f"need radii r < R, got {self.radii}")
        if k is FamilyKind.CUSTOM and (not self.sources or not self.targets):
            raise ParameterError("sources and targets are required for custom families")


def _family_endpoints(f: CurveFamilySpec):
    """(box, src_mask, dst_mask) for a family spec."""
    n = f.grid.n
    if f.kind in (FamilyKind.QUAD_PRIMAL, FamilyKind.QUAD_DUAL):
        q = f.quad if f.kind is FamilyKind.QUAD_PRIMAL else f.quad.dual()
        box = region_indices(f.grid, q.rect)
        s0, s1 = _side_masks(n, box, q.marking)
        return box, s0, s1
    if f.kind is FamilyKind.ANNULUS:
        r, R = f.radii
        require_ball_inside(f.grid, f.center, R)
        s0 = nodes_in_ball(f.grid, f.center, r)
        X, Y = f.grid.node_xy()
        s1 = (X - f.center[0]) ** 2 + (Y - f.center[1]) ** 2 >= R * R - 1e-15
        return (0, n - 1, 0, n - 1), s0, s1
    s0 = np.zeros((n, n), dtype=bool)
    s1 = np.zeros((n, n), dtype=bool)
    for i, j in f.sources:
        s0[i, j] = True
    for i, j in f.targets:
        s1[i, j] = True
    return (0, n - 1, 0, n - 1), s0, s1


def _boundary_area_fractions(n: int, box: tuple[int, int, int, int]) -> np.ndarray:
    i0, i1, j0, j1 = box
    frac = np.zeros((n, n))
    frac[i0:i1 + 1, j0:j1 + 1] = 1.0
    frac[i0, j0:j1 + 1] *= 0.5
    frac[i1, j0:j1 + 1] *= 0.5
    frac[i0:i1 + 1, j0] *= 0.5
    frac[i0:i1 + 1, j1] *= 0.5
    return frac


def _solve_master(n, paths_idx, paths_co, half_inv_area, lam, inner_tol):
    """Solve the restricted quadratic master exactly by dual active sets.

    Minimizes sum(area * sigma**2) subject to the collected path
    constraints C sigma >= 1.  Stationarity gives sigma as a nonnegative
    combination of the constraint rows scaled by 1 / (2 * area), so the
    active constraints satisfy the dense system G lam = 1 with Gram matrix
    G_ij = sum(c_i * c_j / (2 * area)).  Constraints enter when violated
    and leave when their multiplier goes negative.
    """
    p_total = len(paths_idx)
    rows = np.repeat(np.arange(p_total), [len(ix) for ix in paths_idx])
    cols = np.concatenate(paths_idx)
    vals = np.concatenate(paths_co)
    C = sp.csr_matrix((vals, (rows, cols)), shape=(p_total, n * n))
    Ch = C.multiply(half_inv_area[None, :]).tocsr()   # rows scaled by 1/(2 area)
    # warm start: previously active constraints plus all freshly added ones
    work = sorted(set(np.flatnonzero(lam > 0.0)) | set(range(len(lam), p_total))
                  or {p_total - 1})
    ones = np.ones(p_total)
    for _ in range(4 * p_total + 16):
        W = np.array(work, dtype=np.int64)
        G = (Ch[W] @ C[W].T).toarray()
        G[np.diag_indices_from(G)] += 1e-12 * max(G.max(), 1.0)
        try:
            lw = np.linalg.solve(G, ones[: W.size])
        except np.linalg.LinAlgError:
            lw = np.linalg.lstsq(G, ones[: W.size], rcond=None)[0]
        if lw.min() < -1e-12:
            work.pop(int(np.argmin(lw)))
            continue
        sigma = Ch[W].T @ lw
        slack = 1.0 - C @ sigma
        slack[W] = 0.0
        worst = int(np.argmax(slack))
        if slack[worst] <= inner_tol:
            lam = np.zeros(p_total)
            lam[W] = np.maximum(lw, 0.0)
            return sigma, lam
        work.append(worst)
        work.sort()
    raise NumericError("restricted master active-set iteration did not terminate")


def family_modulus_cutting_plane(
    f: CurveFamilySpec,
    tol: float = CUT_TOL,
    max_paths: int = MAX_PATHS,
) -> ModulusResult:
    """Cutting-plane optimization of the modulus program for a curve family.

    Iterates: find the minimum density-length connecting path; if its
    length is >= 1 - tol stop, otherwise add its admissibility constraint
    and re-solve the restricted quadratic program by projected coordinate
    ascent on the dual.  Never returns a silent wrong answer: hitting the
    path cap yields ``converged=False`` with the best value found.

    With a length weight w the optimization runs in the substituted
    variable sigma = rho * w, which leaves the program identical to the
    unweighted one except that nodes with w == 0 contribute neither length
    nor area (free passage across the degenerate set).
    """
    grid = f.grid
    n = grid.n
    h = grid.h
    box, s0, s1 = _family_endpoints(f)
    region = _region_mask(n, box)
    active = region.copy()
    if f.removed is not None:
        if f.removed.grid != grid:
            raise ParameterError("removed mask must live on the solve grid")
        active &= ~f.removed.occupied
        if (f.removed.occupied & (s0 | s1)).any():
            raise ParameterError("removed nodes overlap the source or target set")
    s0 &= active
    s1 &= active
    if not s0.any() or not s1.any():
        raise DomainError("source or target set is empty after removal")
    if (s0 & s1).any():
        return ModulusResult(math.inf, None, 0, 0.0, "cutting_plane", tol,
                             flag="zero-length admissible curve exists")

    if f.length_weight is not None:
        if f.length_weight.grid != grid:
            raise ParameterError("length_weight must live on the solve grid")
        free = (f.length_weight.values == 0.0) & active
    else:
        free = np.zeros((n, n), dtype=bool)

    # a source/target touching the degenerate set can be reached at zero
    # length from anywhere inside the free component; treated like any node
    area = (_boundary_area_fractions(n, box) * h * h).ravel()
    area[free.ravel()] = 0.0
    act = active.ravel()
    frf = free.ravel()

    a, b, lf = edge_endpoints(n)
    keep = act[a] & act[b]
    a, b, lf = a[keep], b[keep], lf[keep]
    # per-endpoint trapezoid length coefficient; zero at free nodes
    coef_a = np.where(frf[a], 0.0, lf * h * 0.5)
    coef_b = np.where(frf[b], 0.0, lf * h * 0.5)
    rows = np.concatenate([a, b])
    cols = np.concatenate([b, a])

    src = np.flatnonzero(s0.ravel())
    dst = np.flatnonzero(s1.ravel())
    dst_mask = np.zeros(n * n, dtype=bool)
    dst_mask[dst] = True

    sigma = np.zeros(n * n)
    paths_idx: list[np.ndarray] = []
    paths_co: list[np.ndarray] = []
    lam = np.zeros(0)
    cert = 0.0
    converged = False
    it = 0
    inner_tol = tol * 1e-3
    half_inv_area = np.divide(0.5, area, out=np.zeros_like(area), where=area > 0)

    for it in range(1, max_paths + 1):
        cost = np.maximum(coef_a * sigma[a] + coef_b * sigma[b], 0.0)
        m = sp.csr_matrix((np.concatenate([cost, cost]), (rows, cols)), shape=(n * n, n * n))
        dist, pred, srcs_of = dijkstra(m, directed=False, indices=src,
                                       min_only=True, return_predecessors=True)
        reach = dst_mask & np.isfinite(dist)
        if not reach.any():
            return ModulusResult(0.0, None, it, math.inf, "cutting_plane", tol,
                                 flag="family of no rectifiable admissible curves")
        reach_ids = np.flatnonzero(reach)
        cert = float(dist[reach_ids].min())
        if cert >= 1.0 - tol:
            converged = True
            break
        # per round, harvest node-disjoint shortest-path-tree paths across a
        # spread of violated targets: disjointness makes each constraint cut
        # into a different part of the domain, so rounds stay few
        violated = reach_ids[dist[reach_ids] < 1.0 - tol]
        used = np.zeros(n * n, dtype=bool)
        fresh = 0
        for t in violated[np.argsort(dist[violated], kind="stable")]:
            path = [int(t)]
            while pred[path[-1]] >= 0:
                path.append(int(pred[path[-1]]))
            path.reverse()
            if used[path].any():
                continue
            used[path] = True
            co: dict[int, float] = {}
            for u, v in zip(path, path[1:]):
                iu, ju = divmod(u, n)
                iv, jv = divmod(v, n)
                ln = h * (SQRT2 if (iu != iv and ju != jv) else 1.0)
                if not frf[u]:
                    co[u] = co.get(u, 0.0) + ln * 0.5
                if not frf[v]:
                    co[v] = co.get(v, 0.0) + ln * 0.5
            if not co:
                # the path runs entirely through weight-degenerate nodes: it
                # has zero length under every density, so no density is
                # admissible
                return ModulusResult(math.inf, None, it, 0.0, "cutting_plane", tol,
                                     flag="zero-length admissible curve exists")
            ids = np.fromiter(co.keys(), dtype=np.int64, count=len(co))
            paths_idx.append(ids)
            paths_co.append(np.fromiter(co.values(), dtype=float, count=len(co)))
            fresh += 1
            if len(paths_idx) >= max_paths or fresh >= PATHS_PER_ROUND:
                break
        sigma, lam = _solve_master(n, paths_idx, paths_co, half_inv_area, lam, inner_tol)
        if len(paths_idx) >= max_paths:
            break

    value = float(np.sum(sigma * sigma * area))
    if f.length_weight is not None:
        w = f.length_weight.values.ravel()
        rho_flat = np.divide(sigma, w, out=np.zeros_like(sigma), where=w > 0)
    else:
        rho_flat = sigma
    rho = ScalarField(grid, rho_flat.reshape(n, n))
    flag = "" if converged else "not converged"
    return ModulusResult(value, rho, len(lam), cert, "cutting_plane", tol,
                         converged=converged, flag=flag)
