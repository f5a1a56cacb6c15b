"""Independent reference computations used by the test suite.

Everything here is deliberately naive: exhaustive path enumeration, dense
quadratic programming through cvxpy, brute-force distance scans.  The
implementations share no code with the package solvers beyond the public
constants that define the discretization (trapezoid edge lengths, boundary
area fractions).
"""

import math

import cvxpy as cp
import numpy as np

from modlab.modulus import _boundary_area_fractions

SQRT2 = math.sqrt(2.0)


def simple_paths(n, active, sources, targets, cap=100000):
    """All simple 8-connected source-to-target paths as flat-id lists."""
    tset, sset = set(int(t) for t in targets), set(int(s) for s in sources)
    paths = []

    def nbrs(u):
        i, j = divmod(u, n)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == 0 and dj == 0:
                    continue
                ii, jj = i + di, j + dj
                if 0 <= ii < n and 0 <= jj < n and active[ii, jj]:
                    yield ii * n + jj

    def dfs(u, visited, path):
        if len(paths) > cap:
            raise RuntimeError("path enumeration exceeded its cap")
        if u in tset:
            paths.append(list(path))
            return
        for v in nbrs(u):
            if v not in visited and v not in sset:
                visited.add(v)
                path.append(v)
                dfs(v, visited, path)
                path.pop()
                visited.remove(v)

    for s in sorted(sset):
        if active[divmod(s, n)]:
            dfs(s, {s}, [s])
    return paths


def path_constraint_row(n, h, path, free_flat):
    """Trapezoid length coefficients of one path, skipping free nodes."""
    row = np.zeros(n * n)
    for u, v in zip(path, path[1:]):
        iu, ju = divmod(u, n)
        iv, jv = divmod(v, n)
        ln = h * (SQRT2 if (iu != iv and ju != jv) else 1.0)
        if not free_flat[u]:
            row[u] += ln * 0.5
        if not free_flat[v]:
            row[v] += ln * 0.5
    return row


def exhaustive_modulus(n, h, active, sources, targets, free=None):
    """Exact modulus of a 5x5-scale family by full path enumeration + QP.

    Returns (value, path count).  ``free`` marks zero-weight nodes that
    contribute neither length nor area.
    """
    free_flat = (np.zeros((n, n), dtype=bool) if free is None else free).ravel()
    paths = simple_paths(n, active, sources, targets)
    area = (_boundary_area_fractions(n, (0, n - 1, 0, n - 1)) * h * h).ravel()
    area[free_flat] = 0.0
    C = np.array([path_constraint_row(n, h, p, free_flat) for p in paths])
    sig = cp.Variable(n * n, nonneg=True)
    prob = cp.Problem(cp.Minimize(cp.sum(cp.multiply(area, cp.square(sig)))),
                      [C @ sig >= 1])
    prob.solve(solver=cp.CLARABEL)
    if prob.status != cp.OPTIMAL:
        raise RuntimeError(f"oracle QP ended with status {prob.status}")
    return float(prob.value), len(paths)


def minimax_log_distances(n, log_edge_cost_fn):
    """All-pairs minimax (bottleneck) path costs by Floyd-Warshall.

    ``log_edge_cost_fn(u, v)`` gives the log cost of the 8-neighbor edge
    (u, v); the path cost is the maximum edge log cost, minimized over
    paths.  O(n^6), for small grids only.
    """
    big = math.inf
    d = np.full((n * n, n * n), big)
    np.fill_diagonal(d, -big)
    for u in range(n * n):
        i, j = divmod(u, n)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == 0 and dj == 0:
                    continue
                ii, jj = i + di, j + dj
                if 0 <= ii < n and 0 <= jj < n:
                    v = ii * n + jj
                    c = log_edge_cost_fn(u, v)
                    if c < d[u, v]:
                        d[u, v] = d[v, u] = c
    for k in range(n * n):
        np.minimum(d, np.maximum(d[:, k:k + 1], d[k:k + 1, :]), out=d)
    return d
