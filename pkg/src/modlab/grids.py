"""Dyadic grids, occupancy masks, scalar fields, and their file formats.

A grid is a square array of n x n nodes (n = 2**k + 1) over an axis-aligned
square window.  Node (i, j) sits at ``origin + (i*h, j*h)`` with
``h = extent / (n - 1)``; i indexes x, j indexes y.  All value arrays are
shaped (n, n) and indexed ``[i, j]``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, GeometryError, ParameterError

MASK_MAGIC = "MODLAB-MASK v1"


def _is_pow2_plus_1(n: int) -> bool:
    m = n - 1
    return m >= 2 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Square node lattice over ``[ox, ox+extent] x [oy, oy+extent]``."""

    origin: tuple[float, float]
    extent: float
    n: int

    def __post_init__(self):
        if self.extent <= 0:
            raise ParameterError(f"extent must be > 0, got {self.extent}")
        if not _is_pow2_plus_1(self.n):
            raise ParameterError(f"n must be a power of two plus one (>= 3), got {self.n}")

    @property
    def h(self) -> float:
        return self.extent / (self.n - 1)

    def xs(self) -> np.ndarray:
        return self.origin[0] + self.h * np.arange(self.n)

    def ys(self) -> np.ndarray:
        return self.origin[1] + self.h * np.arange(self.n)

    def node_xy(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays X[i,j], Y[i,j] for every node."""
        return np.meshgrid(self.xs(), self.ys(), indexing="ij")

    def covers(self, x0: float, x1: float, y0: float, y1: float, tol: float = 1e-12) -> bool:
        ox, oy = self.origin
        e = self.extent
        return (ox - tol <= x0 and x1 <= ox + e + tol
                and oy - tol <= y0 and y1 <= oy + e + tol)

    def index_of(self, x: float, y: float) -> tuple[int, int]:
        """Nearest node index for a point inside the window."""
        i = int(round((x - self.origin[0]) / self.h))
        j = int(round((y - self.origin[1]) / self.h))
        return min(max(i, 0), self.n - 1), min(max(j, 0), self.n - 1)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class PixelMask:
    """Occupancy of a compact set on a grid: True iff the closed cell of side
    h centered at the node intersects the set."""

    grid: Grid
    occupied: np.ndarray = field(repr=False)

    def __post_init__(self):
        occ = np.asarray(self.occupied, dtype=bool)
        if occ.shape != (self.grid.n, self.grid.n):
            raise ParameterError(
                f"occupied must have shape {(self.grid.n, self.grid.n)}, got {occ.shape}")
        object.__setattr__(self, "occupied", _freeze(occ))

    @property
    def count(self) -> int:
        return int(self.occupied.sum())

    def __eq__(self, other):
        return (isinstance(other, PixelMask) and self.grid == other.grid
                and bool(np.array_equal(self.occupied, other.occupied)))


@dataclass(frozen=True)
class ScalarField:
    """Per-node real values on a grid (distance, weight, density, ...)."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n, self.grid.n):
            raise ParameterError(
                f"values must have shape {(self.grid.n, self.grid.n)}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ParameterError("values must be finite")
        object.__setattr__(self, "values", _freeze(v))

    def same_grid(self, other: "ScalarField | PixelMask") -> None:
        if self.grid != other.grid:
            raise ParameterError("fields must share the same grid")


def _fmt(x: float) -> str:
    return repr(float(x))


def save_mask(mask: PixelMask, path) -> None:
    """Write the ASCII mask format (header line + n rows of '0'/'1')."""
    g = mask.grid
    lines = [
        f"{MASK_MAGIC} n={g.n} origin={_fmt(g.origin[0])},{_fmt(g.origin[1])} "
        f"extent={_fmt(g.extent)},{_fmt(g.extent)} occupied={mask.count}"
    ]
    # row k holds j = k, characters indexed by i
    occ = mask.occupied
    for j in range(g.n):
        lines.append("".join("1" if occ[i, j] else "0" for i in range(g.n)))
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def load_mask(path) -> PixelMask:
    """Read a mask written by :func:`save_mask`; malformed input raises
    FormatError with the byte offset of the failure."""
    with open(path, "rb") as f:
        data = f.read()
    text = io.BytesIO(data)

    def fail(msg: str) -> FormatError:
        return FormatError(f"{msg} (byte offset {text.tell()})")

    header = text.readline().decode("ascii", errors="replace").rstrip("\n")
    if not header.startswith(MASK_MAGIC + " "):
        text.seek(0)
        raise fail(f"bad magic, expected {MASK_MAGIC!r}")
    fields = {}
    for tok in header[len(MASK_MAGIC) + 1:].split():
        if "=" not in tok:
            raise fail(f"bad header token {tok!r}")
        k, v = tok.split("=", 1)
        fields[k] = v
    try:
        n = int(fields["n"])
        ox, oy = (float(t) for t in fields["origin"].split(","))
        ex, ey = (float(t) for t in fields["extent"].split(","))
        declared = int(fields["occupied"])
    except (KeyError, ValueError) as exc:
        raise fail(f"bad header fields: {exc}") from None
    if abs(ex - ey) > 1e-12 * max(abs(ex), 1.0):
        raise fail("extent must be square")
    try:
        grid = Grid((ox, oy), ex, n)
    except ParameterError as exc:
        raise fail(str(exc)) from None
    occ = np.zeros((n, n), dtype=bool)
    for j in range(n):
        row = text.readline().decode("ascii", errors="replace").rstrip("\n")
        if len(row) != n or set(row) - {"0", "1"}:
            raise fail(f"bad row {j}: expected {n} characters in {{0,1}}")
        occ[:, j] = np.frombuffer(row.encode(), dtype=np.uint8) == ord("1")
    found = int(occ.sum())
    if found != declared:
        raise fail(f"occupied count mismatch: header says {declared}, rows give {found}")
    return PixelMask(grid, occ)


def save_field_pgm(field_: ScalarField, path) -> None:
    """16-bit ASCII PGM, linearly scaled; the scale is recorded in a comment."""
    v = field_.values
    lo, hi = float(v.min()), float(v.max())
    span = hi - lo
    if span == 0.0:
        scaled = np.zeros_like(v, dtype=np.uint16)
    else:
        scaled = np.round((v - lo) / span * 65535).astype(np.uint16)
    g = field_.grid
    with open(path, "w", newline="\n") as f:
        f.write("P2\n")
        f.write(f"# modlab field min={_fmt(lo)} max={_fmt(hi)} "
                f"origin={_fmt(g.origin[0])},{_fmt(g.origin[1])} extent={_fmt(g.extent)}\n")
        f.write(f"{g.n} {g.n}\n65535\n")
        # raster order: top image row is largest y
        for j in range(g.n - 1, -1, -1):
            f.write(" ".join(str(int(scaled[i, j])) for i in range(g.n)) + "\n")


def save_field_csv(field_: ScalarField, path) -> None:
    """CSV rows ``i,j,value`` with a grid-describing comment header."""
    g = field_.grid
    with open(path, "w", newline="\n") as f:
        f.write(f"# grid n={g.n} origin={_fmt(g.origin[0])},{_fmt(g.origin[1])} "
                f"extent={_fmt(g.extent)}\n")
        f.write("i,j,value\n")
        v = field_.values
        for i in range(g.n):
            for j in range(g.n):
                f.write(f"{i},{j},{_fmt(v[i, j])}\n")


def load_field_csv(path) -> ScalarField:
    with open(path) as f:
        header = f.readline().strip()
        if not header.startswith("# grid "):
            raise FormatError("missing grid header comment (byte offset 0)")
        fields = dict(tok.split("=", 1) for tok in header[len("# grid "):].split())
        n = int(fields["n"])
        ox, oy = (float(t) for t in fields["origin"].split(","))
        grid = Grid((ox, oy), float(fields["extent"]), n)
        line = f.readline()
        if line.strip() != "i,j,value":
            raise FormatError("missing i,j,value column header")
        v = np.zeros((n, n))
        seen = 0
        for line in f:
            if not line.strip():
                continue
            i_s, j_s, val = line.split(",")
            v[int(i_s), int(j_s)] = float(val)
            seen += 1
        if seen != n * n:
            raise FormatError(f"expected {n * n} rows, got {seen}")
    return ScalarField(grid, v)


def nodes_in_ball(grid: Grid, center: tuple[float, float], radius: float) -> np.ndarray:
    """Boolean (n, n) array of nodes within the closed Euclidean ball."""
    X, Y = grid.node_xy()
    return (X - center[0]) ** 2 + (Y - center[1]) ** 2 <= radius * radius + 1e-15


def require_ball_inside(grid: Grid, center: tuple[float, float], radius: float) -> None:
    ox, oy = grid.origin
    e = grid.extent
    if (center[0] - radius < ox - 1e-12 or center[0] + radius > ox + e + 1e-12
            or center[1] - radius < oy - 1e-12 or center[1] + radius > oy + e + 1e-12):
        raise GeometryError(
            f"ball of radius {radius} at {center} exits the grid window")
