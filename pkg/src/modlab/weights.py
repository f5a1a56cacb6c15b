"""Distance fields and degenerate conformal weights.

The distance field is the exact Euclidean distance from each node to the
nearest occupied node (not to the true underlying set; the gap is at most
h*sqrt(2)/2 and is recorded on the result).  Weights are evaluated
pointwise from the distance field and vanish exactly on occupied nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import ndimage

from .errors import DomainError, GeometryError, ParameterError
from .grids import PixelMask, ScalarField, nodes_in_ball, require_ball_inside

# Values of t**(1/t) below this are clamped to zero: the weight decays
# super-polynomially near the set and denormal arithmetic carries no
# information at grid scale.
UNDERFLOW_CLAMP = 1e-300


class WeightKind(str, Enum):
    # min{t**(1/t), 1}: squeezes distances near the set hard enough to
    # collapse its dimension in the induced path metric
    SELF_POWER = "self_power"
    # min{t**p, 1} comparison weights
    POWER = "power"
    # 1 off the set, 0 on it
    INDICATOR = "indicator"


@dataclass(frozen=True)
class WeightSpec:
    kind: WeightKind
    p: float | None = None

    def __post_init__(self):
        k = WeightKind(self.kind)
        object.__setattr__(self, "kind", k)
        if k is WeightKind.POWER and (self.p is None or self.p <= 0):
            raise ParameterError(f"p must be > 0 for the power weight, got {self.p}")


def distance_transform(mask: PixelMask) -> ScalarField:
    """Exact Euclidean distance from every node to the nearest occupied node.

    Uses the exact two-pass squared-distance transform; zero exactly on
    occupied nodes.  Raises DomainError on an empty mask.
    """
    if mask.count == 0:
        raise DomainError("distance to empty set undefined")
    d = ndimage.distance_transform_edt(~mask.occupied, sampling=mask.grid.h)
    return ScalarField(mask.grid, d)


def eval_weight(delta: ScalarField, spec: WeightSpec) -> ScalarField:
    """Pointwise weight from a distance field; zero exactly where delta is."""
    d = delta.values
    if np.any(d < 0):
        raise ParameterError("distance field must be nonnegative")
    if spec.kind is WeightKind.SELF_POWER:
        w = np.ones_like(d)
        pos = (d > 0) & (d < 1)
        # t**(1/t) = exp(log t / t), evaluated in log space to control underflow
        logw = np.log(d[pos]) / d[pos]
        vals = np.exp(np.maximum(logw, np.log(UNDERFLOW_CLAMP)))
        vals[logw < np.log(UNDERFLOW_CLAMP)] = 0.0
        w[pos] = vals
        w[d == 0] = 0.0
    elif spec.kind is WeightKind.POWER:
        w = np.minimum(d ** spec.p, 1.0)
    else:
        w = (d > 0).astype(float)
    return ScalarField(delta.grid, w)


def log_weight_values(delta: ScalarField, spec: WeightSpec) -> np.ndarray:
    """Natural log of the weight, computed without underflow.

    Returns a plain (n, n) array with -inf exactly where the weight
    vanishes; no clamping is applied, so magnitudes far below the floating
    underflow threshold of the weight itself stay meaningful.  Used by
    scale-separated estimators that work in the log domain.
    """
    d = delta.values
    if np.any(d < 0):
        raise ParameterError("distance field must be nonnegative")
    out = np.full(d.shape, -np.inf)
    if spec.kind is WeightKind.SELF_POWER:
        pos = (d > 0) & (d < 1)
        out[pos] = np.log(d[pos]) / d[pos]
        out[d >= 1] = 0.0
    elif spec.kind is WeightKind.POWER:
        pos = d > 0
        out[pos] = np.minimum(spec.p * np.log(d[pos]), 0.0)
    else:
        out[d > 0] = 0.0
    return out


def weight_bound_check(
    omega: ScalarField,
    delta: ScalarField,
    p: float,
    center: tuple[float, float],
    radius: float,
    tol: float = 1e-12,
) -> bool:
    """True iff omega <= delta**p + tol on every node of the closed ball.

    Requires radius < 1/p < 1 (the regime where t**(1/t) < t**p holds for
    t below the radius).
    """
    omega.same_grid(delta)
    if not (radius < 1.0 / p < 1.0):
        raise ParameterError(
            f"need radius < 1/p < 1, got radius={radius}, p={p}")
    require_ball_inside(delta.grid, center, radius)
    ball = nodes_in_ball(delta.grid, center, radius)
    if not ball.any():
        raise GeometryError("ball contains no grid nodes")
    return bool(np.all(omega.values[ball] <= delta.values[ball] ** p + tol))
