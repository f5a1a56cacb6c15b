"""modlab: a numerical laboratory for planar removability experiments.

Core objects: dyadic grids and masks, generator-described compact sets,
degenerate conformal weights, the induced path metric, discrete 2-modulus
solvers, Hausdorff content and box-dimension estimators, and the three
batch experiments tying them together.
"""

from .config import ExperimentConfig, SolverSettings, load_config
from .errors import (DomainError, FormatError, GeometryError, ModlabError,
                     NumericError, ParameterError)
from .experiments import (DeficiencyReport, QcDimensionReport,
                          ReciprocalityReport, ab_deficiency, canonical_grid,
                          make_battery, qc_dimension_experiment,
                          reciprocality_probe)
from .grids import (Grid, PixelMask, ScalarField, load_field_csv, load_mask,
                    save_field_csv, save_field_pgm, save_mask)
from .hausdorff import (BoxDimensionResult, HausdorffQuery, MetricKind,
                        box_dimension, connected_content_identity_check,
                        content_upper)
from .metric import (DistanceField, MetricGraph, ball_distance_excess, build,
                     distance_between, shortest_distances, weighted_diameter)
from .modulus import (CurveFamilySpec, FamilyKind, Marking, ModulusResult,
                      Quadrilateral, annulus_modulus,
                      family_modulus_cutting_plane, quad_modulus_conductance,
                      small_ball_decay)
from .sets import CompactSetSpec, Generation, SetKind, generate, rasterize
from .weights import (WeightKind, WeightSpec, distance_transform, eval_weight,
                      log_weight_values, weight_bound_check)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
