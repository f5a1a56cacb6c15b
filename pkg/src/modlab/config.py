"""Experiment configuration: plain key=value sections, strictly validated.

A config drives one batch run.  Sections:

* ``[set]``: kind plus its generator parameters, and the depth list.
* ``[weight]``: kind and optional exponent p.
* ``[grid]``: resolutions (strictly increasing powers of two plus one).
* ``[experiments]``: which of deficiency / reciprocality / dimension to run,
  plus per-experiment resolution overrides.
* ``[solver]``: tolerance overrides.
* ``[output]``: directory and heatmap flag.

The only environment override honored anywhere is MODLAB_OUT for the
output directory; everything else must be in the file so a config fully
determines a run.
"""

from __future__ import annotations

import configparser
import os
from fractions import Fraction
from dataclasses import dataclass, field

from .errors import ParameterError
from .grids import load_mask
from .modulus import CG_RTOL, CUT_TOL, MAX_PATHS
from .sets import CompactSetSpec, SetKind
from .weights import WeightKind, WeightSpec

# fixed seed for sampled invariant tests; no algorithm in the package
# draws random numbers
SAMPLING_SEED = 0x5EED

_EXPERIMENTS = ("deficiency", "reciprocality", "dimension")


@dataclass(frozen=True)
class SolverSettings:
    cg_rtol: float = CG_RTOL
    cut_tol: float = CUT_TOL
    max_paths: int = MAX_PATHS

    def __post_init__(self):
        if self.cg_rtol <= 0 or self.cut_tol <= 0:
            raise ParameterError("solver tolerances must be > 0")
        if self.max_paths < 1:
            raise ParameterError("max_paths must be >= 1")


@dataclass(frozen=True)
class ExperimentConfig:
    set_spec: CompactSetSpec
    depths: tuple[int, ...]
    weight: WeightSpec
    resolutions: tuple[int, ...]
    experiments: tuple[str, ...]
    solver: SolverSettings = field(default_factory=SolverSettings)
    probe_resolutions: tuple[int, ...] = ()
    dimension_resolutions: tuple[int, ...] = ()
    out_dir: str = "out"
    emit_heatmaps: bool = False

    def __post_init__(self):
        _check_increasing("depths", self.depths)
        _check_increasing("resolutions", self.resolutions)
        if self.probe_resolutions:
            _check_increasing("probe_resolutions", self.probe_resolutions)
        if self.dimension_resolutions:
            _check_increasing("dimension_resolutions", self.dimension_resolutions)
        for e in self.experiments:
            if e not in _EXPERIMENTS:
                raise ParameterError(
                    f"unknown experiment {e!r}, expected one of {_EXPERIMENTS}")

    def resolved_out_dir(self) -> str:
        return os.environ.get("MODLAB_OUT", self.out_dir)

    def echo(self) -> dict:
        """Full resolved configuration for embedding in reports."""
        return {
            "set": repr(self.set_spec),
            "depths": list(self.depths),
            "weight": {"kind": self.weight.kind.value, "p": self.weight.p},
            "resolutions": list(self.resolutions),
            "probe_resolutions": list(self.probe_resolutions),
            "dimension_resolutions": list(self.dimension_resolutions),
            "experiments": list(self.experiments),
            "solver": {"cg_rtol": self.solver.cg_rtol,
                       "cut_tol": self.solver.cut_tol,
                       "max_paths": self.solver.max_paths},
            "out_dir": self.out_dir,
            "emit_heatmaps": self.emit_heatmaps,
        }


def _check_increasing(name: str, values) -> None:
    if not values:
        raise ParameterError(f"{name} must be nonempty")
    for a, b in zip(values, values[1:]):
        if b <= a:
            raise ParameterError(f"{name} must increase strictly, got {list(values)}")


def _ints(raw: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in raw.replace(",", " ").split())


def _floats(raw: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in raw.replace(",", " ").split())


def _pair(raw: str) -> tuple[float, float]:
    vals = _floats(raw)
    if len(vals) != 2:
        raise ParameterError(f"expected two numbers, got {raw!r}")
    return vals[0], vals[1]


def _set_spec(sec) -> CompactSetSpec:
    kind = SetKind(sec.get("kind", fallback=None) or _missing("set.kind"))
    kwargs = {}
    if "ratio" in sec:
        # fractions like 1/3 are allowed so ternary ratios stay exact in intent
        kwargs["ratio"] = float(Fraction(sec["ratio"]))
    if "gaps" in sec:
        kwargs["gaps"] = _floats(sec["gaps"])
    if "p0" in sec:
        kwargs["p0"] = _pair(sec["p0"])
    if "p1" in sec:
        kwargs["p1"] = _pair(sec["p1"])
    if "points" in sec:
        toks = _floats(sec["points"])
        if len(toks) % 2:
            raise ParameterError("set.points must hold an even number of values")
        kwargs["points"] = tuple(zip(toks[::2], toks[1::2]))
    if "center" in sec:
        kwargs["center"] = _pair(sec["center"])
    if "radius" in sec:
        kwargs["radius"] = sec.getfloat("radius")
    if "mask" in sec:
        kwargs["mask"] = load_mask(sec["mask"])
    return CompactSetSpec(kind, **kwargs)


def _missing(key: str):
    raise ParameterError(f"missing required config key {key}")


def load_config(path) -> ExperimentConfig:
    """Parse and validate a config file; all failures name the field."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    read = parser.read(path)
    if not read:
        raise ParameterError(f"config file not found: {path}")
    try:
        if "set" not in parser:
            _missing("[set]")
        set_spec = _set_spec(parser["set"])
        depths = _ints(parser["set"].get("depths", "0"))

        wsec = parser["weight"] if "weight" in parser else {}
        wkind = WeightKind(wsec.get("kind", WeightKind.SELF_POWER.value))
        wp = float(wsec["p"]) if "p" in wsec else None
        weight = WeightSpec(wkind, wp)

        if "grid" not in parser or "resolutions" not in parser["grid"]:
            _missing("grid.resolutions")
        resolutions = _ints(parser["grid"]["resolutions"])

        esec = parser["experiments"] if "experiments" in parser else {}
        run_raw = esec.get("run", " ".join(_EXPERIMENTS))
        experiments = tuple(tok for tok in run_raw.replace(",", " ").split())
        probe = _ints(esec["probe_resolutions"]) if "probe_resolutions" in esec else ()
        dim = _ints(esec["dimension_resolutions"]) if "dimension_resolutions" in esec else ()

        ssec = parser["solver"] if "solver" in parser else {}
        solver = SolverSettings(
            cg_rtol=float(ssec.get("cg_rtol", CG_RTOL)),
            cut_tol=float(ssec.get("cut_tol", CUT_TOL)),
            max_paths=int(ssec.get("max_paths", MAX_PATHS)),
        )

        osec = parser["output"] if "output" in parser else {}
        out_dir = osec.get("dir", "out")
        emit = str(osec.get("heatmaps", "no")).strip().lower() in ("1", "yes", "true", "on")
    except (ValueError, KeyError) as exc:
        raise ParameterError(f"config parse error: {exc}") from exc
    return ExperimentConfig(set_spec, depths, weight, resolutions, experiments,
                            solver, probe, dim, out_dir, emit)
