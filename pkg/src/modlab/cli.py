"""Command-line front end.

Exit codes: 0 success, 2 validation or parameter error, 3 solver
non-convergence in any experiment cell (reports are still written),
64 unknown subcommand.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

from .config import ExperimentConfig, load_config
from .errors import ModlabError
from .experiments import (ab_deficiency, canonical_grid, make_battery,
                          qc_dimension_experiment, reciprocality_probe)
from .grids import (Grid, ScalarField, load_field_csv, load_mask,
                    save_field_csv, save_field_pgm, save_mask)
from .modulus import (CurveFamilySpec, FamilyKind, Marking, Quadrilateral,
                      annulus_modulus, family_modulus_cutting_plane,
                      quad_modulus_conductance)
from .sets import CompactSetSpec, SetKind, generate, rasterize
from .weights import WeightKind, WeightSpec, distance_transform, eval_weight

_COMMANDS = ("run", "gen-set", "distance", "weight", "modulus",
             "dimension", "deficiency", "reciprocality", "report")


def _fraction(raw: str) -> float:
    return float(Fraction(raw))


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="modlab",
                                description="numerical laboratory for planar "
                                            "removability experiments")
    sub = p.add_subparsers(dest="command")

    run = sub.add_parser("run", help="execute a config-driven batch")
    run.add_argument("config")

    gen = sub.add_parser("gen-set", help="generate a compact set")
    gen.add_argument("kind", choices=[k.value for k in SetKind if k is not SetKind.RAW_MASK])
    gen.add_argument("--ratio", type=_fraction)
    gen.add_argument("--gaps", type=float, nargs="+")
    gen.add_argument("--p0", type=float, nargs=2)
    gen.add_argument("--p1", type=float, nargs=2)
    gen.add_argument("--points", type=float, nargs="+")
    gen.add_argument("--center", type=float, nargs=2)
    gen.add_argument("--radius", type=float)
    gen.add_argument("--depth", type=int, default=0)
    gen.add_argument("--n", type=int, help="rasterize on the canonical window")
    gen.add_argument("--out", help="mask output path (requires --n)")

    dis = sub.add_parser("distance", help="distance field of a saved mask")
    dis.add_argument("mask")
    dis.add_argument("--out", required=True, help="CSV output path")

    wgt = sub.add_parser("weight", help="weight field from a saved distance field")
    wgt.add_argument("delta", help="distance field CSV")
    wgt.add_argument("--kind", default=WeightKind.SELF_POWER.value,
                     choices=[k.value for k in WeightKind])
    wgt.add_argument("--p", type=float)
    wgt.add_argument("--out", required=True, help="PGM output path")
    wgt.add_argument("--csv", help="optional CSV output path")

    mod = sub.add_parser("modulus", help="modulus of a single curve family")
    mod.add_argument("--n", type=int, required=True)
    mod.add_argument("--window", type=float, nargs=3, metavar=("OX", "OY", "EXTENT"))
    mod.add_argument("--annulus", type=float, nargs=2, metavar=("R0", "R1"))
    mod.add_argument("--rect", type=float, nargs=4, metavar=("X0", "X1", "Y0", "Y1"))
    mod.add_argument("--marking", default=Marking.HORIZONTAL.value,
                     choices=[m.value for m in Marking])
    mod.add_argument("--removed", help="mask of removed nodes")
    mod.add_argument("--solver", default="conductance",
                     choices=["conductance", "cutting_plane"])
    mod.add_argument("--weight", help="length weight field CSV (cutting_plane only)")

    for name in ("dimension", "deficiency", "reciprocality"):
        s = sub.add_parser(name, help=f"run only the {name} experiment of a config")
        s.add_argument("config")

    rep = sub.add_parser("report", help="merge cell report JSONs into one summary")
    rep.add_argument("inputs", nargs="+")
    rep.add_argument("--out", required=True)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and not argv[0].startswith("-") and argv[0] not in _COMMANDS:
        print(f"modlab: unknown subcommand {argv[0]!r}", file=sys.stderr)
        print(f"usage: modlab {{{','.join(_COMMANDS)}}} ...", file=sys.stderr)
        return 64
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage()
        return 64
    try:
        return _dispatch(args)
    except ModlabError as exc:
        print(f"modlab: error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "run":
        return _cmd_run(load_config(args.config))
    if args.command == "gen-set":
        return _cmd_gen_set(args)
    if args.command == "distance":
        mask = load_mask(args.mask)
        save_field_csv(distance_transform(mask), args.out)
        print(f"wrote {args.out}")
        return 0
    if args.command == "weight":
        delta = load_field_csv(args.delta)
        omega = eval_weight(delta, WeightSpec(WeightKind(args.kind), args.p))
        save_field_pgm(omega, args.out)
        if args.csv:
            save_field_csv(omega, args.csv)
        print(f"wrote {args.out}")
        return 0
    if args.command == "modulus":
        return _cmd_modulus(args)
    if args.command in ("dimension", "deficiency", "reciprocality"):
        cfg = load_config(args.config)
        cfg = ExperimentConfig(cfg.set_spec, cfg.depths, cfg.weight,
                               cfg.resolutions, (args.command,), cfg.solver,
                               cfg.probe_resolutions, cfg.dimension_resolutions,
                               cfg.out_dir, cfg.emit_heatmaps)
        return _cmd_run(cfg)
    if args.command == "report":
        merged = []
        for path in sorted(args.inputs):
            with open(path) as f:
                merged.append(json.load(f))
        merged.sort(key=lambda d: str(d.get("experiment", "")))
        with open(args.out, "w", newline="\n") as f:
            json.dump({"reports": merged}, f, sort_keys=True, indent=2)
            f.write("\n")
        print(f"wrote {args.out}")
        return 0
    raise AssertionError(f"unhandled command {args.command}")


def _cmd_gen_set(args) -> int:
    kwargs = {}
    for key in ("ratio", "gaps", "radius"):
        if getattr(args, key) is not None:
            kwargs[key] = getattr(args, key)
    for key in ("p0", "p1", "center"):
        if getattr(args, key) is not None:
            kwargs[key] = tuple(getattr(args, key))
    if args.points is not None:
        pts = args.points
        if len(pts) % 2:
            raise ModlabError("--points needs an even number of values")
        kwargs["points"] = tuple(zip(pts[::2], pts[1::2]))
    if args.gaps is not None:
        kwargs["gaps"] = tuple(args.gaps)
    spec = CompactSetSpec(SetKind(args.kind), **kwargs)
    gen = generate(spec, args.depth)
    for a, b in gen.intervals:
        print(f"interval {a!r} {b!r}")
    for x0, x1, y0, y1 in gen.boxes:
        print(f"box {x0!r} {x1!r} {y0!r} {y1!r}")
    for p0, p1 in gen.segments:
        print(f"segment {p0[0]!r} {p0[1]!r} {p1[0]!r} {p1[1]!r}")
    if gen.circle is not None:
        (cx, cy), r = gen.circle
        print(f"circle {cx!r} {cy!r} {r!r}")
    total = len(gen.intervals) + len(gen.boxes) + len(gen.segments)
    total += 1 if gen.circle is not None else 0
    print(f"{total} components at depth {args.depth}")
    if args.out:
        if args.n is None:
            raise ModlabError("--out requires --n")
        mask = rasterize(spec, args.depth, canonical_grid(args.n))
        save_mask(mask, args.out)
        print(f"wrote {args.out} ({mask.count} occupied)")
    return 0


def _cmd_modulus(args) -> int:
    if (args.annulus is None) == (args.rect is None):
        raise ModlabError("give exactly one of --annulus or --rect")
    if args.annulus is not None:
        r, big_r = args.annulus
        if args.window is not None:
            ox, oy, extent = args.window
        else:
            half = math.ceil(big_r) + 1
            ox = oy = -float(half)
            extent = 2.0 * half
        grid = Grid((ox, oy), extent, args.n)
        res = annulus_modulus((ox + extent / 2.0, oy + extent / 2.0), r, big_r, grid)
    else:
        if args.window is not None:
            ox, oy, extent = args.window
            grid = Grid((ox, oy), extent, args.n)
        else:
            grid = canonical_grid(args.n)
        quad = Quadrilateral(tuple(args.rect), Marking(args.marking))
        removed = load_mask(args.removed) if args.removed else None
        if args.solver == "conductance":
            if args.weight:
                raise ModlabError("--weight requires --solver cutting_plane")
            res = quad_modulus_conductance(quad, grid, removed=removed)
        else:
            omega = load_field_csv(args.weight) if args.weight else None
            fam = CurveFamilySpec(FamilyKind.QUAD_PRIMAL, grid, quad=quad,
                                  removed=removed, length_weight=omega)
            res = family_modulus_cutting_plane(fam)
    print(json.dumps(res.to_dict(), sort_keys=True))
    return 0 if res.converged else 3


def _write(path: str, text: str) -> None:
    with open(path, "w", newline="\n") as f:
        f.write(text if text.endswith("\n") else text + "\n")


def _cmd_run(cfg: ExperimentConfig) -> int:
    out_dir = cfg.resolved_out_dir()
    os.makedirs(out_dir, exist_ok=True)
    bbox = cfg.set_spec.bounding_box()
    battery = make_battery(bbox)
    nonconverged = []
    summary = {"config": cfg.echo(), "reports": {}}

    if "deficiency" in cfg.experiments:
        rep = ab_deficiency(cfg.set_spec, cfg.depths, battery, cfg.resolutions)
        _write(os.path.join(out_dir, "deficiency.json"), rep.to_json())
        _write(os.path.join(out_dir, "deficiency.csv"), "\n".join(rep.csv_rows()))
        summary["reports"]["deficiency"] = {"verdict": rep.verdict,
                                            "trends": rep.trends}

    if "reciprocality" in cfg.experiments:
        probe_res = cfg.probe_resolutions or cfg.resolutions
        rep = reciprocality_probe(cfg.set_spec, cfg.weight, battery, probe_res,
                                  depth=cfg.depths[-1], tol=cfg.solver.cut_tol,
                                  max_paths=cfg.solver.max_paths)
        _write(os.path.join(out_dir, "reciprocality.json"), rep.to_json())
        _write(os.path.join(out_dir, "reciprocality.csv"), "\n".join(rep.csv_rows()))
        bad = [f"reciprocality {c.quad} n={c.n}" for c in rep.cells if not c.converged]
        nonconverged.extend(bad)
        summary["reports"]["reciprocality"] = {
            "products": {f"{c.quad}/{c.n}": c.product for c in rep.cells},
            "nonconverged": bad,
        }

    if "dimension" in cfg.experiments:
        dim_res = cfg.dimension_resolutions or cfg.resolutions
        rep = qc_dimension_experiment(cfg.set_spec, (cfg.depths[-1],), dim_res)
        _write(os.path.join(out_dir, "dimension.json"), rep.to_json())
        _write(os.path.join(out_dir, "dimension.csv"), "\n".join(rep.csv_rows()))
        summary["reports"]["dimension"] = {
            f"n={c.n}": {"euclidean": c.euclidean.slope, "weighted": c.weighted.slope}
            for c in rep.cells}

    if cfg.emit_heatmaps and "deficiency" in cfg.experiments:
        for q in battery:
            grid = canonical_grid(cfg.resolutions[-1])
            res = quad_modulus_conductance(q, grid)
            if res.rho is not None:
                save_field_pgm(res.rho, os.path.join(out_dir, f"rho_{q.name}.pgm"))

    summary["nonconverged"] = nonconverged
    _write(os.path.join(out_dir, "summary.json"),
           json.dumps(summary, sort_keys=True, indent=2))
    if nonconverged:
        print(f"{len(nonconverged)} cells did not converge", file=sys.stderr)
        return 3
    print(f"wrote reports to {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
