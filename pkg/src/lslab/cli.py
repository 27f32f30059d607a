"""Command-line entry point: ``lslab <command> ...``.

Tables go to stdout as CSV (or to ``--out`` as files).  The exit status
is 0 exactly when every declared pass flag of the run is true.
"""

import argparse
import csv
import json
import math
import sys

from lslab import geom, interval1d
from lslab.experiments import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    format_value,
    run_experiment,
)
from lslab.extremal import carleson_constant_2, exact_grid, ls_constant_2
from lslab.lang import ParseError, parse_measure, parse_region
from lslab.spectrum import parse_basis


def parse_list(text, cast=float):
    """``"1,2,4"`` or a geometric range ``"a:b:*k"`` (``a, a*k, ...`` up to ``b``)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3 or not parts[2].startswith("*"):
            raise argparse.ArgumentTypeError(f"range must look like a:b:*k, got {text!r}")
        a, b, k = cast(parts[0]), cast(parts[1]), cast(parts[2][1:])
        if a <= 0 or k <= 1:
            raise argparse.ArgumentTypeError("range needs a > 0 and factor > 1")
        out = []
        while a <= b:
            out.append(a)
            a = a * k
        return out
    return [cast(v) if v not in ("inf", "infinity") else v for v in text.split(",") if v]


def _ints(text):
    return parse_list(text, int)


def _floats(text):
    return parse_list(text, float)


def _emit(rows, out=None):
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        if rows:
            w = csv.writer(fh, lineterminator="\n")
            keys = list(rows[0].keys())
            w.writerow(keys)
            for r in rows:
                w.writerow([format_value(r[k]) for k in keys])
    finally:
        if out:
            fh.close()


def _report(result, out):
    """Print the checks; return the exit code."""
    if out is None:
        for table, rows in result.tables.items():
            print(f"# table {table}")
            _emit(rows)
    for c in result.checks:
        flag = "PASS" if c.passed else "FAIL"
        print(f"{flag} {result.name}/{c.name}: measured {c.measured:.6g}, expected {c.expected}", file=sys.stderr)
    return 0 if result.passed else 1


def cmd_experiment(args):
    cfg = ExperimentConfig.from_toml(args.config) if args.config else ExperimentConfig(name=args.name)
    if args.seed is not None:
        cfg.seed = args.seed
    return _report(run_experiment(args.name, cfg, args.out), args.out)


def _norms(args, name):
    cfg = ExperimentConfig(name=name, oversample=args.oversample)
    if args.p:
        cfg.p = args.p
    if args.degrees:
        cfg.degrees = args.degrees
    return _report(run_experiment(name, cfg, args.out), args.out)


def cmd_zonal_norms(args):
    return _norms(args, "zonal-norms")


def cmd_beam_norms(args):
    return _norms(args, "beam-norms")


def cmd_heat(args):
    name = "heat-gaussian" if args.mode == "real" else "heat-complex"
    cfg = ExperimentConfig(name=name)
    if args.t:
        cfg.t = args.t
    if args.angles:
        cfg.angles = args.angles
    return _report(run_experiment(name, cfg, args.out), args.out)


def _extremal_output(result, args):
    doc = result.to_json()
    if args.extremizer:
        with open(args.extremizer, "w") as fh:
            json.dump(result.extremizer.to_json(), fh)
        doc["extremizer_ref"] = args.extremizer
    print(json.dumps(doc, indent=2))
    return 0


def cmd_ls2(args):
    basis = parse_basis(args.basis)
    region = parse_region(args.region).resolve(basis.lam)
    grid = exact_grid(basis.nmax, region, oversample=args.oversample)
    return _extremal_output(ls_constant_2(region, basis, grid, measure_spec=f"scaled(1, {args.region})"), args)


def cmd_carleson2(args):
    basis = parse_basis(args.basis)
    expr = parse_measure(args.measure)
    breaks = expr.axial_breaks(basis.lam)
    if breaks is None:
        breaks = ()
    grid = exact_grid(basis.nmax, oversample=args.oversample, theta_breaks=breaks)
    measure = expr.resolve(basis.lam, grid)
    return _extremal_output(carleson_constant_2(measure, basis, measure_spec=args.measure), args)


def _density_target(text, lam):
    try:
        return parse_region(text).resolve(lam)
    except ParseError:
        pass
    expr = parse_measure(text)
    breaks = expr.axial_breaks(lam) or ()
    n = int(math.ceil(4 * lam)) + 8
    return expr.resolve(lam, exact_grid(n, theta_breaks=breaks))


def cmd_density(args):
    rows = []
    for lam in args.lam:
        target = _density_target(args.target, lam)
        for r in args.r:
            rows.append(geom.density_report(target, args.condition, lam, r).as_row())
    _emit(rows, args.out)
    return 0


def cmd_interval(args):
    if args.experiment == "dirichlet-counterexample":
        rows = interval1d.dirichlet_counterexample(args.lam or [16, 32, 64, 128, 256])
    elif args.experiment == "near-boundary":
        rows = interval1d.near_boundary_sweep(lam_list=args.lam or (16, 64), seed=args.seed)
    else:
        rows = interval1d.neumann_heat_diag(args.t or [0.1, 0.01, 0.001, 0.0001], bc=args.bc)
    _emit(rows, args.out)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="lslab", description="Sampling and concentration experiments for band-limited functions on the sphere.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("experiment", help="run a named experiment")
    p.add_argument("name", choices=sorted(EXPERIMENTS))
    p.add_argument("--config", help="TOML file with experiment parameters")
    p.add_argument("--out", help="directory for CSV tables and the summary JSON")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_experiment)

    for name, fn in (("ls2", cmd_ls2), ("carleson2", cmd_carleson2)):
        p = sub.add_parser(name, help=f"p = 2 {'sampling' if name == 'ls2' else 'Carleson'} constant")
        if name == "ls2":
            p.add_argument("--region", required=True, help="region spec, e.g. 'not(cap(0,0,0.1))'")
        else:
            p.add_argument("--measure", required=True, help="measure spec, e.g. 'sum(lebesgue, atom(0,0,1))'")
        p.add_argument("--basis", required=True, help="band:<lambda> or eig:<n>")
        p.add_argument("--oversample", type=int, default=1)
        p.add_argument("--extremizer", help="write the extremizer JSON here")
        p.set_defaults(func=fn)

    for name, fn in (("zonal-norms", cmd_zonal_norms), ("beam-norms", cmd_beam_norms)):
        p = sub.add_parser(name, help=f"L^p norms of {name.split('-')[0]} functions")
        p.add_argument("--p", type=_floats)
        p.add_argument("--degrees", type=_ints, help="list or range a:b:*2")
        p.add_argument("--oversample", type=int, default=2)
        p.add_argument("--out")
        p.set_defaults(func=fn)

    p = sub.add_parser("heat", help="heat-kernel bound profiles")
    p.add_argument("--mode", choices=("real", "complex"), default="real")
    p.add_argument("--t", type=_floats)
    p.add_argument("--angles", type=_floats)
    p.add_argument("--out")
    p.set_defaults(func=cmd_heat)

    p = sub.add_parser("density", help="worst-case density ratios of a region or measure")
    p.add_argument("--target", required=True)
    p.add_argument("--condition", required=True, choices=[c.value for c in geom.Condition])
    p.add_argument("--lambda", dest="lam", type=_floats, required=True)
    p.add_argument("--r", type=_floats, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("interval", help="one-dimensional boundary-condition model")
    p.add_argument("--experiment", required=True, choices=("dirichlet-counterexample", "near-boundary", "heat-diag"))
    p.add_argument("--lambda", dest="lam", type=_floats)
    p.add_argument("--t", type=_floats)
    p.add_argument("--bc", choices=interval1d.BCS, default="neumann")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_interval)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError, ValueError, KeyError) as exc:
        print(f"lslab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
