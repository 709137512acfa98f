"""Command line: ``cracksub {list,run,verify,converge}``."""
import argparse
import sys
import warnings

import numpy as np

from ..constitutive import fd_check, random_state
from ..errors import ConfigError, CrackSubError
from .config import load_config, resolve
from .export import export, fmt
from .runner import convergence_study, run_scenario
from .scenarios import CATALOG

FD_TOL = 1e-6


def _cmd_list(args):
    for name, sc in CATALOG.items():
        print(f"{name:32s} {sc.description}")
    return 0


def _cmd_run(args):
    if args.config:
        config = load_config(args.config)
    elif args.scenario:
        config = {"scenario": args.scenario}
    else:
        raise ConfigError("scenario", "give --scenario NAME or --config PATH")
    report = run_scenario(config)
    print(report.summary())
    if args.out:
        for path in export(report, args.out):
            print(f"wrote {path}")
    return 0 if report.passed else 1


def _cmd_verify(args):
    ok = True
    rng = np.random.default_rng(args.seed)
    for name, sc in CATALOG.items():
        _, params = resolve({"scenario": name}, CATALOG)
        for model in sc.catalog_models(params):
            worst = max(fd_check(model, random_state(model.space, rng)).max for _ in range(3))
            passed = worst <= FD_TOL
            ok &= passed
            print(f"{'PASS' if passed else 'FAIL'} {name}/{model.name}: fd_check {worst:.3e} (<= {FD_TOL:g})")
    return 0 if ok else 1


def _cmd_converge(args):
    values = [float(v) for v in args.values.split(",")]
    config = load_config(args.config) if args.config else {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        table = convergence_study(args.scenario, args.param, values, config)
    print(f"{'quantity':24s} " + " ".join(f"{v:>12.4g}" for v in values) + "        slope  status")
    for k, ys in table.quantities.items():
        print(f"{k:24s} " + " ".join(f"{y:12.4e}" for y in ys) + f"  {fmt(table.slopes[k]):>11s}  {table.status[k]}")
    return 1 if table.warnings else 0


def build_parser():
    p = argparse.ArgumentParser(prog="cracksub", description="Tip integrals and balance checks for cracks in "
                                                             "materials with substructure")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list the scenario catalog").set_defaults(func=_cmd_list)
    r = sub.add_parser("run", help="run a scenario and export its report")
    g = r.add_mutually_exclusive_group(required=True)
    g.add_argument("--scenario", choices=sorted(CATALOG))
    g.add_argument("--config", help="TOML configuration file")
    r.add_argument("--out", help="output directory for CSV/JSON")
    r.set_defaults(func=_cmd_run)
    v = sub.add_parser("verify", help="finite-difference check of every catalog model")
    v.add_argument("--seed", type=int, default=42)
    v.set_defaults(func=_cmd_verify)
    c = sub.add_parser("converge", help="log-log convergence study")
    c.add_argument("--scenario", required=True, choices=sorted(CATALOG))
    c.add_argument("--param", required=True, choices=("radius", "h"))
    c.add_argument("--values", required=True, help="comma-separated, monotone, at least three")
    c.add_argument("--config", help="optional TOML overrides")
    c.set_defaults(func=_cmd_converge)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CrackSubError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
