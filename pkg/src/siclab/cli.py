"""Command line driver.

Verbs: ``run`` (one experiment from a config file), ``sweep`` (override
or supply the sweep axis), ``accept`` (the acceptance suite), and
``optimize`` (brute-force search over a law file).  Exit codes: 0 on
success, 1 on configuration errors, 2 on acceptance failure.
"""

import argparse
import dataclasses
import sys

import numpy as np

from . import __version__
from . import config as cfg
from . import finite_info as fi
from . import harness
from . import reporting


class _Parser(argparse.ArgumentParser):
    # usage problems are configuration errors (exit 1), not exit 2
    def error(self, message):
        raise cfg.ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="siclab",
        description="Seeded Monte Carlo experiments for feedback coding "
                    "with known interference and lossy coding with "
                    "decoder feedforward.")
    parser.add_argument("--version", action="version",
                        version=f"siclab {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    run_p = sub.add_parser("run", help="run one experiment")
    run_p.add_argument("--config", required=True, help="experiment file")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override [experiment] master_seed")
    run_p.add_argument("--out", default=None,
                       help="override [experiment] out directory")

    sweep_p = sub.add_parser("sweep", help="sweep one parameter")
    sweep_p.add_argument("--config", required=True)
    sweep_p.add_argument("--axis", required=True,
                         help="parameter name from [params]")
    sweep_p.add_argument("--values", required=True,
                         help="comma-separated sweep values")
    sweep_p.add_argument("--seed", type=int, default=None)
    sweep_p.add_argument("--out", default=None)

    accept_p = sub.add_parser("accept", help="run the acceptance suite")
    accept_p.add_argument("--quick", action="store_true",
                          help="reduced trial counts")
    accept_p.add_argument("--seed", type=int, default=0)
    accept_p.add_argument("--out", default="acceptance_out")

    opt_p = sub.add_parser("optimize",
                           help="brute-force search over a law file")
    opt_p.add_argument("--law", required=True, help="law file to optimize")
    opt_p.add_argument("--num-u", type=int, default=2,
                       help="auxiliary alphabet size")
    opt_p.add_argument("--grid-step", type=float, default=0.25,
                       help="simplex grid resolution")
    opt_p.add_argument("--weight", type=float, default=1.0,
                       help="distortion weight for source laws")
    opt_p.add_argument("--out", default=None,
                       help="write the optimized law file here")
    return parser


def _effective_config(args, sweep_override=None) -> cfg.ExperimentConfig:
    conf = cfg.parse_config(args.config)
    if args.seed is not None:
        conf = dataclasses.replace(conf, master_seed=args.seed)
    if args.out is not None:
        conf = dataclasses.replace(conf, out_dir=args.out)
    if sweep_override is not None:
        schema = cfg.PARAM_SCHEMA[conf.scheme]
        axis = sweep_override[0]
        if axis not in schema or axis == "law":
            raise cfg.ConfigError(
                f"--axis: {axis!r} is not a numeric parameter of "
                f"{conf.scheme}")
        values = cfg.parse_sweep_values(sweep_override[1], schema[axis][0])
        conf = dataclasses.replace(conf, sweep=cfg.SweepSpec(axis, values))
    return conf


def _report(conf: cfg.ExperimentConfig, rows) -> None:
    axis = conf.sweep.axis if conf.sweep is not None else "point"
    names = list(harness.SCHEMA[conf.scheme])
    paths = reporting.write_report(
        rows, conf.out_dir, conf.scheme, axis, names, conf.raw_text,
        conf.master_seed)
    for row in rows:
        cells = ", ".join(f"{n}={row.estimates[n]:.6g}" for n in names)
        label = f"{axis}={row.swept_value}" if conf.sweep else "point"
        print(f"{label}: {cells} (reference {row.reference:.6g}, "
              f"{row.trials} trials)")
    print(f"wrote {paths['csv']}")


def _cmd_run(args) -> int:
    conf = _effective_config(args)
    _report(conf, harness.run_experiment(conf))
    return 0


def _cmd_sweep(args) -> int:
    conf = _effective_config(args, sweep_override=(args.axis, args.values))
    _report(conf, harness.run_experiment(conf))
    return 0


def _cmd_accept(args) -> int:
    from . import acceptance

    results = acceptance.run_suite(quick=args.quick,
                                   master_seed=args.seed)
    acceptance.write_suite_report(results, args.out, args.seed,
                                  quick=args.quick)
    for res in results:
        print(acceptance.format_result(res))
    failed = [res.index for res in results if not res.passed]
    if failed:
        print(f"FAILED criteria: {', '.join(map(str, failed))}")
        return 2
    print("all criteria passed")
    return 0


def _cmd_optimize(args) -> int:
    parser, _ = cfg._read_sections(args.law)
    if not parser.has_section("law"):
        raise cfg.ConfigError(f"{args.law}: missing [law] section")
    kind = parser["law"].get("kind", "").strip()
    if kind == "gp":
        law = cfg.load_law(args.law, "gp")
        best, objective = fi.brute_force_gp(
            law.p_state, law.p_y_given_xs, args.num_u, args.grid_step)
        print(f"objective: {objective!r}")
    elif kind == "wz":
        law = cfg.load_law(args.law, "wz")
        best, (rate, dist) = fi.brute_force_wz(
            law.p_xy, args.num_u, args.grid_step,
            lagrange_weight=args.weight, rho=law.rho)
        print(f"rate: {rate!r}")
        print(f"distortion: {dist!r}")
    else:
        raise cfg.ConfigError(f"[law] kind: expected gp or wz, got {kind!r}")
    text = cfg.format_law(best)
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "accept": _cmd_accept,
    "optimize": _cmd_optimize,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.verb](args)
    except cfg.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, fi.SearchBudgetError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
