"""Command line front end: nls-lab <subcommand> --config FILE [overrides].

Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 soft (a trajectory
finished without a verdict).
"""

import argparse
import os
import sys

from .experiment_runner import (
    ConfigError,
    parse_config,
    run_experiment,
    run_sweep,
)


def build_parser():
    p = argparse.ArgumentParser(
        prog="nls-lab",
        description="threshold-dynamics laboratory for the coupled cubic "
                    "Schrodinger system",
    )
    p.add_argument("subcommand",
                   choices=["ground", "spectrum", "special", "evolve",
                            "virial", "modulate", "sweep"])
    p.add_argument("--config", help="config file (sectioned key = value)")
    p.add_argument("--set", action="append", default=[], metavar="SECT.KEY=VAL",
                   help="override a config entry (repeatable)")
    p.add_argument("--out", help="shorthand for --set run.output_dir=...")
    p.add_argument("--beta", type=float, help="shorthand for run.beta")
    p.add_argument("--branch", help="shorthand for run.branch")
    p.add_argument("--A", type=float, help="shorthand for special.A")
    p.add_argument("--l", type=int, help="shorthand for special.l")
    p.add_argument("--t0", type=float,
                   help="shorthand for special.t0 (switches t0_mode to fixed)")
    p.add_argument("--axis", help="sweep axis: beta | A | l | resolution")
    p.add_argument("--values", help="comma-separated sweep values")
    p.add_argument("--sweep-subcommand", default="ground",
                   help="what to run at each sweep point")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    text = ""
    if args.config:
        try:
            with open(args.config) as f:
                text = f.read()
        except OSError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
    overrides = list(args.set)
    if args.out:
        overrides.append(f"run.output_dir={args.out}")
    if args.beta is not None:
        overrides.append(f"run.beta={args.beta}")
        if args.branch is None:
            overrides.append("run.branch=" + (
                "symmetric" if args.beta > 1 else "semi_trivial_first"))
    if args.branch is not None:
        overrides.append(f"run.branch={args.branch}")
    if args.A is not None:
        overrides.append(f"special.A={args.A}")
    if args.l is not None:
        overrides.append(f"special.l={args.l}")
    if args.t0 is not None:
        overrides.append(f"special.t0={args.t0}")
        overrides.append("special.t0_mode=fixed")
    env_out = os.environ.get("OUTPUT_DIR")
    if env_out:
        overrides.append(f"run.output_dir={env_out}")

    try:
        cfg = parse_config(text, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.subcommand == "sweep":
            if not args.axis or not args.values:
                print("config error: sweep needs --axis and --values",
                      file=sys.stderr)
                return 2
            man = run_sweep(cfg, args.axis, args.values.split(","),
                            subcommand=args.sweep_subcommand)
        else:
            man = run_experiment(cfg, args.subcommand)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, ValueError, FloatingPointError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3

    if man.verdicts.get("evolve") == "undetermined":
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
