"""Command line entry point: ``csid run | plot | verify``."""
from __future__ import annotations

import argparse
import logging
import sys

from .errors import InvalidArgument, NumericalFailure
from .harness.config import PRESETS, ConfigError, load_config
from .harness.output import PLOT_KINDS, emit_plot, read_csv, read_curves, write_outputs
from .harness.runner import run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


def _parser():
    p = argparse.ArgumentParser(prog="csid", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte-Carlo experiment")
    run.add_argument("--config", help="YAML config file")
    run.add_argument("--preset", choices=sorted(PRESETS))
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int, dest="base_seed")
    run.add_argument("--out", dest="output_dir")
    run.add_argument("--threads", type=int)
    run.add_argument("-v", "--verbose", action="store_true")

    plot = sub.add_parser("plot", help="render a results or curves CSV to SVG")
    plot.add_argument("--table", required=True)
    plot.add_argument("--kind", required=True, choices=PLOT_KINDS)
    plot.add_argument("--out", required=True)

    sub.add_parser("verify", help="run the built-in oracle checks")
    return p


def _run(args) -> int:
    try:
        cfg = load_config(args.config, args.preset, trials=args.trials, base_seed=args.base_seed,
                          output_dir=args.output_dir, threads=args.threads)
    except InvalidArgument as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.config is None and args.preset is None:
        print("config error: give --config and/or --preset", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_experiment(cfg)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    paths = write_outputs(result)
    print(f"{len(result.rows)} rows, {result.wall_time:.1f} s -> {paths['results'].parent}")
    for r in result.rows:
        print(f"  {r.method:26s} {r.swept_param}={r.swept_value:<8g} distortion={r.mean_distortion:.4g} "
              f"conv_iter={r.mean_convergence_iter:g} pilots={r.mean_pilots:g}")
    if result.failures:
        for f in result.failures:
            print(f, file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _plot(args) -> int:
    if args.kind == "convergence_curve":
        data = read_curves(args.table)
    else:
        data = read_csv(args.table)
    emit_plot(data, args.kind, args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return _run(args)
    if args.command == "plot":
        return _plot(args)
    from .verify import run_checks

    return EXIT_OK if run_checks() else EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
