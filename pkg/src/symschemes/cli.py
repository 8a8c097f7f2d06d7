"""Command-line interface for the scheme benchmarks.

Exit codes: 0 success, 2 argument/specification error, 3 numerical
failure in a required run.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import (ExperimentSpec, SingularityBundle, bundle_json,
                          emit_outputs, report_csv, report_json,
                          run_experiment, singularity_run)
from .rootfind import NumericalError

DEFAULT_HS = {
    1: (0.1, 0.01, 0.001),
    2: (1.0, 0.1),
    3: (0.1, 0.01),
    4: (0.02, 0.01),
    5: (0.1, 0.01),
}


def _float_list(text):
    try:
        vals = tuple(float(v) for v in text.split(",") if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _pair(text):
    vals = _float_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated values")
    return vals


def build_parser():
    parser = argparse.ArgumentParser(
        prog="symschemes",
        description="Benchmark symmetry-preserving difference schemes "
                    "against standard baselines.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_example=True):
        if with_example:
            p.add_argument("--example", type=int, required=True, choices=range(1, 6))
            p.add_argument("--scheme", default="both",
                           choices=("invariant", "standard", "both"))
            p.add_argument("--h", type=_float_list, default=None,
                           help="comma-separated step sizes / start-up spacings")
            p.add_argument("--variant", choices=("blowup", "noblowup"), default=None,
                           help="example-3 case selector")
            p.add_argument("--interval", type=_pair, default=None, metavar="A,B")
            p.add_argument("--initial", type=_float_list, default=None,
                           help="initial data override (y0,y0',...)")
        p.add_argument("--out", default=None, metavar="DIR",
                       help="write CSV/JSON/xy files (and figures) here")
        p.add_argument("--json", action="store_true", help="print the JSON report")
        p.add_argument("--no-figures", action="store_true",
                       help="skip matplotlib rendering in --out")

    run_p = sub.add_parser("run", help="run an experiment and report errors")
    add_common(run_p)
    conv_p = sub.add_parser("convergence",
                            help="run the example's canonical h-list and "
                                 "report observed orders")
    add_common(conv_p)
    sing_p = sub.add_parser("singularity",
                            help="example-5 pole-crossing study on [0, 6]")
    sing_p.add_argument("--h", type=_float_list, default=(0.1, 0.01, 0.001))
    add_common(sing_p, with_example=False)
    return parser


def _print_report(report, as_json):
    if as_json:
        sys.stdout.write(report_json(report))
        return
    print(f"example {report.example}"
          + (f" ({report.variant})" if report.variant else ""))
    print(f"{'scheme':<10} {'h':>10} {'N':>6} {'max_error':>12} "
          f"{'end_error':>12} {'order':>7}  status")
    for r in report.rows:
        n = "-" if r.n_nodes is None else r.n_nodes
        me = "-" if r.max_error is None else f"{r.max_error:.3e}"
        ee = "-" if r.endpoint_error is None else f"{r.endpoint_error:.3e}"
        p = "-" if r.order is None else f"{r.order:.2f}"
        print(f"{r.scheme:<10} {r.h:>10.4g} {n:>6} {me:>12} {ee:>12} {p:>7}  {r.status}")


def _print_bundle(bundle: SingularityBundle, as_json):
    if as_json:
        sys.stdout.write(bundle_json(bundle))
        return
    print(f"reference: {bundle.reference_status} at x={bundle.reference_fail_x:.4f}")
    sx = bundle.standard_fail_x
    print("standard baseline:",
          f"diverged at x={sx:.4f}" if sx is not None else "completed")
    for h, traj in sorted(bundle.trajectories.items(), reverse=True):
        print(f"invariant h={h:g}: reached x={traj.xs[-1]:.4f}, "
              f"{len(traj.flagged('near-pole'))} near-pole node(s)")
    for (hc, hf), d in sorted(bundle.discrepancies.items()):
        print(f"discrepancy h={hc:g} vs h={hf:g} (|x-pole|>{bundle.exclusion_radius}): "
              f"{d:.3e}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "singularity":
            bundle = singularity_run(args.h)
            _print_bundle(bundle, args.json)
            if args.out:
                emit_outputs(bundle, args.out, figures=not args.no_figures)
            return 0
        hs = args.h or DEFAULT_HS[args.example]
        spec = ExperimentSpec(
            example=args.example, scheme=args.scheme, hs=tuple(hs),
            variant=args.variant,
            interval=tuple(args.interval) if args.interval else None,
            initial=tuple(args.initial) if args.initial else None)
        report = run_experiment(spec)
        _print_report(report, args.json)
        if not args.json and args.command == "convergence":
            for scheme in ("invariant", "standard"):
                orders = [f"{r.order:.2f}" for r in report.rows_for(scheme)
                          if r.order is not None]
                if orders:
                    print(f"observed orders ({scheme}): {', '.join(orders)}")
        if args.out:
            emit_outputs(report, args.out, figures=not args.no_figures)
        failed = [r for r in report.rows if r.status.startswith("error")]
        return 3 if failed else 0
    except ValueError as exc:
        print(f"specification error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, OSError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
