"""Command-line entry point: ``cddsim {simulate,sweep,preset,bound,dump-schedule}``.

Exit codes: 0 success, 1 configuration/usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from . import harness, magnus, sequence
from .operators import NotHermitianError
from .propagation import NumericalError
from .spin_bath import DimensionOverflowError

log = logging.getLogger("cddsim")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cddsim", description="Concatenated vs periodic dynamical decoupling simulator.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def run_opts(sp):
        sp.add_argument("--workers", type=int, default=1, help="max concurrent trial processes")
        sp.add_argument("--summary", metavar="FILE", help="also write per-point statistics CSV")
        sp.add_argument("--timing", action="store_true", help="fill the wall_time_ms column")

    sp = sub.add_parser("simulate", help="run a config at its base point (sweep ignored)")
    sp.add_argument("--config", required=True, metavar="FILE")
    sp.add_argument("--out", metavar="FILE", help="CSV destination (default stdout)")
    run_opts(sp)

    sp = sub.add_parser("sweep", help="run the full sweep of a config")
    sp.add_argument("--config", required=True, metavar="FILE")
    sp.add_argument("--out", required=True, metavar="FILE")
    run_opts(sp)

    sp = sub.add_parser("preset", help="write a figure preset config, or run it with --run")
    sp.add_argument("--name", required=True, choices=sorted(harness.PRESETS))
    sp.add_argument("--out", required=True, metavar="FILE")
    sp.add_argument("--run", action="store_true", help="run the preset and write CSV instead of the config")
    sp.add_argument("--realizations", type=int, help="override the preset realization count")
    run_opts(sp)

    sp = sub.add_parser("bound", help="evaluate the analytic Magnus bounds")
    for flag in ("--beta", "--J", "--T", "--N"):
        sp.add_argument(flag, type=float, required=True)
    sp.add_argument("--n", type=int, required=True, help="concatenation level")
    sp.add_argument("--c", type=float, default=1.0, help="finite-width factor multiplying tau_n beta (default 1)")
    sp.add_argument("--d", type=float, default=1.0, help="finite-width factor multiplying delta/tau_n (default 1)")
    sp.add_argument("--delta", type=float, default=0.0, help="pulse width (default 0)")
    sp.add_argument("--c-conv", type=float, default=0.1,
                    help="constant in beta tau_n < c_conv used for n_max and the ratio bound (default 0.1)")
    sp.add_argument("--threshold", type=float, default=magnus.DEFAULT_THRESHOLD)

    sp = sub.add_parser("dump-schedule", help="print a schedule in the line format")
    sp.add_argument("--scheme", required=True, choices=["cdd", "pdd"])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--tau0", type=float, default=1.0)
    sp.add_argument("--delta", type=float, default=0.0)
    sp.add_argument("--simplify", action="store_true")
    return p


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)


def _progress(index, recs):
    mean = sum(r.l for r in recs) / len(recs)
    log.info("point %d %s n=%d jT=%.4g w=%.4g: mean l = %.3f", index, recs[0].scheme, recs[0].n,
             recs[0].jT, recs[0].jitter_fraction, mean)


def _run(cfg, args):
    records = harness.run_sweep(cfg, workers=args.workers, progress=_progress)
    _write(args.out, harness.records_to_csv(records, timing=args.timing))
    if args.summary:
        _write(args.summary, harness.summary_to_csv(harness.summarize(records)))


def _bound(args):
    rep = magnus.bound_report(args.beta, args.J, args.T, args.N, args.n, c=args.c, d=args.d,
                              delta=args.delta, c_conv=args.c_conv, threshold=args.threshold)
    for k, v in rep.items():
        print(f"{k} = {v:.17g}" if isinstance(v, float) else f"{k} = {v}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    try:
        if args.command == "simulate":
            cfg = harness.load_config(args.config)
            _run(replace(cfg, sweep_variable=(), sweep_values=()), args)
        elif args.command == "sweep":
            _run(harness.load_config(args.config), args)
        elif args.command == "preset":
            cfg = harness.preset(args.name)
            if args.realizations:
                cfg = replace(cfg, realizations=args.realizations)
            if args.run:
                _run(cfg, args)
            else:
                _write(args.out, harness.dumps_config(cfg))
        elif args.command == "bound":
            _bound(args)
        elif args.command == "dump-schedule":
            build = sequence.build_cdd if args.scheme == "cdd" else sequence.build_pdd
            s = build(args.n, args.tau0, args.delta)
            if args.simplify:
                s = sequence.simplify(s)
            sys.stdout.write(sequence.dumps(s))
    except (NumericalError, NotHermitianError, DimensionOverflowError) as e:
        print(f"cddsim: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (harness.ConfigError, ValueError, OSError) as e:
        print(f"cddsim: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
