"""Run figure presets and write per-trial and per-point CSVs.

    python3 scripts/run_presets.py --out runs/ fig2 fig1_left
    python3 scripts/run_presets.py --out runs/ --realizations 10   # all presets, quick
"""

import argparse
import logging
import time
from dataclasses import replace
from pathlib import Path

from cddsim.harness import PRESETS, preset, records_to_csv, run_sweep, summarize, summary_to_csv

log = logging.getLogger("run_presets")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("names", nargs="*", default=sorted(PRESETS), help="presets to run (default: all)")
    p.add_argument("--out", type=Path, default=Path("runs"))
    p.add_argument("--realizations", type=int, help="override realization count")
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    args.out.mkdir(parents=True, exist_ok=True)
    for name in args.names:
        cfg = preset(name)
        if args.realizations:
            cfg = replace(cfg, realizations=args.realizations)
        t0 = time.perf_counter()
        records = run_sweep(cfg, workers=args.workers)
        (args.out / f"{name}.csv").write_text(records_to_csv(records))
        (args.out / f"{name}_summary.csv").write_text(summary_to_csv(summarize(records)))
        log.info("%s: %d trials in %.1f s", name, len(records), time.perf_counter() - t0)


if __name__ == "__main__":
    main()
