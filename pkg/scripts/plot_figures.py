"""Plot mean l against the swept variable from *_summary.csv files.

    python3 scripts/plot_figures.py runs/fig1_left_summary.csv --x jitter_fraction --group scheme
    python3 scripts/plot_figures.py runs/fig2_summary.csv --x jT --group scheme

Needs matplotlib (``pip install -e .[plot]``).
"""

import argparse
import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def load(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("summary", type=Path)
    p.add_argument("--x", default="jitter_fraction", help="column for the horizontal axis")
    p.add_argument("--group", default="scheme", help="one curve per distinct value of this column")
    p.add_argument("--out", type=Path, help="image path (default: next to the CSV)")
    args = p.parse_args()

    curves = defaultdict(list)
    for row in load(args.summary):
        curves[row[args.group]].append((float(row[args.x]), float(row["mean_l"]), float(row["stderr_l"])))

    fig, ax = plt.subplots(figsize=(5, 4))
    for label, pts in sorted(curves.items()):
        pts.sort()
        x, y, e = zip(*pts)
        ax.errorbar(x, y, yerr=e, marker="o", ms=3, capsize=2, label=f"{args.group}={label}")
    ax.set_xlabel(args.x)
    ax.set_ylabel("mean l = log10(1 - Tr rho_S^2)")
    ax.legend()
    fig.tight_layout()
    out = args.out or args.summary.with_suffix(".png")
    fig.savefig(out, dpi=150)
    print(out)


if __name__ == "__main__":
    main()
