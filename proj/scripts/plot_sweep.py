#!/usr/bin/env python3
"""Plot a sweep CSV produced by `cogmac sweep`.

Draws one curve per variant (metric vs lambda). If the CSV carries simulation
columns, the matching empirical estimates are overlaid with error bars.
"""

import argparse
import csv
import math
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_rows(path):
    with open(path, newline="") as f:
        lines = [ln for ln in f if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv_path")
    ap.add_argument("--metric", default="mu_s",
                    help="column to plot (default: mu_s)")
    ap.add_argument("--out", help="output image (default: <csv>.png)")
    args = ap.parse_args()

    rows = read_rows(args.csv_path)
    if not rows:
        sys.exit("no data rows in " + args.csv_path)
    if args.metric not in rows[0]:
        sys.exit(f"no column '{args.metric}' in {args.csv_path}")

    variants = list(dict.fromkeys(r["variant"] for r in rows))
    sim_col = "sim_" + args.metric
    have_sim = sim_col in rows[0]

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for variant in variants:
        pts = [(float(r["lambda"]), float(r[args.metric]))
               for r in rows if r["variant"] == variant]
        pts.sort()
        style = "--" if variant == "perfect" else "-"
        ax.plot([p[0] for p in pts], [p[1] for p in pts], style,
                marker=".", label=variant)
        if have_sim:
            sim = [(float(r["lambda"]), float(r[sim_col]),
                    float(r[sim_col + "_ci"]))
                   for r in rows
                   if r["variant"] == variant and not math.isnan(float(r[sim_col]))]
            if sim:
                ax.errorbar([p[0] for p in sim], [p[1] for p in sim],
                            yerr=[p[2] for p in sim], fmt="x", capsize=2,
                            color=ax.lines[-1].get_color())

    ax.set_xlabel("lambda (packets/slot)")
    ax.set_ylabel(args.metric)
    ax.grid(True, alpha=0.3)
    ax.legend()
    out = args.out or args.csv_path.rsplit(".", 1)[0] + ".png"
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print("wrote", out)


if __name__ == "__main__":
    main()
