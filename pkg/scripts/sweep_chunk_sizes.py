#!/usr/bin/env python3
"""Latency/recompute sweep over chunk sizes with an echo model.

For each chunk size n, simulate every source sentence under both prompt modes
with a scripted echo model (each chunk 'translates' to its uppercased self)
and report mean AL, mean simulated WWT, and total recompute. Shows the
conversational-vs-offline recompute gap widening as rounds multiply.

Usage:
  python scripts/sweep_chunk_sizes.py --src toy/src.txt --csv sweep.csv
"""

import argparse
import csv
import sys
from statistics import fmean

from simultraj.cli import DEFAULT_CHUNK_SIZES
from simultraj.metrics import CostModel, run_average_lagging, simulated_wwt
from simultraj.simulator import GREEDY, cache_savings, run, scripted_echo


def sweep(sources, chunk_sizes, cost):
    for n in chunk_sizes:
        al, wwt_conv, wwt_off, conv_total, off_total = [], [], [], 0, 0
        for idx, source in enumerate(sources):
            sim = run(
                source,
                scripted_echo(source, n, beam=1),
                chunk_size=n,
                strategy=GREEDY,
                beam=1,
                pair_id=idx,
            )
            al.append(run_average_lagging(sim))
            wwt_conv.append(simulated_wwt(sim, cost, "conversational"))
            wwt_off.append(simulated_wwt(sim, cost, "offline"))
            totals = cache_savings(sim)
            conv_total += totals["total_conversational"]
            off_total += totals["total_offline"]
        yield {
            "chunk_size": n,
            "al_mean": round(fmean(al), 4),
            "wwt_conversational": round(fmean(wwt_conv), 4),
            "wwt_offline": round(fmean(wwt_off), 4),
            "recompute_conversational": conv_total,
            "recompute_offline": off_total,
        }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--src", required=True, help="one source sentence per line")
    parser.add_argument("--chunk-sizes", type=int, nargs="+", default=list(DEFAULT_CHUNK_SIZES))
    parser.add_argument("--cost-recompute", type=float, default=1.0)
    parser.add_argument("--cost-word", type=float, default=1.0)
    parser.add_argument("--csv", default="", help="optional output CSV path")
    args = parser.parse_args()

    with open(args.src, encoding="utf-8") as f:
        sources = [line.split() for line in f if line.strip()]
    if not sources:
        sys.exit("no source sentences")

    cost = CostModel(args.cost_recompute, args.cost_word)
    rows = list(sweep(sources, args.chunk_sizes, cost))

    header = list(rows[0])
    widths = [max(len(h), 12) for h in header]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in rows:
        print("  ".join(str(row[h]).ljust(w) for h, w in zip(header, widths)))

    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=header)
            writer.writeheader()
            writer.writerows(rows)
        print(f"\nwrote {args.csv}")


if __name__ == "__main__":
    main()
