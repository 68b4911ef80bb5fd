#!/usr/bin/env python3
"""Sweep server count and report completion time against the lower bound.

Writes one CSV row per (n, seed) pair and prints a per-n summary of the
mean completion/optimal ratio to stderr.

Example:
    python3 scripts/scale_sweep.py --servers 4 8 16 32 40 --out scale.csv
"""

from __future__ import annotations

import argparse
import csv
import sys
import warnings

import tiersched as ts


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--servers", type=int, nargs="+",
                    default=[4, 8, 16, 32, 40])
    ap.add_argument("--gpus", type=int, default=8)
    ap.add_argument("--b1", type=float, default=450e9)
    ap.add_argument("--b2", type=float, default=50e9)
    ap.add_argument("--alpha", type=float, default=0.0)
    ap.add_argument("--mean-bytes", type=int, default=50_000_000)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--out", type=str, default="-")
    args = ap.parse_args(argv)

    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    writer = csv.writer(out)
    writer.writerow(["n", "m", "seed", "total_s", "optimal_s", "ratio"])

    summary: dict[int, list[float]] = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        for n in args.servers:
            t = ts.Topology(
                n_servers=n,
                gpus_per_server=args.gpus,
                scaleup_bw=args.b1,
                scaleout_bw=args.b2,
                wakeup_delay=args.alpha,
            )
            for seed in range(args.seeds):
                d = ts.gen_uniform(seed, t, args.mean_bytes)
                schedule = ts.synthesize_fast(d, t)
                line = ts.simulate_fast(schedule.plan, list(schedule.stages), t)
                server = ts.reduce_to_server_level(schedule.plan.reshaped, t)
                opt = ts.optimal_time(server, t)
                ratio = line.total / opt if opt else float("nan")
                writer.writerow(
                    [n, args.gpus, seed, f"{line.total:.9e}",
                     f"{opt:.9e}", f"{ratio:.6f}"]
                )
                summary.setdefault(n, []).append(ratio)

    if out is not sys.stdout:
        out.close()
    for n in args.servers:
        vals = summary[n]
        print(
            f"n={n:3d}: mean completion/optimal = "
            f"{sum(vals) / len(vals):.4f} over {len(vals)} seeds",
            file=sys.stderr,
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
