#!/usr/bin/env python3
"""Sweep the scale-up/scale-out bandwidth ratio and compare schedulers.

For each ratio r the scale-up bandwidth is set to r times the scale-out
bandwidth; the same seeded workload is scheduled by both the balanced
scheduler and the shifted baseline.  Reports per-GPU algorithmic bandwidth
normalized by the scale-out bandwidth (1.0 = line rate).

Example:
    python3 scripts/ratio_sweep.py --ratios 2 4 9 18 36 --out ratio.csv
"""

from __future__ import annotations

import argparse
import csv
import sys
import warnings

import tiersched as ts


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ratios", type=float, nargs="+",
                    default=[2.0, 4.0, 9.0, 18.0, 36.0])
    ap.add_argument("--servers", type=int, default=4)
    ap.add_argument("--gpus", type=int, default=8)
    ap.add_argument("--b2", type=float, default=50e9)
    ap.add_argument("--alpha", type=float, default=0.0)
    ap.add_argument("--mean-bytes", type=int, default=50_000_000)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--out", type=str, default="-")
    args = ap.parse_args(argv)

    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    writer = csv.writer(out)
    writer.writerow(
        ["scheduler", "ratio", "seed", "total_s", "algo_bw_Bps", "normalized"]
    )

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        for seed in range(args.seeds):
            base = ts.Topology(
                n_servers=args.servers,
                gpus_per_server=args.gpus,
                scaleup_bw=args.ratios[0] * args.b2,
                scaleout_bw=args.b2,
                wakeup_delay=args.alpha,
            )
            d = ts.gen_uniform(seed, base, args.mean_bytes)
            total_bytes = d.total_bytes()
            for r in args.ratios:
                t = ts.Topology(
                    n_servers=args.servers,
                    gpus_per_server=args.gpus,
                    scaleup_bw=r * args.b2,
                    scaleout_bw=args.b2,
                    wakeup_delay=args.alpha,
                )
                fast = ts.synthesize_fast(d, t)
                fast_total = ts.simulate_fast(
                    fast.plan, list(fast.stages), t
                ).total
                slow_total = ts.simulate_spreadout(
                    ts.reduce_to_server_level(d, t), t, demand=d
                ).total
                for name, total in (("fast", fast_total),
                                    ("spreadout", slow_total)):
                    bw = ts.algorithmic_bandwidth(
                        total_bytes, t.gpu_count, total
                    )
                    writer.writerow(
                        [name, r, seed, f"{total:.9e}",
                         f"{bw:.6e}", f"{bw / args.b2:.6f}"]
                    )

    if out is not sys.stdout:
        out.close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
