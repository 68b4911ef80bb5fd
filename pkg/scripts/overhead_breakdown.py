#!/usr/bin/env python3
"""Break a skewed workload's completion time into pipeline components.

For each Zipf skew level, reports how the completion time divides between
sender balancing, the intra-server all-to-all, the scale-out stages, and
receiver-side redistribution, plus the share of balancing and the final
(unhidden) redistribution relative to total scale-out time.

Example:
    python3 scripts/overhead_breakdown.py --skews 0.3 0.6 0.9 --out overhead.csv
"""

from __future__ import annotations

import argparse
import csv
import sys
import warnings

import tiersched as ts


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--skews", type=float, nargs="+", default=[0.3, 0.6, 0.9])
    ap.add_argument("--servers", type=int, default=4)
    ap.add_argument("--gpus", type=int, default=8)
    ap.add_argument("--b1", type=float, default=1750e9)
    ap.add_argument("--b2", type=float, default=50e9)
    ap.add_argument("--alpha", type=float, default=0.0)
    ap.add_argument("--total-bytes", type=int, default=10_000_000_000)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--out", type=str, default="-")
    args = ap.parse_args(argv)

    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    writer = csv.writer(out)
    writer.writerow(
        ["skew", "seed", "t_balance", "t_intra", "scale_out_s",
         "redistribution_s", "total_s", "overhead_share"]
    )

    t = ts.Topology(
        n_servers=args.servers,
        gpus_per_server=args.gpus,
        scaleup_bw=args.b1,
        scaleout_bw=args.b2,
        wakeup_delay=args.alpha,
    )
    summary: dict[float, list[float]] = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        for skew in args.skews:
            for seed in range(args.seeds):
                d = ts.gen_zipf(seed, t, skew, args.total_bytes)
                schedule = ts.synthesize_fast(d, t)
                line = ts.simulate_fast(schedule.plan, list(schedule.stages), t)
                scale_out = sum(line.scale_out)
                share = (
                    (line.t_balance + line.redistribution[-1]) / scale_out
                    if scale_out
                    else float("nan")
                )
                writer.writerow(
                    [skew, seed, f"{line.t_balance:.9e}",
                     f"{line.t_intra_a2a:.9e}", f"{scale_out:.9e}",
                     f"{sum(line.redistribution):.9e}",
                     f"{line.total:.9e}", f"{share:.6f}"]
                )
                summary.setdefault(skew, []).append(share)

    if out is not sys.stdout:
        out.close()
    for skew in args.skews:
        vals = summary[skew]
        print(
            f"skew={skew:.1f}: mean (balance + final redistribution) / "
            f"scale-out = {100 * sum(vals) / len(vals):.2f}% "
            f"over {len(vals)} seeds",
            file=sys.stderr,
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
