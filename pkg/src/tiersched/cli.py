"""Command-line surface: generate, schedule, simulate, compare, sweep.

Exit codes: 0 success, 2 validation error (bad flags or malformed input),
3 internal invariant failure (a broken conservation or decomposition check
— loud by design, never silently repaired).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

from .bounds import bounds_report
from .model import (
    InternalInvariantError,
    Topology,
    ValidationError,
    reduce_to_server_level,
    save_matrix,
    validate_topology,
)
from .pipeline import (
    Schedule,
    SpreadoutSchedule,
    dumps_canonical,
    schedule_from_json,
    schedule_to_json,
    synthesize_fast,
    synthesize_spreadout,
)
from .simulate import simulate_fast, simulate_spreadout
from .workloads import gen_adversarial, gen_uniform, gen_zipf, load_trace

DEFAULT_B1 = 450e9
DEFAULT_B2 = 50e9
CSV_HEADER = [
    "scheduler",
    "n",
    "m",
    "b1",
    "b2",
    "alpha",
    "seed",
    "total_s",
    "algo_bw_Bps",
    "optimal_s",
    "ratio",
]


def _add_topology_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--topo",
        help="JSON file with scaleup_bw, scaleout_bw, wakeup_delay",
    )
    p.add_argument(
        "--b1", type=float, help="scale-up bandwidth, bytes/s (default 450e9)"
    )
    p.add_argument(
        "--b2", type=float, help="scale-out bandwidth, bytes/s (default 50e9)"
    )
    p.add_argument(
        "--alpha", type=float, help="wakeup delay per step, seconds (default 0)"
    )


def _topology(args: argparse.Namespace, n: int, m: int) -> Topology:
    b1, b2, alpha = DEFAULT_B1, DEFAULT_B2, 0.0
    topo_path = getattr(args, "topo", None)
    if topo_path:
        try:
            with open(topo_path, encoding="utf-8") as fh:
                payload = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read topology file: {exc}") from exc
        if not isinstance(payload, dict):
            raise ValidationError("topology file must hold a JSON object")
        b1 = float(payload.get("scaleup_bw", b1))
        b2 = float(payload.get("scaleout_bw", b2))
        alpha = float(payload.get("wakeup_delay", alpha))
    if getattr(args, "b1", None) is not None:
        b1 = args.b1
    if getattr(args, "b2", None) is not None:
        b2 = args.b2
    if getattr(args, "alpha", None) is not None:
        alpha = args.alpha
    t = Topology(
        n_servers=n,
        gpus_per_server=m,
        scaleup_bw=b1,
        scaleout_bw=b2,
        wakeup_delay=alpha,
    )
    validate_topology(t)
    return t


def _generate(
    kind: str,
    seed: int,
    t: Topology,
    mean: int | None,
    skew: float,
    total: int | None,
):
    if kind == "uniform":
        return gen_uniform(seed, t, mean if mean is not None else 50_000_000)
    if kind == "zipf":
        if total is None:
            raise ValidationError("zipf workloads need --total")
        return gen_zipf(seed, t, skew, total)
    if kind == "adversarial":
        if total is None:
            raise ValidationError(
                "adversarial workloads need --total (bytes per cross tile)"
            )
        return gen_adversarial(t, total)
    raise ValidationError(f"unknown workload kind: {kind!r}")


def cmd_gen(args: argparse.Namespace) -> int:
    t = Topology(
        n_servers=args.n,
        gpus_per_server=args.m,
        scaleup_bw=DEFAULT_B1,
        scaleout_bw=DEFAULT_B2,
    )
    validate_topology(t)
    d = _generate(args.kind, args.seed, t, args.mean, args.skew, args.total)
    save_matrix(d, args.out)
    print(f"wrote {args.out} ({d.gpu_count}x{d.gpu_count}, {d.total_bytes()} bytes)")
    return 0


def cmd_schedule(args: argparse.Namespace) -> int:
    d = load_trace(args.matrix)
    t = _topology(args, d.n_servers, d.gpus_per_server)
    start = time.perf_counter_ns()
    if args.scheduler == "fast":
        schedule: Schedule | SpreadoutSchedule = synthesize_fast(d, t)
    else:
        schedule = synthesize_spreadout(d, t)
    elapsed_us = (time.perf_counter_ns() - start) / 1000.0
    text = schedule_to_json(schedule)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"synthesis_us={elapsed_us:.1f}")
    else:
        # Keep stdout parseable JSON; the timing line goes to stderr.
        print(text)
        print(f"synthesis_us={elapsed_us:.1f}", file=sys.stderr)
    return 0


def _simulate_schedule(
    schedule: Schedule | SpreadoutSchedule, t: Topology
) -> tuple:
    if isinstance(schedule, SpreadoutSchedule):
        timeline = simulate_spreadout(schedule.server, t)
        server = schedule.server
        total_bytes = int(schedule.server.totals.sum())
    else:
        timeline = simulate_fast(schedule.plan, list(schedule.stages), t)
        server = reduce_to_server_level(schedule.plan.reshaped, t)
        total_bytes = schedule.plan.reshaped.total_bytes()
    return timeline, server, total_bytes


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        with open(args.schedule, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read schedule file: {exc}") from exc
    schedule = schedule_from_json(text)
    if isinstance(schedule, SpreadoutSchedule):
        n, m = schedule.server.n_servers, schedule.gpus_per_server
    else:
        n, m = (
            schedule.plan.reshaped.n_servers,
            schedule.plan.reshaped.gpus_per_server,
        )
    t = _topology(args, n, m)
    timeline, server, total_bytes = _simulate_schedule(schedule, t)
    report = bounds_report(server, t, total_bytes, timeline.total)
    ratio = (
        timeline.total / report.t_optimal if report.t_optimal > 0 else None
    )
    payload = {
        "timeline": timeline.to_json_dict(),
        "bounds": {
            "t_optimal": report.t_optimal,
            "t_fast_worstcase": report.t_fast_worstcase,
            "ratio_bound": report.ratio_bound,
            "algo_bw": report.algo_bw,
            "assumption_ok": report.assumption_ok,
        },
        "total_bytes": total_bytes,
        "ratio": ratio,
    }
    text = dumps_canonical(payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text)
    return 0


def _csv_row(
    scheduler: str,
    t: Topology,
    seed: int | None,
    total_s: float,
    total_bytes: int,
    optimal_s: float,
) -> list[str]:
    gpu_count = t.n_servers * t.gpus_per_server
    algo_bw = total_bytes / (gpu_count * total_s) if total_s > 0 else 0.0
    ratio = total_s / optimal_s if optimal_s > 0 else 0.0
    return [
        scheduler,
        str(t.n_servers),
        str(t.gpus_per_server),
        f"{t.scaleup_bw:.12g}",
        f"{t.scaleout_bw:.12g}",
        f"{t.wakeup_delay:.12g}",
        "" if seed is None else str(seed),
        f"{total_s:.12g}",
        f"{algo_bw:.12g}",
        f"{optimal_s:.12g}",
        f"{ratio:.12g}",
    ]


def _emit_csv(rows: list[list[str]], out: str | None) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(buffer.getvalue())
    else:
        sys.stdout.write(buffer.getvalue())


def _compare_rows(
    d, t: Topology, seed: int | None
) -> list[list[str]]:
    import warnings

    from .bounds import optimal_time

    fast = synthesize_fast(d, t)
    fast_line = simulate_fast(fast.plan, list(fast.stages), t)
    spread = synthesize_spreadout(d, t)
    spread_line = simulate_spreadout(spread.server, t)
    server = spread.server
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        t_opt = optimal_time(server, t)
    total_bytes = d.total_bytes()
    rows = [
        _csv_row("fast", t, seed, fast_line.total, total_bytes, t_opt),
        _csv_row("spreadout", t, seed, spread_line.total, total_bytes, t_opt),
    ]
    if t_opt > 0:
        rows.append(_csv_row("optimal", t, seed, t_opt, total_bytes, t_opt))
    return rows


def cmd_compare(args: argparse.Namespace) -> int:
    d = load_trace(args.matrix)
    t = _topology(args, d.n_servers, d.gpus_per_server)
    rows = _compare_rows(d, t, args.seed)
    _emit_csv(rows, args.out)
    return 0


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ValidationError(f"{flag} expects comma-separated integers") from exc
    if not values:
        raise ValidationError(f"{flag} expects at least one value")
    return values


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ValidationError(f"{flag} expects comma-separated numbers") from exc
    if not values:
        raise ValidationError(f"{flag} expects at least one value")
    return values


def cmd_sweep(args: argparse.Namespace) -> int:
    seeds = _parse_int_list(args.seeds, "--seeds")
    rows: list[list[str]] = []
    if args.servers:
        points = _parse_int_list(args.servers, "--servers")
        for n in points:
            t = _topology(args, n, args.m)
            for seed in seeds:
                d = _generate(
                    args.kind, seed, t, args.mean, args.skew, args.total
                )
                rows.extend(_compare_rows(d, t, seed))
    else:
        ratios = _parse_float_list(args.ratio, "--ratio")
        for r in ratios:
            if r < 1:
                raise ValidationError("--ratio values must be >= 1")
            base = _topology(args, args.n, args.m)
            t = Topology(
                n_servers=base.n_servers,
                gpus_per_server=base.gpus_per_server,
                scaleup_bw=r * base.scaleout_bw,
                scaleout_bw=base.scaleout_bw,
                wakeup_delay=base.wakeup_delay,
            )
            validate_topology(t)
            for seed in seeds:
                d = _generate(
                    args.kind, seed, t, args.mean, args.skew, args.total
                )
                rows.extend(_compare_rows(d, t, seed))
    _emit_csv(rows, args.out)
    return 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tiersched",
        description=(
            "All-to-All(v) schedule synthesis and analytical simulation "
            "for two-tier GPU clusters"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a seeded demand matrix")
    p.add_argument(
        "--kind",
        choices=["uniform", "zipf", "adversarial"],
        default="uniform",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=4, help="servers")
    p.add_argument("--m", type=int, default=8, help="GPUs per server")
    p.add_argument(
        "--mean", type=int, help="uniform: mean bytes per GPU pair"
    )
    p.add_argument(
        "--skew", type=float, default=0.8, help="zipf: skew in [0, 1)"
    )
    p.add_argument(
        "--total",
        type=int,
        help="zipf: total bytes; adversarial: bytes per cross tile",
    )
    p.add_argument("--out", required=True, help=".json or .csv matrix file")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("schedule", help="synthesize a schedule for a matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument(
        "--scheduler", choices=["fast", "spreadout"], default="fast"
    )
    p.add_argument("--out", help="schedule JSON path (default: stdout)")
    _add_topology_flags(p)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("simulate", help="time a schedule analytically")
    p.add_argument("--schedule", required=True, help="schedule JSON path")
    p.add_argument("--out", help="report JSON path (default: stdout)")
    _add_topology_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "compare", help="both schedulers plus the optimal bound, as CSV"
    )
    p.add_argument("--matrix", required=True)
    p.add_argument("--seed", type=int, help="seed column annotation")
    p.add_argument("--out", help="CSV path (default: stdout)")
    _add_topology_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser(
        "sweep", help="sweep server counts or bandwidth ratios, as CSV"
    )
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--servers", help="comma-separated server counts")
    group.add_argument("--ratio", help="comma-separated B1/B2 ratios")
    p.add_argument("--n", type=int, default=4, help="servers (ratio sweep)")
    p.add_argument("--m", type=int, default=8, help="GPUs per server")
    p.add_argument(
        "--kind", choices=["uniform", "zipf"], default="uniform"
    )
    p.add_argument("--mean", type=int, help="uniform: mean bytes per pair")
    p.add_argument("--skew", type=float, default=0.8)
    p.add_argument("--total", type=int, help="zipf: total bytes")
    p.add_argument("--seeds", default="0,1,2", help="comma-separated seeds")
    p.add_argument("--out", help="CSV path (default: stdout)")
    _add_topology_flags(p)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code is not None else 0
    try:
        return int(args.func(args) or 0)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InternalInvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
