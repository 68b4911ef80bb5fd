"""Analytical cost model for synthesized schedules.

Transfers are modelled as wakeup delay plus bytes over bandwidth, with the
per-GPU bottleneck governing each phase.  The fast schedule pipelines stage
k's destination-side redistribution behind stage k+1's scale-out transfer:

    total = t_balance
          + max(out_1, t_intra)
          + sum over k >= 2 of max(out_k, redist_{k-1})
          + redist_K

where out_k is stage k's scale-out time (largest per-edge real demand, split
across the m NIC-attached GPUs) and redist_k times the intra-server moves
that place stage k's arrivals.  With stages sorted ascending and scale-up
sufficiently faster than scale-out, every max() resolves to out_k and the
scale-out phases sum to exactly max_rc / (m * B2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .balance import BalancePlan, IntraMove, split_deliveries
from .birkhoff import PermutationStage
from .model import (
    DemandMatrix,
    InternalInvariantError,
    ServerMatrix,
    Topology,
    ValidationError,
    max_rc,
    reduce_to_server_level,
)


@dataclass(frozen=True)
class Timeline:
    """Per-phase breakdown of a schedule's modelled completion time."""

    t_balance: float
    t_intra_a2a: float
    scale_out: tuple[float, ...]
    redistribution: tuple[float, ...]
    total: float

    def to_json_dict(self) -> dict:
        return {
            "t_balance": self.t_balance,
            "t_intra_a2a": self.t_intra_a2a,
            "scale_out": list(self.scale_out),
            "redistribution": list(self.redistribution),
            "total": self.total,
        }


def step_cost(nbytes: float, bw: float, t: Topology) -> float:
    """Wakeup delay plus transfer time; zero bytes cost nothing."""
    if bw <= 0:
        raise ValidationError("bandwidth must be positive")
    if nbytes < 0:
        raise ValidationError("byte count must be non-negative")
    if nbytes == 0:
        return 0.0
    return t.wakeup_delay + nbytes / bw


def intra_phase_time(moves: list[IntraMove], t: Topology) -> float:
    """Completion time of one batch of concurrent intra-server moves.

    Within each server the bottleneck GPU (largest of its send and receive
    totals) sets the pace over scale-up; servers run in parallel, so the
    slowest server governs.  An empty batch costs nothing.
    """
    send: dict[tuple[int, int], int] = {}
    recv: dict[tuple[int, int], int] = {}
    for mv in moves:
        send[(mv.server, mv.from_gpu)] = (
            send.get((mv.server, mv.from_gpu), 0) + mv.bytes
        )
        recv[(mv.server, mv.to_gpu)] = (
            recv.get((mv.server, mv.to_gpu), 0) + mv.bytes
        )
    worst = 0
    for table in (send, recv):
        for amount in table.values():
            worst = max(worst, amount)
    return step_cost(worst, t.scaleup_bw, t)


def _intra_alltoall_time(reshaped: DemandMatrix, t: Topology) -> float:
    """Time for the same-server all-to-all blocks, run concurrently."""
    n, m = reshaped.n_servers, reshaped.gpus_per_server
    worst = 0
    for i in range(n):
        block = reshaped.sizes[i * m : (i + 1) * m, i * m : (i + 1) * m]
        if block.any():
            worst = max(
                worst,
                int(block.sum(axis=1).max()),
                int(block.sum(axis=0).max()),
            )
    return step_cost(worst, t.scaleup_bw, t)


def simulate_fast(
    plan: BalancePlan, stages: list[PermutationStage], t: Topology
) -> Timeline:
    """Run the pipelined cost model over a balanced plan and sorted stages."""
    n, m = t.n_servers, t.gpus_per_server
    if (plan.reshaped.n_servers, plan.reshaped.gpus_per_server) != (n, m):
        raise ValidationError("plan and topology dimensions disagree")
    weights = [st.weight for st in stages]
    if any(a > b for a, b in zip(weights, weights[1:])):
        raise ValidationError("stages must be sorted by ascending weight")

    t_balance = intra_phase_time(list(plan.moves), t)
    t_intra = _intra_alltoall_time(plan.reshaped, t)

    # Per-pair delivery lists: which stages carry each pair and how much.
    pair_stages: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for k, stage in enumerate(stages):
        for src, dst, b in stage.edges:
            pair_stages.setdefault((src, dst), []).append((k, b))

    for (i, j), entries in pair_stages.items():
        if (i, j) not in plan.redistribution:
            raise InternalInvariantError(
                f"stage edge for unknown server pair ({i},{j})"
            )
        carried = sum(b for _, b in entries)
        expected = int(plan.redistribution[(i, j)].sum())
        if carried != expected:
            raise InternalInvariantError(
                f"pair ({i},{j}) stages carry {carried} bytes, tile has {expected}"
            )
    for (i, j), table in plan.redistribution.items():
        if table.sum() > 0 and (i, j) not in pair_stages:
            raise InternalInvariantError(
                f"pair ({i},{j}) has traffic but no stage delivers it"
            )

    # Scale-out time per stage: the largest per-edge demand, striped over the
    # m GPUs sharing the server pair's scale-out path.
    out = [
        step_cost(st.max_edge_bytes() / m, t.scaleout_bw, t) for st in stages
    ]

    # Redistribution bottleneck per stage, accumulated pair by pair.
    redist_worst = [0] * len(stages)
    for (i, j), entries in pair_stages.items():
        table = plan.redistribution[(i, j)]
        pieces = split_deliveries(table, [b for _, b in entries])
        for (k, _), piece in zip(entries, pieces):
            moved = piece.copy()
            np.fill_diagonal(moved, 0)
            if moved.any():
                worst = int(
                    max(moved.sum(axis=1).max(), moved.sum(axis=0).max())
                )
                redist_worst[k] = max(redist_worst[k], worst)
    redist = [step_cost(w, t.scaleup_bw, t) for w in redist_worst]

    if not stages:
        total = t_balance + t_intra
        timeline = Timeline(
            t_balance=t_balance,
            t_intra_a2a=t_intra,
            scale_out=(),
            redistribution=(),
            total=total,
        )
        return timeline

    total = t_balance + max(out[0], t_intra)
    for k in range(1, len(stages)):
        total += max(out[k], redist[k - 1])
    total += redist[-1]

    server = reduce_to_server_level(plan.reshaped, t)
    floor = max_rc(server) / (m * t.scaleout_bw)
    if total < floor * (1 - 1e-12):
        raise InternalInvariantError(
            "modelled completion fell below the scale-out lower bound"
        )
    return Timeline(
        t_balance=t_balance,
        t_intra_a2a=t_intra,
        scale_out=tuple(out),
        redistribution=tuple(redist),
        total=total,
    )


def simulate_spreadout(
    s: ServerMatrix, t: Topology, demand: DemandMatrix | None = None
) -> Timeline:
    """Cost of the shifted baseline: stage durations simply add up.

    Server-level mode assumes each server's demand is spread evenly over its
    m GPUs.  Passing the original ``demand`` matrix instead times each stage
    by the worst per-GPU send/receive among its edges' tiles, charging the
    baseline's lack of intra-server balancing.
    """
    n = s.n_servers
    m = t.gpus_per_server
    if n != t.n_servers:
        raise ValidationError("server matrix and topology dimensions disagree")
    off = s.off_diagonal()
    durations: list[float] = []
    for shift in range(1, n):
        if demand is None:
            governing = max(
                int(off[src, (src + shift) % n]) for src in range(n)
            ) / m
        else:
            if (demand.n_servers, demand.gpus_per_server) != (n, m):
                raise ValidationError(
                    "demand matrix and topology dimensions disagree"
                )
            governing = 0
            for src in range(n):
                dst = (src + shift) % n
                block = demand.sizes[
                    src * m : (src + 1) * m, dst * m : (dst + 1) * m
                ]
                if block.any():
                    governing = max(
                        governing,
                        int(block.sum(axis=1).max()),
                        int(block.sum(axis=0).max()),
                    )
        durations.append(step_cost(governing, t.scaleout_bw, t))
    total = sum(durations)
    return Timeline(
        t_balance=0.0,
        t_intra_a2a=0.0,
        scale_out=tuple(durations),
        redistribution=tuple(0.0 for _ in durations),
        total=total,
    )
