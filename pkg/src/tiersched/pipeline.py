"""End-to-end schedule synthesis and canonical JSON round-tripping.

Synthesis is pure and deterministic: every rank running it on the same
demand matrix derives the same schedule with no coordination.  The JSON
form is canonical (sorted keys, fixed separators, integers only), so equal
schedules serialize to byte-identical documents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .balance import BalancePlan, IntraMove, build_balance_plan
from .birkhoff import (
    Decomposition,
    PermutationStage,
    decompose_server_matrix,
    sort_stages_ascending,
    strip_auxiliary,
)
from .model import (
    DemandMatrix,
    ServerMatrix,
    Topology,
    ValidationError,
    reduce_to_server_level,
)
from .spreadout import spreadout_stages


@dataclass(frozen=True, eq=False)
class Schedule:
    """A synthesized fast schedule: balance plan plus sorted real stages."""

    plan: BalancePlan
    decomposition: Decomposition
    stages: tuple[PermutationStage, ...]


@dataclass(frozen=True, eq=False)
class SpreadoutSchedule:
    """The baseline schedule: server totals plus the shifted stages."""

    server: ServerMatrix
    gpus_per_server: int
    stages: tuple[PermutationStage, ...]


def synthesize_fast(d: DemandMatrix, t: Topology) -> Schedule:
    """Balance, reduce, decompose, strip, and sort — the whole scheduler."""
    plan = build_balance_plan(d, t)
    server = reduce_to_server_level(plan.reshaped, t)
    decomposition = decompose_server_matrix(server)
    stripped = strip_auxiliary(list(decomposition.stages), decomposition.aux)
    stages = tuple(sort_stages_ascending(stripped))
    return Schedule(plan=plan, decomposition=decomposition, stages=stages)


def synthesize_spreadout(d: DemandMatrix, t: Topology) -> SpreadoutSchedule:
    """Reduce to server level and emit the shifted baseline stages."""
    server = reduce_to_server_level(d, t)
    return SpreadoutSchedule(
        server=server,
        gpus_per_server=t.gpus_per_server,
        stages=tuple(spreadout_stages(server)),
    )


def dumps_canonical(payload: dict) -> str:
    """Serialize deterministically: sorted keys, no whitespace."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _stages_to_json(stages: tuple[PermutationStage, ...]) -> list[dict]:
    return [
        {
            "weight": int(st.weight),
            "edges": [[int(s), int(d), int(b)] for s, d, b in st.edges],
        }
        for st in stages
    ]


def _stages_from_json(items: list[dict]) -> tuple[PermutationStage, ...]:
    return tuple(
        PermutationStage(
            weight=int(item["weight"]),
            edges=tuple(
                (int(s), int(d), int(b)) for s, d, b in item["edges"]
            ),
        )
        for item in items
    )


def schedule_to_json(schedule: Schedule | SpreadoutSchedule) -> str:
    """Canonical JSON text for either scheduler's output.

    The document contains only the schedule itself (all integers): anything
    run-dependent, like synthesis wall time, stays out so that repeated runs
    are byte-identical.
    """
    if isinstance(schedule, SpreadoutSchedule):
        payload = {
            "scheduler": "spreadout",
            "n": schedule.server.n_servers,
            "m": schedule.gpus_per_server,
            "server_totals": [
                [int(x) for x in row] for row in schedule.server.totals
            ],
            "stages": _stages_to_json(schedule.stages),
        }
        return dumps_canonical(payload)
    plan = schedule.plan
    payload = {
        "scheduler": "fast",
        "n": plan.reshaped.n_servers,
        "m": plan.reshaped.gpus_per_server,
        "balance": {
            "moves": [
                {
                    "server": mv.server,
                    "from": mv.from_gpu,
                    "to": mv.to_gpu,
                    "dst_server": mv.for_dst_server,
                    "bytes": mv.bytes,
                }
                for mv in plan.moves
            ],
            "reshaped": [
                [int(x) for x in row] for row in plan.reshaped.sizes
            ],
            "redist": {
                f"{i}->{j}": [[int(x) for x in row] for row in table]
                for (i, j), table in plan.redistribution.items()
            },
        },
        "common_sum": schedule.decomposition.common_sum,
        "aux": [[int(x) for x in row] for row in schedule.decomposition.aux],
        "stages": _stages_to_json(schedule.stages),
    }
    return dumps_canonical(payload)


def schedule_from_json(text: str) -> Schedule | SpreadoutSchedule:
    """Rebuild a schedule from its canonical JSON text."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"schedule is not valid JSON: {exc}") from exc
    kind = payload.get("scheduler")
    if kind == "spreadout":
        try:
            totals = np.array(payload["server_totals"], dtype=np.int64)
            return SpreadoutSchedule(
                server=ServerMatrix(totals=totals),
                gpus_per_server=int(payload["m"]),
                stages=_stages_from_json(payload["stages"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(
                f"malformed schedule document: {exc}"
            ) from exc
    if kind != "fast":
        raise ValidationError(f"unknown scheduler kind: {kind!r}")
    try:
        n = int(payload["n"])
        m = int(payload["m"])
        balance = payload["balance"]
        moves = tuple(
            IntraMove(
                server=int(mv["server"]),
                from_gpu=int(mv["from"]),
                to_gpu=int(mv["to"]),
                for_dst_server=int(mv["dst_server"]),
                bytes=int(mv["bytes"]),
            )
            for mv in balance["moves"]
        )
        reshaped = DemandMatrix(
            n_servers=n,
            gpus_per_server=m,
            sizes=np.array(balance["reshaped"], dtype=np.int64),
        )
        redistribution = {}
        for key, table in balance["redist"].items():
            i, j = key.split("->")
            redistribution[(int(i), int(j))] = np.array(
                table, dtype=np.int64
            )
        plan = BalancePlan(
            moves=moves, reshaped=reshaped, redistribution=redistribution
        )
        aux = np.array(payload["aux"], dtype=np.int64)
        decomposition = Decomposition(
            stages=(),
            aux=aux,
            common_sum=int(payload["common_sum"]),
        )
        stages = _stages_from_json(payload["stages"])
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"malformed schedule document: {exc}") from exc
    return Schedule(plan=plan, decomposition=decomposition, stages=stages)
