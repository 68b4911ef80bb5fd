"""Intra-server skew balancing (phase 1 of the fast scheduler).

Each cross-server tile is reshaped in three conceptual steps:

1. *Sender balancing* — within the source server, overloaded GPUs hand bytes
   to underloaded ones over the scale-up fabric until every row of the tile
   sums to ⌊T/m⌋ or ⌈T/m⌉.
2. *Merged peer transfer* — each GPU then sends its whole per-destination
   quota to the GPU with the same local index on the destination server,
   collapsing the tile to a diagonal (scalar) form.  At this point GPUs within
   a server act identically over scale-out and the matrix reduces cleanly to
   the server level.
3. *Redistribution* — at the destination, bytes that arrived at a proxy GPU
   but belong to a different local GPU are forwarded over scale-up.  The
   per-pair redistribution table records exactly which bytes those are; it is
   split proportionally across the transfer stages that later deliver the
   pair's traffic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .model import (
    DemandMatrix,
    InternalInvariantError,
    TileView,
    Topology,
    ValidationError,
    tile,
)


@dataclass(frozen=True)
class IntraMove:
    """One intra-server transfer: `bytes` from `from_gpu` to `to_gpu`.

    `for_dst_server` is the server the bytes are bound for: the remote
    destination for balancing moves, the move's own server for redistribution
    moves (the data has already crossed scale-out).
    """

    server: int
    from_gpu: int
    to_gpu: int
    for_dst_server: int
    bytes: int

    def __post_init__(self) -> None:
        if self.from_gpu == self.to_gpu:
            raise ValidationError("intra move must change GPUs")
        if self.bytes <= 0:
            raise ValidationError("intra move must carry positive bytes")


@dataclass(frozen=True, eq=False)
class BalancePlan:
    """Everything phase 1 produces for one demand matrix.

    moves           -- balancing transfers, in deterministic emission order
    reshaped        -- the demand matrix with every cross tile in scalar form
    redistribution  -- per ordered server pair (i, j), an m x m table whose
                       entry (p, q) is bytes that arrive at GPU p of server j
                       (via the peer transfer from GPU p of server i) but
                       belong to GPU q; row p sums to the scalar tile's
                       diagonal entry p.
    """

    moves: tuple[IntraMove, ...]
    reshaped: DemandMatrix
    redistribution: dict[tuple[int, int], np.ndarray]


def balance_senders(tv: TileView) -> tuple[np.ndarray, list[IntraMove]]:
    """Equalize the tile's row sums to ⌊T/m⌋/⌈T/m⌉; return (tile, moves).

    The first (T mod m) rows get the ceiling target.  Bytes move greedily from
    the most-overloaded to the most-underloaded row (ties: lowest GPU index),
    draining the currently largest cell of the shedding row first (ties:
    lowest column).  Moved bytes keep their destination column, so the
    balanced tile still records where every byte must ultimately land.
    """
    if tv.is_intra:
        raise ValidationError("balance_senders expects a cross-server tile")
    tiled = tv.entries.astype(np.int64, copy=True)
    m = tiled.shape[0]
    rows = tiled.sum(axis=1)
    total = int(rows.sum())
    base, extra = divmod(total, m)
    target = np.full(m, base, dtype=np.int64)
    target[:extra] += 1
    dev = rows - target
    moves: list[IntraMove] = []
    over = [g for g in range(m) if dev[g] > 0]
    under = [g for g in range(m) if dev[g] < 0]
    while over:
        over.sort(key=lambda g: (-dev[g], g))
        under.sort(key=lambda g: (dev[g], g))
        g, h = over[0], under[0]
        chunk = int(min(dev[g], -dev[h]))
        left = chunk
        while left > 0:
            q = int(np.argmax(tiled[g]))
            take = min(left, int(tiled[g, q]))
            tiled[g, q] -= take
            tiled[h, q] += take
            left -= take
        dev[g] -= chunk
        dev[h] += chunk
        moves.append(
            IntraMove(
                server=tv.src_server,
                from_gpu=g,
                to_gpu=h,
                for_dst_server=tv.dst_server,
                bytes=chunk,
            )
        )
        if dev[g] == 0:
            over.remove(g)
        if dev[h] == 0:
            under.remove(h)
    return tiled, moves


def merge_peer(balanced_tile: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Collapse a row-balanced tile to diag(row sums) plus its redist table."""
    rows = balanced_tile.sum(axis=1)
    if rows.size and int(rows.max() - rows.min()) > 1:
        raise ValidationError("merge_peer expects row sums differing by <= 1")
    scalar = np.diag(rows).astype(np.int64)
    redist = balanced_tile.astype(np.int64, copy=True)
    return scalar, redist


def build_balance_plan(d: DemandMatrix, t: Topology) -> BalancePlan:
    """Run balance_senders + merge_peer on every cross tile of the matrix."""
    n, m = t.n_servers, t.gpus_per_server
    if (d.n_servers, d.gpus_per_server) != (n, m):
        raise ValidationError(
            f"matrix is {d.n_servers}x{d.gpus_per_server} but topology is {n}x{m}"
        )
    reshaped = d.sizes.copy()
    moves: list[IntraMove] = []
    redistribution: dict[tuple[int, int], np.ndarray] = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            tv = tile(d, i, j)
            original_total = tv.total()
            balanced, tile_moves = balance_senders(tv)
            scalar, redist = merge_peer(balanced)
            if (
                int(scalar.sum()) != original_total
                or int(redist.sum()) != original_total
            ):
                raise InternalInvariantError(
                    f"tile ({i},{j}) lost bytes during balancing"
                )
            reshaped[i * m : (i + 1) * m, j * m : (j + 1) * m] = scalar
            moves.extend(tile_moves)
            redistribution[(i, j)] = redist
    reshaped_matrix = DemandMatrix(
        n_servers=n, gpus_per_server=m, sizes=reshaped
    )
    return BalancePlan(
        moves=tuple(moves),
        reshaped=reshaped_matrix,
        redistribution=redistribution,
    )


def split_deliveries(
    table: np.ndarray, deliveries: Sequence[int]
) -> list[np.ndarray]:
    """Split a redistribution table across the stages delivering its pair.

    ``deliveries`` are the per-stage byte counts for the pair and must sum to
    the table total.  Every stage but the last gets ⌊cell·r_k/T⌋ of each cell;
    the last stage gets whatever remains, so the pieces sum to the table
    exactly.
    """
    total = int(table.sum())
    if sum(int(r) for r in deliveries) != total:
        raise ValidationError(
            "stage deliveries must sum to the pair's tile total"
        )
    if total == 0:
        return [np.zeros_like(table) for _ in deliveries]
    pieces: list[np.ndarray] = []
    acc = np.zeros_like(table)
    # int64 products cell*r can overflow for very large tiles; fall back to
    # exact Python integers when they might.
    exact = int(table.max()) * int(max(deliveries, default=0)) >= (1 << 63)
    work = table.astype(object) if exact else table
    for k, r in enumerate(deliveries):
        if k == len(deliveries) - 1:
            piece = table - acc
        else:
            piece = (work * int(r) // total).astype(np.int64)
        acc = acc + piece
        pieces.append(piece.astype(np.int64))
    return pieces


def stage_redistribution(
    plan: BalancePlan,
    stage_matching: Iterable[tuple[int, int]],
    delivered: Mapping[tuple[int, int], int] | None = None,
    earlier: Mapping[tuple[int, int], Sequence[int]] | None = None,
) -> list[IntraMove]:
    """Moves that fix data placement inside each matched destination server.

    For each matched pair (i, j) the bytes delivered this stage are routed
    from the proxy GPU p to their true GPU q per the pair's redistribution
    table, scaled to this stage's share.  With no ``delivered`` mapping the
    whole table is emitted (single-stage delivery).  Otherwise non-final
    stages emit ⌊cell·r/T⌋ and the pair's final stage (detected when earlier
    plus current deliveries reach the tile total) emits the remainder.
    """
    pairs = list(stage_matching)
    if len({i for i, _ in pairs}) != len(pairs) or len(
        {j for _, j in pairs}
    ) != len(pairs):
        raise ValidationError("stage matching must be one-to-one")
    moves: list[IntraMove] = []
    for i, j in pairs:
        if (i, j) not in plan.redistribution:
            raise ValidationError(f"unknown server pair ({i},{j})")
        table = plan.redistribution[(i, j)]
        total = int(table.sum())
        if total == 0:
            continue
        if delivered is None:
            piece = table
        else:
            r = int(delivered[(i, j)])
            prior = [int(x) for x in (earlier or {}).get((i, j), ())]
            done = sum(prior) + r
            if done > total:
                raise ValidationError(
                    f"pair ({i},{j}) over-delivered: {done} > {total}"
                )
            if done == total:
                piece = split_deliveries(table, prior + [r])[-1]
            else:
                piece = split_deliveries(table, [r, total - r])[0]
        m = table.shape[0]
        for p in range(m):
            for q in range(m):
                if p != q and piece[p, q] > 0:
                    moves.append(
                        IntraMove(
                            server=j,
                            from_gpu=p,
                            to_gpu=q,
                            for_dst_server=j,
                            bytes=int(piece[p, q]),
                        )
                    )
    return moves
