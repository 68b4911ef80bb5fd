"""Round-robin shifted baseline scheduler for cross-server traffic.

Stage i (1 <= i <= n-1) has every server s send its whole demand for server
(s + i) mod n.  Each stage is trivially one-to-one, but its duration is set by
the largest demand among its edges, so skewed traffic serializes badly: the
completion in byte units is the sum over stages of the stage maximum, which
is never below the max row/column sum and usually well above it.
"""

from __future__ import annotations

import numpy as np

from .balance import IntraMove
from .birkhoff import PermutationStage
from .model import ServerMatrix, Topology, ValidationError


def spreadout_stages(s: ServerMatrix) -> list[PermutationStage]:
    """The n-1 shifted stages; stage weight is its largest edge demand."""
    off = s.off_diagonal()
    n = s.n_servers
    stages: list[PermutationStage] = []
    for shift in range(1, n):
        edges = tuple(
            (src, (src + shift) % n, int(off[src, (src + shift) % n]))
            for src in range(n)
        )
        weight = max(b for _, _, b in edges)
        stages.append(PermutationStage(weight=weight, edges=edges))
    return stages


def spreadout_completion_units(s: ServerMatrix) -> int:
    """Sum of per-stage maxima, in bytes (per sending server)."""
    return sum(st.weight for st in spreadout_stages(s))


def spreadout_intra(
    ops: np.ndarray, t: Topology, server: int = 0
) -> list[list[IntraMove]]:
    """Shifted rounds for one server's internal all-to-all.

    ``ops`` is the server's m x m intra tile.  Round k (1 <= k <= m-1) moves
    entry (g, (g + k) mod m) for every GPU g, mirroring the cross-server
    schedule's shifted structure at the GPU level.
    """
    m = t.gpus_per_server
    if ops.shape != (m, m):
        raise ValidationError(
            f"intra tile must be {m}x{m}, got {ops.shape}"
        )
    rounds: list[list[IntraMove]] = []
    for shift in range(1, m):
        moves = [
            IntraMove(
                server=server,
                from_gpu=g,
                to_gpu=(g + shift) % m,
                for_dst_server=server,
                bytes=int(ops[g, (g + shift) % m]),
            )
            for g in range(m)
            if int(ops[g, (g + shift) % m]) > 0
        ]
        rounds.append(moves)
    return rounds
