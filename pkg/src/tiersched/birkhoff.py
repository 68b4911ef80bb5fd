"""One-to-one inter-server staging via Birkhoff decomposition (phase 2).

After phase 1 the cross-server traffic reduces to an n x n server matrix.
Padding it with auxiliary bytes makes it doubly stochastic (all row and
column sums equal to the max row/column sum), which by Birkhoff's theorem
splits into a non-negative integer combination of permutation matrices.
Each permutation is a transfer stage in which every server sends to exactly
one server and receives from exactly one server, so each NIC pair runs at
full scale-out bandwidth.  Auxiliary bytes are then stripped; what remains
still covers all real traffic in at most n^2 - 2n + 2 stages whose weights
sum to the max row/column sum.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from .model import (
    InternalInvariantError,
    ServerMatrix,
    ValidationError,
    max_rc,
)


@dataclass(frozen=True)
class PermutationStage:
    """One transfer stage: a partial matching of senders to receivers.

    ``weight`` is the stage's share of the doubly stochastic common sum.
    Each edge is (src_server, dst_server, bytes); before auxiliary stripping
    every edge carries exactly ``weight`` bytes, afterwards possibly fewer.
    Edges are kept sorted by (src, dst).
    """

    weight: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        if self.weight < 0:
            raise ValidationError("stage weight must be non-negative")
        object.__setattr__(
            self, "edges", tuple(sorted(self.edges, key=lambda e: (e[0], e[1])))
        )
        srcs = [e[0] for e in self.edges]
        dsts = [e[1] for e in self.edges]
        if len(set(srcs)) != len(srcs) or len(set(dsts)) != len(dsts):
            raise ValidationError("stage edges must form a partial matching")
        for _, _, b in self.edges:
            if b < 0 or b > self.weight:
                raise ValidationError(
                    "edge bytes must lie in [0, stage weight]"
                )

    @property
    def matching(self) -> dict[int, int]:
        return {src: dst for src, dst, _ in self.edges}

    def max_edge_bytes(self) -> int:
        return max((b for _, _, b in self.edges), default=0)


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Decomposition output: raw stages plus the auxiliary padding used."""

    stages: tuple[PermutationStage, ...]
    aux: np.ndarray
    common_sum: int


def embed_doubly_stochastic(s: ServerMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Pad the off-diagonal demand to equal row/column sums; return (M, aux).

    Row and column deficits against the max row/column sum are filled
    greedily northwest-first: walking rows in index order, each row's deficit
    goes to the lowest-index columns that still need bytes.  Auxiliary bytes
    may land anywhere, including the diagonal: with demand rows
    [[0,0,0],[0,0,5],[0,5,0]] server 0 must pad 5 to column 0, which only the
    diagonal can absorb without overshooting another column.
    """
    off = s.off_diagonal()
    n = s.n_servers
    common = max_rc(s)
    embedded = off.astype(np.int64, copy=True)
    row_deficit = common - off.sum(axis=1)
    col_deficit = (common - off.sum(axis=0)).tolist()
    j = 0
    for i in range(n):
        need = int(row_deficit[i])
        while need > 0:
            grant = min(need, col_deficit[j])
            if grant > 0:
                embedded[i, j] += grant
                col_deficit[j] -= grant
                need -= grant
            if col_deficit[j] == 0:
                j += 1
    if not (
        np.all(embedded.sum(axis=1) == common)
        and np.all(embedded.sum(axis=0) == common)
    ):
        raise InternalInvariantError("embedding is not doubly stochastic")
    aux = embedded - off
    return embedded, aux


def find_perfect_matching(support: np.ndarray) -> dict[int, int]:
    """Deterministic perfect matching on a boolean support matrix.

    Rows are processed in index order and each augmenting search scans
    columns in index order, so the result depends only on the input.  A
    doubly stochastic matrix always has one; anything else raises.
    """
    n = support.shape[0]
    adjacency = [list(np.flatnonzero(support[u])) for u in range(n)]
    col_match: list[int] = [-1] * n
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 8 * n + 1000))

    def augment(u: int, seen: list[bool]) -> bool:
        for v in adjacency[u]:
            if not seen[v]:
                seen[v] = True
                if col_match[v] < 0 or augment(col_match[v], seen):
                    col_match[v] = u
                    return True
        return False

    for u in range(n):
        if not augment(u, [False] * n):
            raise InternalInvariantError(
                "support matrix has no perfect matching"
            )
    return {col_match[v]: v for v in range(n)}


def decompose(embedded: np.ndarray) -> list[PermutationStage]:
    """Split a doubly stochastic integer matrix into permutation stages.

    Each iteration finds a perfect matching on the positive support, peels it
    off with weight equal to its minimum entry, and repeats.  The matching is
    maintained incrementally: after subtracting a stage only the rows whose
    matched entry hit zero are re-augmented, which keeps the whole
    decomposition near-quadratic and, with the index-order searches,
    deterministic.  Greedy minimum-entry peeling never needs more than
    n^2 - 2n + 2 stages.
    """
    embedded = np.asarray(embedded)
    if embedded.ndim != 2 or embedded.shape[0] != embedded.shape[1]:
        raise ValidationError("decompose expects a square matrix")
    if not np.issubdtype(embedded.dtype, np.integer):
        raise ValidationError("decompose expects an integer matrix")
    if np.any(embedded < 0):
        raise ValidationError("decompose expects non-negative entries")
    n = embedded.shape[0]
    rows = embedded.sum(axis=1)
    cols = embedded.sum(axis=0)
    if not (np.all(rows == rows[0]) and np.all(cols == rows[0])):
        raise ValidationError("decompose expects equal row and column sums")
    common = int(rows[0])
    if common == 0:
        return []

    work = [[int(x) for x in row] for row in embedded]
    row_match: list[int] = [-1] * n
    col_match: list[int] = [-1] * n
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 8 * n + 1000))

    def augment(u: int, seen: list[bool]) -> bool:
        for v in range(n):
            if work[u][v] > 0 and not seen[v]:
                seen[v] = True
                if col_match[v] < 0 or augment(col_match[v], seen):
                    col_match[v] = u
                    row_match[u] = v
                    return True
        return False

    for u in range(n):
        if not augment(u, [False] * n):
            raise InternalInvariantError(
                "doubly stochastic matrix has no perfect matching"
            )

    max_stages = n * n - 2 * n + 2
    stages: list[PermutationStage] = []
    remaining = common
    while remaining > 0:
        if len(stages) >= max_stages:
            raise InternalInvariantError(
                f"decomposition exceeded {max_stages} stages"
            )
        weight = min(work[u][row_match[u]] for u in range(n))
        if weight <= 0:
            raise InternalInvariantError("matching covers a zero entry")
        edges = tuple(
            (u, row_match[u], weight) for u in range(n)
        )
        stages.append(PermutationStage(weight=weight, edges=edges))
        remaining -= weight
        freed: list[int] = []
        for u in range(n):
            v = row_match[u]
            work[u][v] -= weight
            if work[u][v] == 0 and remaining > 0:
                freed.append(u)
        for u in freed:
            v = row_match[u]
            if col_match[v] == u:
                col_match[v] = -1
            row_match[u] = -1
        for u in freed:
            if row_match[u] < 0 and not augment(u, [False] * n):
                raise InternalInvariantError(
                    "doubly stochastic matrix has no perfect matching"
                )
    if any(any(x != 0 for x in row) for row in work):
        raise InternalInvariantError("decomposition left bytes behind")
    return stages


def strip_auxiliary(
    stages: list[PermutationStage], aux: np.ndarray
) -> list[PermutationStage]:
    """Remove auxiliary padding from the stages, charging it greedily.

    Stages are visited in decomposition order; within each stage every edge
    gives up auxiliary bytes before real ones.  Edges left with zero real
    bytes are dropped, and stages left with no edges disappear entirely.
    Stage weights are kept: they record the stage's share of the common sum,
    which the pipeline uses for proportional redistribution splits.
    """
    aux_left = aux.astype(np.int64, copy=True)
    stripped: list[PermutationStage] = []
    for stage in stages:
        kept: list[tuple[int, int, int]] = []
        for src, dst, b in stage.edges:
            charged = min(int(aux_left[src, dst]), b)
            aux_left[src, dst] -= charged
            real = b - charged
            if real > 0:
                kept.append((src, dst, real))
        if kept:
            stripped.append(
                PermutationStage(weight=stage.weight, edges=tuple(kept))
            )
    if np.any(aux_left != 0):
        raise InternalInvariantError("auxiliary bytes left unconsumed")
    return stripped


def sort_stages_ascending(
    stages: list[PermutationStage],
) -> list[PermutationStage]:
    """Order stages by ascending weight; ties by first (src, dst) edge.

    Ascending order is what lets each stage's redistribution hide behind the
    next stage's scale-out transfer: later stages are never shorter.
    """
    return sorted(
        stages,
        key=lambda s: (s.weight, s.edges[0][:2] if s.edges else (-1, -1)),
    )


def decompose_server_matrix(s: ServerMatrix) -> Decomposition:
    """Embed, decompose, and package a server matrix's staging plan."""
    embedded, aux = embed_doubly_stochastic(s)
    stages = decompose(embedded)
    total_weight = sum(st.weight for st in stages)
    if total_weight != max_rc(s):
        raise InternalInvariantError(
            "stage weights do not sum to the max row/column sum"
        )
    return Decomposition(
        stages=tuple(stages), aux=aux, common_sum=max_rc(s)
    )
