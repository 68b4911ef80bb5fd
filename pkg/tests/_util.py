"""Shared helpers for the test suite: topologies, seeded instances, oracles."""

from __future__ import annotations

import warnings

import numpy as np

import tiersched as ts
from tiersched import rng

B2_DEFAULT = 50e9


def topo(
    n: int,
    m: int,
    ratio: float = 9.0,
    b2: float = B2_DEFAULT,
    alpha: float = 0.0,
) -> ts.Topology:
    t = ts.Topology(
        n_servers=n,
        gpus_per_server=m,
        scaleup_bw=ratio * b2,
        scaleout_bw=b2,
        wakeup_delay=alpha,
    )
    return ts.validate_topology(t)


def seeded_server_matrix(seed: int, n: int, modulus: int = 997) -> ts.ServerMatrix:
    """Deterministic random server-level matrix with zero diagonal."""
    draws = rng.stream(seed, n * n) % np.uint64(modulus)
    totals = draws.astype(np.int64).reshape(n, n)
    np.fill_diagonal(totals, 0)
    return ts.ServerMatrix(totals=totals)


def demand_from_server(s: ts.ServerMatrix) -> ts.DemandMatrix:
    """Embed a server matrix as an m=1 cluster's GPU demand matrix."""
    return ts.DemandMatrix(
        n_servers=s.n_servers, gpus_per_server=1, sizes=s.off_diagonal()
    )


def optimal_quiet(s: ts.ServerMatrix, t: ts.Topology) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return ts.optimal_time(s, t)


def run_fast(d: ts.DemandMatrix, t: ts.Topology):
    """Synthesize and simulate; returns (schedule, timeline, server, optimal)."""
    schedule = ts.synthesize_fast(d, t)
    timeline = ts.simulate_fast(schedule.plan, list(schedule.stages), t)
    server = ts.reduce_to_server_level(schedule.plan.reshaped, t)
    return schedule, timeline, server, optimal_quiet(server, t)


def reconstruct(
    stages, n: int, use_weight: bool = False
) -> np.ndarray:
    """Sum of per-stage byte matrices (or weight * permutation matrices)."""
    out = np.zeros((n, n), dtype=np.int64)
    for st in stages:
        for src, dst, b in st.edges:
            out[src, dst] += st.weight if use_weight else b
    return out


# Hand-built worked instances --------------------------------------------------

# 6x6 two-GPU-per-server example: GPU-level bottleneck bound is 10 units
# (row 3 sends 10, column 2 receives 10); after sender balancing the server
# matrix is [[0,9,7],[7,0,5],[9,7,0]] with max_rc = 16 bytes = 8 units per
# GPU, so balancing alone improves the bound from 10 to 8.
HAND6 = np.array(
    [
        [0, 0, 5, 1, 2, 1],
        [0, 0, 1, 2, 3, 1],
        [2, 0, 0, 0, 0, 0],
        [4, 1, 0, 0, 2, 3],
        [2, 3, 3, 1, 0, 0],
        [1, 3, 1, 2, 0, 0],
    ],
    dtype=np.int64,
)

# Server-level skewed instance: max_rc = 14 but the shifted baseline needs
# 5 + 7 + 5 = 17 units.
HAND4 = np.array(
    [
        [0, 2, 4, 4],
        [1, 0, 4, 7],
        [5, 3, 0, 3],
        [5, 2, 5, 0],
    ],
    dtype=np.int64,
)

# Minimal strict-suboptimality witness: max_rc = 8, baseline units = 9.
HAND3 = np.array(
    [
        [0, 5, 3],
        [1, 0, 4],
        [6, 2, 0],
    ],
    dtype=np.int64,
)
