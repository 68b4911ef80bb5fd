"""Deterministic seeded workload generators.

All randomness comes from the counter-based generator in :mod:`tiersched.rng`,
so a (seed, topology, parameters) triple always produces the same demand
matrix on any platform — no global state, no draw-order dependence.
"""

from __future__ import annotations

import numpy as np

from . import rng
from .model import DemandMatrix, Topology, ValidationError, load_matrix


def gen_uniform(seed: int, t: Topology, mean_bytes: int) -> DemandMatrix:
    """Independent uniform demand on [0, 2*mean] per off-diagonal GPU pair."""
    mean_bytes = int(mean_bytes)
    if mean_bytes <= 0:
        raise ValidationError("mean_bytes must be positive")
    g = t.gpu_count
    draws = rng.stream(seed, g * g) % np.uint64(2 * mean_bytes + 1)
    sizes = draws.astype(np.int64).reshape(g, g)
    np.fill_diagonal(sizes, 0)
    return DemandMatrix(
        n_servers=t.n_servers, gpus_per_server=t.gpus_per_server, sizes=sizes
    )


def gen_zipf(
    seed: int, t: Topology, skew: float, total_bytes: int
) -> DemandMatrix:
    """Zipf-distributed demand: pair of rank r gets a share ∝ 1/r^skew.

    The rank order over the off-diagonal pairs is a seeded random
    permutation.  Integer shares are the floors of the exact proportional
    shares, with the leftover bytes granted one each to the largest
    fractional parts (ties favouring the heavier rank), so the matrix total
    is exactly ``total_bytes``.
    """
    if not 0.0 <= skew < 1.0:
        raise ValidationError("skew must lie in [0, 1)")
    total_bytes = int(total_bytes)
    if total_bytes <= 0:
        raise ValidationError("total_bytes must be positive")
    g = t.gpu_count
    pairs = g * g - g
    keys = rng.stream(seed, pairs)
    order = np.argsort(keys, kind="stable")
    ranks = np.arange(1, pairs + 1, dtype=np.float64)
    weights = 1.0 / ranks**skew
    shares = total_bytes * weights / weights.sum()
    base = np.floor(shares).astype(np.int64)
    leftover = total_bytes - int(base.sum())
    if leftover > 0:
        frac = shares - base
        grant = np.lexsort((np.arange(pairs), -frac))[:leftover]
        base[grant] += 1
    sizes = np.zeros((g, g), dtype=np.int64)
    flat_offdiag = np.flatnonzero(~np.eye(g, dtype=bool).ravel())
    sizes.ravel()[flat_offdiag[order]] = base
    return DemandMatrix(
        n_servers=t.n_servers, gpus_per_server=t.gpus_per_server, sizes=sizes
    )


def gen_adversarial(t: Topology, tile_bytes: int) -> DemandMatrix:
    """Maximally skewed demand: all of each cross tile on one GPU pair.

    GPU 0 of every server sends ``tile_bytes`` to GPU 0 of every other
    server; everything else, including intra-server traffic, is zero.  This
    concentrates the whole load on single rows and columns and is the
    worst-case family for the ratio bound.
    """
    tile_bytes = int(tile_bytes)
    if tile_bytes <= 0:
        raise ValidationError("tile_bytes must be positive")
    n, m = t.n_servers, t.gpus_per_server
    g = t.gpu_count
    sizes = np.zeros((g, g), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i != j:
                sizes[i * m, j * m] = tile_bytes
    return DemandMatrix(n_servers=n, gpus_per_server=m, sizes=sizes)


def load_trace(path: str) -> DemandMatrix:
    """Load a demand matrix from a JSON or CSV trace file."""
    return load_matrix(path)
