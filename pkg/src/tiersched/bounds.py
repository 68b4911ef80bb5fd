"""Closed-form completion-time bounds and derived metrics.

``optimal_time`` is the scale-out lower bound: the busiest server's NIC
traffic spread perfectly over its m GPUs.  ``fast_worstcase_time`` is the
scheduler's worst-case completion, the sum of the balancing, staging, and
redistribution ceilings; their ratio is bounded by a topology-only constant,
``ratio_bound`` = 1 + (B2/B1)(m + m/n).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model import ServerMatrix, Topology, ValidationError, max_rc


@dataclass(frozen=True)
class BoundsReport:
    """Bundle of the closed-form bounds for one instance."""

    t_optimal: float
    t_fast_worstcase: float
    ratio_bound: float
    algo_bw: float
    assumption_ok: bool


def intra_assumption_holds(s: ServerMatrix) -> bool:
    """Whether every server's internal volume is at most its average
    cross-server demand, S_i <= (1/n) * sum_j T_ij."""
    totals = np.asarray(s.totals)
    n = s.n_servers
    intra = totals.diagonal()
    cross = s.off_diagonal().sum(axis=1)
    return bool(np.all(n * intra <= cross))


def _warn_if_assumption_violated(s: ServerMatrix) -> bool:
    ok = intra_assumption_holds(s)
    if not ok:
        warnings.warn(
            "some server's intra traffic exceeds its average cross-server "
            "demand; the bound assumes it hides behind scale-out transfers",
            stacklevel=3,
        )
    return ok


def optimal_time(s: ServerMatrix, t: Topology) -> float:
    """Scale-out lower bound: max_rc / (m * B2).

    Assumes intra-server volume hides behind cross-server transfers
    (S_i <= (1/n) * sum_j T_ij); warns when the instance violates that.
    """
    _warn_if_assumption_violated(s)
    return max_rc(s) / (t.gpus_per_server * t.scaleout_bw)


def fast_worstcase_time(s: ServerMatrix, t: Topology) -> float:
    """Worst-case completion: balancing + staging + redistribution ceilings.

    t0: sender balancing, moving at most (m-1)/m of the busiest server's
        outgoing bytes over scale-up.
    t1: destination redistribution overlapped across the n-1 peers.
    t2: the scale-out stages themselves (the optimal time).
    t3: the final stage's redistribution, not hidden by anything.
    """
    _warn_if_assumption_violated(s)
    m = t.gpus_per_server
    n = s.n_servers
    off = s.off_diagonal()
    row_max = int(off.sum(axis=1).max()) if n else 0
    t0 = (m - 1) * row_max / (m * t.scaleup_bw)
    t1 = row_max / (n * t.scaleup_bw)
    t2 = max_rc(s) / (m * t.scaleout_bw)
    t3 = int(off.max()) / (m * t.scaleup_bw) if off.size else 0.0
    return t0 + t1 + t2 + t3


def ratio_bound(t: Topology) -> float:
    """Topology-only ceiling on worst-case / optimal completion."""
    m = t.gpus_per_server
    n = t.n_servers
    return 1.0 + (t.scaleout_bw / t.scaleup_bw) * (m + m / n)


def algorithmic_bandwidth(
    total_bytes: int, gpu_count: int, completion_s: float
) -> float:
    """Total bytes moved per GPU per second of completion time."""
    if gpu_count <= 0:
        raise ValidationError("gpu_count must be positive")
    if completion_s <= 0:
        raise ValidationError("completion time must be positive")
    return total_bytes / (gpu_count * completion_s)


def bounds_report(
    s: ServerMatrix,
    t: Topology,
    total_bytes: int,
    completion_s: float,
) -> BoundsReport:
    """Assemble all bounds plus the achieved algorithmic bandwidth."""
    ok = _warn_if_assumption_violated(s)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        t_opt = optimal_time(s, t)
        t_worst = fast_worstcase_time(s, t)
    gpu_count = s.n_servers * t.gpus_per_server
    return BoundsReport(
        t_optimal=t_opt,
        t_fast_worstcase=t_worst,
        ratio_bound=ratio_bound(t),
        algo_bw=algorithmic_bandwidth(total_bytes, gpu_count, completion_s),
        assumption_ok=ok,
    )
