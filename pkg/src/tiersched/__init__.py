"""All-to-All(v) schedule synthesis for two-tier GPU clusters.

The fast scheduler turns an arbitrary GPU-level demand matrix into a
three-phase schedule — intra-server sender balancing, one-to-one
inter-server stages from a Birkhoff decomposition, and pipelined
destination-side redistribution — whose scale-out time matches the
busiest server's lower bound.  A shifted-diagonal baseline, an analytical
cost model, closed-form bounds, and seeded workload generators round out
the toolkit.
"""

from .balance import (
    BalancePlan,
    IntraMove,
    balance_senders,
    build_balance_plan,
    merge_peer,
    split_deliveries,
    stage_redistribution,
)
from .birkhoff import (
    Decomposition,
    PermutationStage,
    decompose,
    decompose_server_matrix,
    embed_doubly_stochastic,
    find_perfect_matching,
    sort_stages_ascending,
    strip_auxiliary,
)
from .bounds import (
    BoundsReport,
    algorithmic_bandwidth,
    bounds_report,
    fast_worstcase_time,
    intra_assumption_holds,
    optimal_time,
    ratio_bound,
)
from .model import (
    DemandMatrix,
    InternalInvariantError,
    ServerMatrix,
    TileView,
    Topology,
    ValidationError,
    load_matrix,
    max_rc,
    reduce_to_server_level,
    save_matrix,
    tile,
    validate_topology,
)
from .pipeline import (
    Schedule,
    SpreadoutSchedule,
    schedule_from_json,
    schedule_to_json,
    synthesize_fast,
    synthesize_spreadout,
)
from .simulate import (
    Timeline,
    intra_phase_time,
    simulate_fast,
    simulate_spreadout,
    step_cost,
)
from .spreadout import (
    spreadout_completion_units,
    spreadout_intra,
    spreadout_stages,
)
from .workloads import gen_adversarial, gen_uniform, gen_zipf, load_trace

__all__ = [
    "BalancePlan",
    "BoundsReport",
    "Decomposition",
    "DemandMatrix",
    "InternalInvariantError",
    "IntraMove",
    "PermutationStage",
    "Schedule",
    "ServerMatrix",
    "SpreadoutSchedule",
    "TileView",
    "Timeline",
    "Topology",
    "ValidationError",
    "algorithmic_bandwidth",
    "balance_senders",
    "bounds_report",
    "build_balance_plan",
    "decompose",
    "decompose_server_matrix",
    "embed_doubly_stochastic",
    "fast_worstcase_time",
    "find_perfect_matching",
    "gen_adversarial",
    "gen_uniform",
    "gen_zipf",
    "intra_assumption_holds",
    "intra_phase_time",
    "load_matrix",
    "load_trace",
    "max_rc",
    "merge_peer",
    "optimal_time",
    "ratio_bound",
    "reduce_to_server_level",
    "save_matrix",
    "schedule_from_json",
    "schedule_to_json",
    "simulate_fast",
    "simulate_spreadout",
    "sort_stages_ascending",
    "split_deliveries",
    "spreadout_completion_units",
    "spreadout_intra",
    "spreadout_stages",
    "stage_redistribution",
    "step_cost",
    "strip_auxiliary",
    "synthesize_fast",
    "synthesize_spreadout",
    "tile",
    "validate_topology",
]

__version__ = "0.1.0"
