"""Graph-task scheduling over a vehicular cloud.

Two-stage pipeline: enumerate the structure-preserving mappings of task
components onto service providers (templates), then allocate each UAV's
transmission power by solving a convexified min-max program, and score
everything with a weighted time/energy/exchange-cost objective.
"""

__version__ = "0.1.0"

from .errors import (
    BaselineInfeasible,
    BelowReferenceDistance,
    HeterogeneousD,
    Infeasible,
    InstanceTooLarge,
    MissingRate,
    NegativePower,
    NoFeasibleSchedule,
    NonPositiveBreakpoint,
    NotATaskEdge,
    NumericalFailure,
    ParseError,
    PredecessorUnmapped,
    SchemaVersionMismatch,
    TemplateInfeasibleForAlpha1,
    UnsatisfiableSpec,
    VcschedError,
    ZeroDistance,
)
from .model import (
    ChannelParams,
    Component,
    GraphTask,
    ObjectiveBreakdown,
    SchedulingConfig,
    ServiceProvider,
    TaskEdge,
    Uav,
    VcEdge,
    VcGraph,
    a2g_gain,
    breakpoint_distance,
    completion_time,
    exchange_cost,
    objective,
    pairwise_exchange_cost,
    rate,
    uav_energy,
    v2v_path_loss,
)
from .power import (
    GapConstraint,
    PowerAllocation,
    PowerProblem,
    RhoVector,
    allocation_violations,
    annealed_power,
    build_power_problem,
    channel_weighted_power,
    evaluate_allocation,
    optimize_power,
    peak_time_by_norm_order,
    random_power,
    uniform_power,
)
from .scenario import (
    GenSpec,
    Scenario,
    TASK_SHAPES,
    generate,
    load,
    save,
    walkthrough_fixture,
)
from .scheduler import (
    ComparisonReport,
    ScheduleResult,
    compare_methods,
    run_method,
    sampled_exchange_term,
    schedule,
    score_template,
)
from .search import (
    ExplorationSequence,
    SearchState,
    Template,
    available_degree,
    build_sequence,
    candidates,
    degree,
    enumerate_templates,
    exhaustive_search,
    random_search,
    validate_template,
)
