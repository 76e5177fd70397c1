"""End-to-end scheduling: enumerate templates, solve power per UAV per
template, score everything, and return the argmin.

Per-UAV power programs are independent, so identical subproblems arising
from different templates are solved once and shared (for the deterministic
allocators). Template scoring can fan out to worker threads; results are
assembled in canonical template order, so output never depends on
scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from statistics import mean, median

from .errors import (
    BaselineInfeasible,
    HeterogeneousD,
    Infeasible,
    NoFeasibleSchedule,
    NumericalFailure,
    TemplateInfeasibleForAlpha1,
)
from .model import ObjectiveBreakdown, SchedulingConfig, objective
from .power import (
    PowerAllocation,
    PowerProblem,
    annealed_power,
    build_power_problem,
    channel_weighted_power,
    optimize_power,
    random_power,
    uniform_power,
)
from .scenario import Scenario
from .search import Template, build_sequence, enumerate_templates

POWER_METHODS = ("proposed", "ua", "ra", "ccpa", "spsa")

# Allocators whose output is a pure function of the problem alone; their
# solves are memoized across templates.
_DETERMINISTIC_METHODS = ("proposed", "ua", "ccpa")

_BUILD_ERRORS = (TemplateInfeasibleForAlpha1, HeterogeneousD, ValueError)
_SOLVE_ERRORS = (Infeasible, NumericalFailure, BaselineInfeasible)


def score_template(
    template: Template,
    allocations: dict[str, PowerAllocation],
    scenario: Scenario,
    config: SchedulingConfig | None = None,
) -> ObjectiveBreakdown:
    """Full objective of one template under given per-UAV allocations.

    Scoring always uses zero shadowing so values are reproducible; see
    sampled_exchange_term for the stochastic mode.
    """
    config = config or scenario.config
    assignments = {t.owner: template.assignment_for(t.owner) for t in scenario.tasks}
    powers = {uid: alloc.power_map() for uid, alloc in allocations.items()}
    rates = {uid: alloc.rate_map() for uid, alloc in allocations.items()}
    return objective(
        assignments, powers, rates, scenario.tasks, scenario.vc,
        scenario.channel, config,
    )


def sampled_exchange_term(
    template: Template,
    scenario: Scenario,
    config: SchedulingConfig | None = None,
    *,
    samples: int = 100,
    seed: int = 0,
) -> tuple[float, float]:
    """Stochastic-shadowing mode: mean and standard deviation of the
    exchange term over seeded Gaussian shadowing draws (one independent
    draw per cross-provider edge per sample)."""
    import numpy as np

    from .model import exchange_cost

    config = config or scenario.config
    rng = np.random.default_rng(seed)
    pairs = template.cross_sp_pairs(scenario.tasks)
    totals = []
    for _ in range(samples):
        total = 0.0
        for _, _, _, ka, kb in pairs:
            shadow = float(rng.normal(0.0, scenario.channel.sigma))
            total += exchange_cost(ka, kb, scenario.vc, scenario.channel, config, shadow)
        totals.append(total)
    arr = np.asarray(totals)
    return float(arr.mean()), float(arr.std())


@dataclass(frozen=True)
class ScoreEntry:
    """One row of the per-template score log."""

    template: Template
    feasible: bool
    breakdown: ObjectiveBreakdown | None
    failure_reason: str | None


@dataclass(frozen=True)
class ScheduleStats:
    templates_enumerated: int
    templates_feasible: int
    solves_attempted: int
    solves_succeeded: int
    capped: bool


@dataclass(frozen=True)
class ScheduleResult:
    template: Template
    allocations: dict[str, PowerAllocation]
    breakdown: ObjectiveBreakdown
    score_log: tuple[ScoreEntry, ...]
    stats: ScheduleStats


def _solve_for_method(problem: PowerProblem, method: str, entropy) -> PowerAllocation:
    if method == "proposed":
        return optimize_power(problem)[1]
    if method == "ua":
        return uniform_power(problem)
    if method == "ra":
        return random_power(problem, seed=entropy)
    if method == "ccpa":
        return channel_weighted_power(problem)
    if method == "spsa":
        return annealed_power(problem, seed=entropy)
    raise ValueError(f"unknown power method {method!r}")


def _build_problems(
    templates: list[Template], scenario: Scenario, config: SchedulingConfig
) -> list[dict[str, PowerProblem] | str]:
    """Per template: a uav_id -> PowerProblem map, or the failure reason."""
    out: list[dict[str, PowerProblem] | str] = []
    for template in templates:
        problems = {}
        reason = None
        for uav in scenario.uavs:
            try:
                problems[uav.id] = build_power_problem(template, uav, scenario, config)
            except _BUILD_ERRORS as exc:
                reason = f"{type(exc).__name__}: {exc}"
                break
        out.append(problems if reason is None else reason)
    return out


def run_method(
    scenario: Scenario,
    method: str = "proposed",
    config: SchedulingConfig | None = None,
    *,
    base_seed: int = 0,
    limit: int | None = None,
    jobs: int = 1,
) -> ScheduleResult:
    """Pick the best template under one power-allocation method.

    Templates whose power program cannot be built or solved are skipped
    with the failure recorded in the score log. Ties on the objective fall
    to canonical template order, so permuting enumeration cannot change
    the winner. Raises NoFeasibleSchedule (carrying the log) when nothing
    survives.
    """
    if method not in POWER_METHODS:
        raise ValueError(f"unknown method {method!r}; known: {POWER_METHODS}")
    config = config or scenario.config
    sequence = build_sequence(scenario.tasks)
    templates = sorted(
        enumerate_templates(scenario, sequence, config, limit=limit),
        key=lambda t: t.assignment,
    )
    capped = limit is not None and len(templates) >= limit
    per_template = _build_problems(templates, scenario, config)
    uav_index = {u.id: i for i, u in enumerate(scenario.uavs)}

    solutions: list[dict[str, PowerAllocation | Exception] | None] = [None] * len(templates)
    solves_attempted = 0
    solves_succeeded = 0

    if method in _DETERMINISTIC_METHODS:
        unique: dict[PowerProblem, PowerAllocation | Exception] = {}
        for item in per_template:
            if isinstance(item, dict):
                for problem in item.values():
                    unique.setdefault(problem, None)

        def solve(problem):
            try:
                return _solve_for_method(problem, method, None)
            except _SOLVE_ERRORS as exc:
                return exc

        problems = list(unique)
        solves_attempted = len(problems)
        if jobs > 1 and len(problems) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                for problem, result in zip(problems, pool.map(solve, problems)):
                    unique[problem] = result
        else:
            for problem in problems:
                unique[problem] = solve(problem)
        solves_succeeded = sum(
            1 for r in unique.values() if isinstance(r, PowerAllocation)
        )
        for idx, item in enumerate(per_template):
            if isinstance(item, dict):
                solutions[idx] = {uid: unique[pp] for uid, pp in item.items()}
    else:
        # Seeded allocators get one seed per (template, uav) cell so that
        # reruns reproduce byte-identical output.
        for idx, item in enumerate(per_template):
            if not isinstance(item, dict):
                continue
            cell = {}
            for uav_id, problem in item.items():
                entropy = [base_seed, scenario.seed, idx, uav_index[uav_id]]
                solves_attempted += 1
                try:
                    cell[uav_id] = _solve_for_method(problem, method, entropy)
                    solves_succeeded += 1
                except _SOLVE_ERRORS as exc:
                    cell[uav_id] = exc
            solutions[idx] = cell

    entries: list[ScoreEntry] = []
    best = None  # (total, assignment, template, allocations, breakdown)
    for idx, template in enumerate(templates):
        item = per_template[idx]
        if isinstance(item, str):
            entries.append(ScoreEntry(template, False, None, item))
            continue
        allocations = {}
        failure = None
        for uav_id in item:
            result = solutions[idx][uav_id]
            if isinstance(result, Exception):
                failure = f"{type(result).__name__}: {result}"
                break
            allocations[uav_id] = result
        if failure is not None:
            entries.append(ScoreEntry(template, False, None, failure))
            continue
        breakdown = score_template(template, allocations, scenario, config)
        entries.append(ScoreEntry(template, True, breakdown, None))
        key = (breakdown.total, template.assignment)
        if best is None or key < (best[0], best[1]):
            best = (breakdown.total, template.assignment, template, allocations, breakdown)

    stats = ScheduleStats(
        templates_enumerated=len(templates),
        templates_feasible=sum(1 for e in entries if e.feasible),
        solves_attempted=solves_attempted,
        solves_succeeded=solves_succeeded,
        capped=capped,
    )
    if best is None:
        raise NoFeasibleSchedule(
            f"none of {len(templates)} templates admits a feasible "
            f"{method} power allocation for every UAV",
            score_log=entries,
        )
    return ScheduleResult(
        template=best[2],
        allocations=best[3],
        breakdown=best[4],
        score_log=tuple(entries),
        stats=stats,
    )


def schedule(
    scenario: Scenario,
    config: SchedulingConfig | None = None,
    *,
    limit: int | None = None,
    jobs: int = 1,
) -> ScheduleResult:
    """The two-stage approach with the convex power solver."""
    return run_method(scenario, "proposed", config, limit=limit, jobs=jobs)


# ---------------------------------------------------------------------------
# method comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CellResult:
    """Best-template outcome of one (scenario, method) pair."""

    scenario_seed: int
    method: str
    objective: float | None
    feasible: bool
    failure_reason: str | None


@dataclass(frozen=True)
class MethodAggregate:
    mean_objective: float | None
    median_objective: float | None
    feasible_rate: float


@dataclass(frozen=True)
class ComparisonReport:
    methods: tuple[str, ...]
    scenario_seeds: tuple[int, ...]
    base_seed: int
    cells: tuple[CellResult, ...]
    aggregates: dict[str, MethodAggregate]


def compare_methods(
    scenarios: list[Scenario],
    methods: tuple[str, ...] | list[str] = POWER_METHODS,
    config: SchedulingConfig | None = None,
    *,
    base_seed: int = 0,
    limit: int | None = None,
    jobs: int = 1,
) -> ComparisonReport:
    """Score every scenario under each power-allocation method.

    Each method picks its own best template. Per-cell failures land in the
    report rather than aborting the batch; aggregates cover the feasible
    cells only. Fully seeded, so identical batches reproduce identical
    reports.
    """
    if not scenarios:
        raise ValueError("scenario batch must be non-empty")
    cells: list[CellResult] = []
    for scenario in scenarios:
        for method in methods:
            try:
                result = run_method(
                    scenario, method, config,
                    base_seed=base_seed, limit=limit, jobs=jobs,
                )
                cells.append(
                    CellResult(scenario.seed, method, result.breakdown.total, True, None)
                )
            except NoFeasibleSchedule as exc:
                reasons = {e.failure_reason for e in exc.score_log if e.failure_reason}
                reason = sorted(reasons)[0] if reasons else "no templates"
                cells.append(CellResult(scenario.seed, method, None, False, reason))

    aggregates = {}
    for method in methods:
        values = [c.objective for c in cells if c.method == method and c.feasible]
        count = sum(1 for c in cells if c.method == method)
        aggregates[method] = MethodAggregate(
            mean_objective=mean(values) if values else None,
            median_objective=median(values) if values else None,
            feasible_rate=len(values) / count if count else 0.0,
        )
    return ComparisonReport(
        methods=tuple(methods),
        scenario_seeds=tuple(s.seed for s in scenarios),
        base_seed=base_seed,
        cells=tuple(cells),
        aggregates=aggregates,
    )
