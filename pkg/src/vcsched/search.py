"""Stage 1: enumerate templates, the structure-preserving mappings from
task components onto service providers.

A mapping is a template when it respects three constraints: per-provider
VM capacity over all UAVs, each component stays inside its owner's
coverage, and every task edge is either co-located or lands on a one-hop
V2V link whose contact probability exp(-w_u * w_s) clears the alpha2
threshold. The enumerator walks components in a degree-driven exploration
order and extends partial mappings only through candidate providers, so
whole subtrees that cannot host the remaining neighbors are never visited.
The exhaustive and random searchers below provide the reference baselines.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InstanceTooLarge, PredecessorUnmapped
from .model import GraphTask, SchedulingConfig
from .scenario import Scenario

# Components are keyed globally as (owner uav id, component id).
CompKey = tuple[str, str]

RSA_ITERATION_PRESETS = (10_000, 20_000, 30_000)


# ---------------------------------------------------------------------------
# exploration sequence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExplorationSequence:
    """A placement order over all components plus, per component, the set
    of its already-placed one-hop neighbors (its predecessors)."""

    order: tuple[CompKey, ...]
    pred: dict[CompKey, frozenset[CompKey]]


def degree(task: GraphTask, comp_id: str) -> int:
    """Incident task edges of a component; its rareness measure."""
    return task.degree(comp_id)


def build_sequence(
    tasks: tuple[GraphTask, ...] | list[GraphTask],
    *,
    tie_break: str = "lexicographic",
    seed: int | None = None,
) -> ExplorationSequence:
    """Order components by placement difficulty.

    The first component maximizes the plain degree; every later pick
    maximizes the number of edges into the already-ordered prefix, with
    larger degree as the secondary criterion. Remaining ties fall to task
    declaration order then component declaration order ("lexicographic"),
    or to a seeded random draw ("random").
    """
    if tie_break not in ("lexicographic", "random"):
        raise ValueError(f"unknown tie_break {tie_break!r}")
    rng = np.random.default_rng(seed) if tie_break == "random" else None

    index: dict[CompKey, tuple[int, int]] = {}
    deg: dict[CompKey, int] = {}
    adj: dict[CompKey, set[CompKey]] = {}
    for ti, task in enumerate(tasks):
        for ci, comp in enumerate(task.components):
            key = (task.owner, comp.id)
            index[key] = (ti, ci)
            deg[key] = task.degree(comp.id)
            adj[key] = {(task.owner, n) for n in task.neighbors(comp.id)}
    if not index:
        raise ValueError("no components to order")

    def pick(pool: list[CompKey], score) -> CompKey:
        best = max(score(k) for k in pool)
        tied = [k for k in pool if score(k) == best]
        if len(tied) == 1 or rng is None:
            return min(tied, key=lambda k: index[k])
        return tied[int(rng.integers(len(tied)))]

    remaining = list(index)
    order: list[CompKey] = []
    placed: set[CompKey] = set()

    first = pick(remaining, lambda k: deg[k])
    order.append(first)
    placed.add(first)
    remaining.remove(first)

    while remaining:
        nxt = pick(remaining, lambda k: (len(adj[k] & placed), deg[k]))
        order.append(nxt)
        placed.add(nxt)
        remaining.remove(nxt)

    pred = {}
    before: set[CompKey] = set()
    for key in order:
        pred[key] = frozenset(adj[key] & before)
        before.add(key)
    return ExplorationSequence(order=tuple(order), pred=pred)


# ---------------------------------------------------------------------------
# search state and templates
# ---------------------------------------------------------------------------

class SearchState:
    """Mutable bookkeeping of one enumeration branch: remaining VMs per
    provider and the partial component assignment."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.remaining: dict[str, int] = {
            sp.id: sp.vm_count for sp in scenario.vc.sps
        }
        self.mapping: dict[CompKey, str] = {}

    def assign(self, comp: CompKey, sp_id: str) -> None:
        self.remaining[sp_id] -= 1
        self.mapping[comp] = sp_id

    def unassign(self, comp: CompKey) -> None:
        sp_id = self.mapping.pop(comp)
        self.remaining[sp_id] += 1


def available_degree(state: SearchState, sp_id: str) -> int:
    """Free VMs on a provider plus on its one-hop neighbors; zero the
    moment the provider itself runs out of local VMs."""
    local = state.remaining[sp_id]
    if local == 0:
        return 0
    return local + sum(
        state.remaining[n] for n in state.scenario.vc.neighbors(sp_id)
    )


@dataclass(frozen=True)
class Template:
    """One feasible mapping of every component onto a provider."""

    assignment: tuple[tuple[CompKey, str], ...]  # sorted (component, sp) pairs

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(sorted(self.assignment)))

    @property
    def mapping(self) -> dict[CompKey, str]:
        return dict(self.assignment)

    def sp_of(self, owner: str, comp_id: str) -> str:
        return self.mapping[(owner, comp_id)]

    def used_sps(self) -> frozenset[str]:
        return frozenset(sp for _, sp in self.assignment)

    def assignment_for(self, owner: str) -> dict[str, str]:
        """Component-id -> provider-id restricted to one UAV's task."""
        return {comp: sp for (own, comp), sp in self.assignment if own == owner}

    def cross_sp_pairs(
        self, tasks: tuple[GraphTask, ...]
    ) -> list[tuple[str, str, str, str, str]]:
        """Every task edge split across providers, as
        (owner, comp_a, comp_b, sp_a, sp_b)."""
        m = self.mapping
        out = []
        for task in tasks:
            for e in task.edges:
                ka, kb = m[(task.owner, e.a)], m[(task.owner, e.b)]
                if ka != kb:
                    out.append((task.owner, e.a, e.b, ka, kb))
        return out

    def canonical_line(self) -> str:
        return " ".join(f"{own}/{comp}={sp}" for (own, comp), sp in self.assignment)

    @staticmethod
    def from_line(line: str) -> "Template":
        pairs = []
        for token in line.split():
            left, sp = token.split("=")
            own, comp = left.split("/")
            pairs.append(((own, comp), sp))
        return Template(assignment=tuple(pairs))


def templates_to_text(templates: list[Template]) -> str:
    """Line-oriented canonical dump, sorted, one template per line."""
    return "".join(line + "\n" for line in sorted(t.canonical_line() for t in templates))


def templates_from_text(text: str) -> list[Template]:
    return [Template.from_line(line) for line in text.splitlines() if line.strip()]


# ---------------------------------------------------------------------------
# constraint checks
# ---------------------------------------------------------------------------

def _contact_ok(wu: float, ws: float, alpha2: float) -> bool:
    return math.exp(-wu * ws) >= alpha2


def _violations(mapping: dict[CompKey, str], scenario: Scenario, config: SchedulingConfig):
    """Yield feasibility violations of a full assignment, one at a time."""
    expected = {(t.owner, c.id) for t in scenario.tasks for c in t.components}
    if set(mapping) != expected:
        yield "assignment does not cover exactly the scenario's components"
        return

    used: dict[str, int] = {}
    for sp_id in mapping.values():
        used[sp_id] = used.get(sp_id, 0) + 1
    for sp_id, count in used.items():
        cap = scenario.vc.sp(sp_id).vm_count
        if count > cap:
            yield f"capacity: {sp_id} hosts {count} components but has {cap} VMs"

    for task in scenario.tasks:
        coverage = scenario.uav(task.owner).coverage
        for comp in task.components:
            sp_id = mapping[(task.owner, comp.id)]
            if sp_id not in coverage:
                yield f"coverage: {task.owner}/{comp.id} on {sp_id} outside coverage"
        for e in task.edges:
            ka, kb = mapping[(task.owner, e.a)], mapping[(task.owner, e.b)]
            if ka == kb:
                continue
            if not scenario.vc.has_edge(ka, kb):
                yield (
                    f"structure: edge {e.a}-{e.b} of {task.owner} maps to "
                    f"non-adjacent providers {ka},{kb}"
                )
            elif not _contact_ok(e.weight, scenario.vc.edge_weight(ka, kb), config.alpha2):
                yield (
                    f"contact: edge {e.a}-{e.b} of {task.owner} on {ka},{kb} "
                    f"misses the alpha2 threshold"
                )


def validate_template(
    template: Template, scenario: Scenario, config: SchedulingConfig | None = None
) -> list[str]:
    """Re-check capacity, coverage, and structure from scratch.

    Returns a list of human-readable violations, empty when feasible. This
    is deliberately independent of the enumerator's incremental filtering.
    """
    config = config or scenario.config
    return list(_violations(template.mapping, scenario, config))


def is_feasible_mapping(
    mapping: dict[CompKey, str], scenario: Scenario, config: SchedulingConfig | None = None
) -> bool:
    """Short-circuit form of the validator for bulk filtering."""
    config = config or scenario.config
    return next(_violations(mapping, scenario, config), None) is None


def candidates(
    state: SearchState,
    comp: CompKey,
    sequence: ExplorationSequence,
    scenario: Scenario,
    config: SchedulingConfig | None = None,
) -> list[str]:
    """Providers that can host `comp` given the current partial mapping.

    A provider qualifies when it has a free VM, lies in the owner's
    coverage, its available degree covers the component's not-yet-placed
    neighbors, and every placed predecessor is either co-located or one
    hop away over a link that passes the alpha2 contact test. Order
    follows the service graph's provider declaration order.
    """
    config = config or scenario.config
    owner, comp_id = comp
    task = scenario.task_of(owner)
    preds = sequence.pred[comp]
    unmapped = [p for p in preds if p not in state.mapping]
    if unmapped:
        raise PredecessorUnmapped(
            f"predecessors of {owner}/{comp_id} not yet mapped: {sorted(unmapped)}"
        )
    needed = task.degree(comp_id) - len(preds)
    coverage = scenario.uav(owner).coverage

    out = []
    for sp in scenario.vc.sps:
        if state.remaining[sp.id] <= 0:
            continue
        if sp.id not in coverage:
            continue
        if available_degree(state, sp.id) < needed:
            continue
        ok = True
        for pred_owner, pred_comp in preds:
            pk = state.mapping[(pred_owner, pred_comp)]
            if pk == sp.id:
                continue
            if not scenario.vc.has_edge(sp.id, pk):
                ok = False
                break
            wu = task.edge_weight(comp_id, pred_comp)
            if not _contact_ok(wu, scenario.vc.edge_weight(sp.id, pk), config.alpha2):
                ok = False
                break
        if ok:
            out.append(sp.id)
    return out


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def enumerate_templates(
    scenario: Scenario,
    sequence: ExplorationSequence | None = None,
    config: SchedulingConfig | None = None,
    *,
    limit: int | None = None,
) -> list[Template]:
    """Depth-first backtracking over the exploration order.

    Yields every distinct feasible template in a deterministic order;
    `limit` caps the output for anytime use on large instances. VM counts
    are restored on backtrack, so the state is reusable afterwards.
    """
    config = config or scenario.config
    if sequence is None:
        sequence = build_sequence(scenario.tasks)
    state = SearchState(scenario)
    order = sequence.order
    found: list[Template] = []

    def dfs(depth: int) -> bool:
        if limit is not None and len(found) >= limit:
            return False
        if depth == len(order):
            found.append(Template(assignment=tuple(state.mapping.items())))
            return limit is None or len(found) < limit
        comp = order[depth]
        for sp_id in candidates(state, comp, sequence, scenario, config):
            state.assign(comp, sp_id)
            keep_going = dfs(depth + 1)
            state.unassign(comp)
            if not keep_going:
                return False
        return True

    dfs(0)
    return found


def exhaustive_search(
    scenario: Scenario,
    config: SchedulingConfig | None = None,
    *,
    max_assignments: int = 5_000_000,
) -> list[Template]:
    """Ground-truth baseline: try every coverage-respecting assignment of
    components to providers and keep the ones the validator accepts.

    The per-component choice lists are each owner's coverage set (anything
    else fails validation trivially); the product of their sizes is bounded
    by `max_assignments`.
    """
    config = config or scenario.config
    comp_keys: list[CompKey] = []
    choice_lists: list[list[str]] = []
    for task in scenario.tasks:
        coverage = scenario.uav(task.owner).coverage
        covered = [sp.id for sp in scenario.vc.sps if sp.id in coverage]
        for comp in task.components:
            comp_keys.append((task.owner, comp.id))
            choice_lists.append(covered)

    space = 1
    for lst in choice_lists:
        space *= max(len(lst), 1)
        if space > max_assignments:
            raise InstanceTooLarge(
                f"assignment space exceeds the guard of {max_assignments}"
            )

    found = []
    for combo in itertools.product(*choice_lists):
        mapping = dict(zip(comp_keys, combo))
        if is_feasible_mapping(mapping, scenario, config):
            found.append(Template(assignment=tuple(mapping.items())))
    return sorted(found, key=lambda t: t.assignment)


def random_search(
    scenario: Scenario,
    iterations: int,
    seed: int,
    config: SchedulingConfig | None = None,
) -> list[Template]:
    """Randomized baseline: each iteration assigns a random provider to
    every component in a random order, keeping distinct feasible results."""
    config = config or scenario.config
    rng = np.random.default_rng(seed)
    comp_keys = [
        (t.owner, c.id) for t in scenario.tasks for c in t.components
    ]
    sp_ids = list(scenario.vc.sp_ids())
    found: list[Template] = []
    seen = set()
    if not comp_keys or not sp_ids:
        return found
    for _ in range(iterations):
        order = rng.permutation(len(comp_keys))
        picks = rng.integers(0, len(sp_ids), size=len(comp_keys))
        mapping = {comp_keys[i]: sp_ids[picks[j]] for j, i in enumerate(order)}
        key = tuple(sorted(mapping.items()))
        if key in seen:
            continue
        seen.add(key)
        if is_feasible_mapping(mapping, scenario, config):
            found.append(Template(assignment=key))
    return sorted(found, key=lambda t: t.assignment)
