"""Problem-instance construction: random generation, file I/O, fixtures.

A Scenario bundles everything one scheduling round needs: the service
graph, the UAVs with their tasks, channel parameters, and the scheduling
configuration. Generation is a pure function of (GenSpec, seed); files are
versioned JSON documents with SI base units (see docs/scenario_format.md).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, SchemaVersionMismatch, UnsatisfiableSpec
from .model import (
    ChannelParams,
    Component,
    GraphTask,
    SchedulingConfig,
    ServiceProvider,
    TaskEdge,
    Uav,
    VcEdge,
    VcGraph,
)

SCHEMA_FORMAT = "vcsched-scenario"
SCHEMA_VERSION = 1

Interval = tuple[float, float]

# Structure-only task shapes; data sizes and edge weights are attached at
# generation time. hub-6 carries a degree-5 hub, the hardest component to
# place; ring-5 has no rare component at all.
TASK_SHAPES: dict[str, tuple[tuple[str, ...], tuple[tuple[str, str], ...]]] = {
    "pair-2": (("c1", "c2"), (("c1", "c2"),)),
    "tri-3": (("c1", "c2", "c3"), (("c1", "c2"), ("c1", "c3"), ("c2", "c3"))),
    "chain-3": (("c1", "c2", "c3"), (("c1", "c2"), ("c2", "c3"))),
    "star-4": (
        ("c1", "c2", "c3", "c4"),
        (("c1", "c2"), ("c1", "c3"), ("c1", "c4")),
    ),
    "ring-5": (
        ("c1", "c2", "c3", "c4", "c5"),
        (("c1", "c2"), ("c2", "c3"), ("c3", "c4"), ("c4", "c5"), ("c5", "c1")),
    ),
    "hub-6": (
        ("c1", "c2", "c3", "c4", "c5", "c6"),
        (("c1", "c2"), ("c1", "c3"), ("c1", "c4"), ("c1", "c5"), ("c1", "c6")),
    ),
}


@dataclass(frozen=True)
class Scenario:
    """A complete problem instance."""

    vc: VcGraph
    uavs: tuple[Uav, ...]
    tasks: tuple[GraphTask, ...]
    channel: ChannelParams
    config: SchedulingConfig
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "uavs", tuple(self.uavs))
        object.__setattr__(self, "tasks", tuple(self.tasks))
        validate_scenario(self)

    def uav(self, uav_id: str) -> Uav:
        for u in self.uavs:
            if u.id == uav_id:
                return u
        raise KeyError(uav_id)

    def task_of(self, uav_id: str) -> GraphTask:
        for t in self.tasks:
            if t.owner == uav_id:
                return t
        raise KeyError(uav_id)


@dataclass(frozen=True)
class GenSpec:
    """Knobs of the random scenario generator.

    Interval fields are closed [low, high] ranges sampled uniformly.
    vc_edge_count of None keeps the pure distance rule; an integer trims
    the longest distance-rule edges or augments with the shortest missing
    pairs until the count is met.
    """

    sp_count: int = 7
    vm_total: int = 12
    vc_edge_count: int | None = None
    uav_count: int = 2
    task_shapes: tuple[str, ...] = ("star-4", "ring-5")
    d_interval: Interval = (5.0e5, 6.0e5)
    q_interval: Interval = (1.5, 2.0)
    n0_interval: Interval = (4.0e-3, 5.0e-3)
    b_interval: Interval = (1.0e7, 1.2e7)
    wu_interval: Interval = (0.1, 0.3)
    texec_interval: Interval = (0.1, 0.2)
    ws_interval: Interval = (0.05, 0.06)
    space: tuple[float, float, float] = (1000.0, 1000.0, 100.0)
    uav_height: Interval = (80.0, 100.0)
    v2v_radius: float = 300.0
    uav_radius: float = 500.0

    def __post_init__(self):
        if self.sp_count <= 0 or self.uav_count <= 0:
            raise UnsatisfiableSpec("sp_count and uav_count must be positive")
        if self.vm_total <= 0:
            raise UnsatisfiableSpec("vm_total must be positive")
        if not self.task_shapes:
            raise UnsatisfiableSpec("at least one task shape is required")
        for shape in self.task_shapes:
            if shape not in TASK_SHAPES:
                raise UnsatisfiableSpec(
                    f"unknown task shape {shape!r}; known: {sorted(TASK_SHAPES)}"
                )
        for name in (
            "d_interval", "q_interval", "n0_interval", "b_interval",
            "wu_interval", "texec_interval", "ws_interval", "uav_height",
        ):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise UnsatisfiableSpec(f"{name} is empty: [{lo}, {hi}]")
        max_edges = self.sp_count * (self.sp_count - 1) // 2
        if self.vc_edge_count is not None and not 0 <= self.vc_edge_count <= max_edges:
            raise UnsatisfiableSpec(
                f"vc_edge_count {self.vc_edge_count} impossible for "
                f"{self.sp_count} providers (max {max_edges})"
            )


def _uniform(rng: np.random.Generator, interval: Interval) -> float:
    lo, hi = interval
    return float(rng.uniform(lo, hi)) if hi > lo else float(lo)


def generate(spec: GenSpec, seed: int) -> Scenario:
    """Draw a scenario deterministically from (spec, seed).

    Provider positions are uniform on the ground plane of the space box,
    UAV heights uniform in the configured band. V2V edges follow the 2-D
    distance rule (then trim/augment to vc_edge_count); coverage is the
    set of providers within uav_radius in 3-D.
    """
    rng = np.random.default_rng(seed)
    sx, sy, sz = spec.space

    sp_xy = rng.uniform((0.0, 0.0), (sx, sy), size=(spec.sp_count, 2))
    vm_counts = rng.multinomial(spec.vm_total, [1.0 / spec.sp_count] * spec.sp_count)
    exec_time = _uniform(rng, spec.texec_interval)
    sps = tuple(
        ServiceProvider(
            id=f"s{i + 1}",
            position=(float(sp_xy[i, 0]), float(sp_xy[i, 1]), 0.0),
            vm_count=int(vm_counts[i]),
            exec_time=exec_time,
        )
        for i in range(spec.sp_count)
    )

    # Candidate pairs ranked by ground distance; the rank order also fixes
    # which edges get trimmed or added when a target count is set.
    pairs = []
    for i in range(spec.sp_count):
        for j in range(i + 1, spec.sp_count):
            d = math.dist(sp_xy[i], sp_xy[j])
            pairs.append((d, i, j))
    pairs.sort()
    in_radius = [p for p in pairs if p[0] <= spec.v2v_radius]
    if spec.vc_edge_count is None:
        chosen = in_radius
    elif len(in_radius) >= spec.vc_edge_count:
        chosen = in_radius[: spec.vc_edge_count]
    else:
        chosen = pairs[: spec.vc_edge_count]
    edges = tuple(
        VcEdge(a=f"s{i + 1}", b=f"s{j + 1}", weight=_uniform(rng, spec.ws_interval))
        for _, i, j in chosen
    )
    vc = VcGraph(sps=sps, edges=edges)

    uav_xy = rng.uniform((0.0, 0.0), (sx, sy), size=(spec.uav_count, 2))
    lo_h = max(0.0, min(spec.uav_height[0], sz))
    hi_h = min(spec.uav_height[1], sz)
    heights = rng.uniform(lo_h, hi_h, size=spec.uav_count)
    budgets = rng.uniform(*spec.q_interval, size=spec.uav_count)

    uavs = []
    for m in range(spec.uav_count):
        pos = (float(uav_xy[m, 0]), float(uav_xy[m, 1]), float(heights[m]))
        coverage = frozenset(
            sp.id for sp in sps if math.dist(pos, sp.position) <= spec.uav_radius
        )
        uavs.append(
            Uav(
                id=f"u{m + 1}",
                position=pos,
                power_budget=float(budgets[m]),
                coverage=coverage,
            )
        )

    data_size = _uniform(rng, spec.d_interval)
    tasks = []
    for m, uav in enumerate(uavs):
        comp_ids, shape_edges = TASK_SHAPES[spec.task_shapes[m % len(spec.task_shapes)]]
        components = tuple(Component(id=c, data_size=data_size) for c in comp_ids)
        task_edges = tuple(
            TaskEdge(a=a, b=b, weight=_uniform(rng, spec.wu_interval))
            for a, b in shape_edges
        )
        tasks.append(GraphTask(owner=uav.id, components=components, edges=task_edges))

    channel = ChannelParams(
        bandwidth=_uniform(rng, spec.b_interval),
        noise_power=_uniform(rng, spec.n0_interval),
    )
    return Scenario(
        vc=vc,
        uavs=tuple(uavs),
        tasks=tuple(tasks),
        channel=channel,
        config=SchedulingConfig(),
        seed=int(seed),
    )


def validate_scenario(s: Scenario) -> None:
    """Cross-object invariants not enforceable by single types."""
    sp_ids = set(s.vc.sp_ids())
    uav_ids = [u.id for u in s.uavs]
    if len(set(uav_ids)) != len(uav_ids):
        raise ValueError("duplicate UAV ids")
    for u in s.uavs:
        extra = u.coverage - sp_ids
        if extra:
            raise ValueError(f"uav {u.id}: coverage names unknown providers {sorted(extra)}")
    owners = [t.owner for t in s.tasks]
    if len(set(owners)) != len(owners):
        raise ValueError("multiple tasks share an owner")
    for t in s.tasks:
        if t.owner not in set(uav_ids):
            raise ValueError(f"task owner {t.owner} is not a UAV of this scenario")


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _scenario_to_dict(s: Scenario) -> dict:
    return {
        "format": SCHEMA_FORMAT,
        "version": SCHEMA_VERSION,
        "seed": s.seed,
        "channel": asdict(s.channel),
        "config": asdict(s.config),
        "vc": {
            "sps": [
                {
                    "id": sp.id,
                    "position": list(sp.position),
                    "vm_count": sp.vm_count,
                    "exec_time": sp.exec_time,
                }
                for sp in s.vc.sps
            ],
            "edges": [
                {"a": e.a, "b": e.b, "weight": e.weight} for e in s.vc.edges
            ],
        },
        "uavs": [
            {
                "id": u.id,
                "position": list(u.position),
                "power_budget": u.power_budget,
                "coverage": sorted(u.coverage),
            }
            for u in s.uavs
        ],
        "tasks": [
            {
                "owner": t.owner,
                "components": [
                    {"id": c.id, "data_size": c.data_size} for c in t.components
                ],
                "edges": [
                    {"a": e.a, "b": e.b, "weight": e.weight} for e in t.edges
                ],
            }
            for t in s.tasks
        ],
    }


def scenario_to_text(s: Scenario) -> str:
    """Canonical textual form; identical scenarios serialize identically."""
    return json.dumps(_scenario_to_dict(s), indent=2, sort_keys=True) + "\n"


def save(s: Scenario, path: str | Path) -> None:
    Path(path).write_text(scenario_to_text(s), encoding="utf-8")


def _req(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ParseError(f"{where}: missing field {key!r}")
    return mapping[key]


def _scenario_from_dict(doc: dict) -> Scenario:
    fmt = doc.get("format")
    if fmt != SCHEMA_FORMAT:
        raise ParseError(f"root: expected format {SCHEMA_FORMAT!r}, got {fmt!r}")
    version = doc.get("version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"unsupported scenario schema version {version!r} (supported: {SCHEMA_VERSION})"
        )
    try:
        channel = ChannelParams(**_req(doc, "channel", "root"))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"channel: {exc}") from exc
    try:
        cfg = dict(_req(doc, "config", "root"))
        if "p" in cfg:
            cfg["p"] = int(cfg["p"])
        config = SchedulingConfig(**cfg)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"config: {exc}") from exc

    vc_doc = _req(doc, "vc", "root")
    sps = []
    for i, sp_doc in enumerate(_req(vc_doc, "sps", "vc")):
        where = f"vc.sps[{i}]"
        try:
            sps.append(
                ServiceProvider(
                    id=_req(sp_doc, "id", where),
                    position=tuple(_req(sp_doc, "position", where)),
                    vm_count=int(_req(sp_doc, "vm_count", where)),
                    exec_time=float(_req(sp_doc, "exec_time", where)),
                )
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{where}: {exc}") from exc
    vc_edges = []
    for i, e_doc in enumerate(vc_doc.get("edges", [])):
        where = f"vc.edges[{i}]"
        try:
            vc_edges.append(
                VcEdge(
                    a=_req(e_doc, "a", where),
                    b=_req(e_doc, "b", where),
                    weight=float(_req(e_doc, "weight", where)),
                )
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{where}: {exc}") from exc
    try:
        vc = VcGraph(sps=tuple(sps), edges=tuple(vc_edges))
    except ValueError as exc:
        raise ParseError(f"vc: {exc}") from exc

    uavs = []
    for i, u_doc in enumerate(_req(doc, "uavs", "root")):
        where = f"uavs[{i}]"
        try:
            uavs.append(
                Uav(
                    id=_req(u_doc, "id", where),
                    position=tuple(_req(u_doc, "position", where)),
                    power_budget=float(_req(u_doc, "power_budget", where)),
                    coverage=frozenset(_req(u_doc, "coverage", where)),
                )
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{where}: {exc}") from exc

    tasks = []
    for i, t_doc in enumerate(_req(doc, "tasks", "root")):
        where = f"tasks[{i}]"
        try:
            components = tuple(
                Component(id=_req(c, "id", f"{where}.components[{j}]"),
                          data_size=float(_req(c, "data_size", f"{where}.components[{j}]")))
                for j, c in enumerate(_req(t_doc, "components", where))
            )
            edges = tuple(
                TaskEdge(a=_req(e, "a", f"{where}.edges[{j}]"),
                         b=_req(e, "b", f"{where}.edges[{j}]"),
                         weight=float(_req(e, "weight", f"{where}.edges[{j}]")))
                for j, e in enumerate(t_doc.get("edges", []))
            )
            tasks.append(
                GraphTask(owner=_req(t_doc, "owner", where), components=components, edges=edges)
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{where}: {exc}") from exc

    try:
        return Scenario(
            vc=vc,
            uavs=tuple(uavs),
            tasks=tuple(tasks),
            channel=channel,
            config=config,
            seed=int(_req(doc, "seed", "root")),
        )
    except ValueError as exc:
        raise ParseError(f"scenario: {exc}") from exc


def load(path: str | Path) -> Scenario:
    """Read and fully validate a scenario file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: root must be an object")
    return _scenario_from_dict(doc)


# ---------------------------------------------------------------------------
# reference walkthrough fixture
# ---------------------------------------------------------------------------

def walkthrough_fixture() -> Scenario:
    """The two-task reference scenario used by the walkthrough tests.

    Seven providers s1..s7; u1 carries a 4-component star (hub A), u2 a
    5-component task whose hub F touches every other component. The VM
    counts, adjacency, and coverages are chosen so the search trace visits
    a pinned exploration order and pinned candidate sets at every step
    (see docs/walkthrough_fixture.md).
    """
    exec_time = 0.15
    positions = {
        "s1": (120.0, 820.0, 0.0),
        "s2": (330.0, 760.0, 0.0),
        "s3": (520.0, 540.0, 0.0),
        "s4": (300.0, 520.0, 0.0),
        "s5": (430.0, 650.0, 0.0),
        "s6": (640.0, 700.0, 0.0),
        "s7": (770.0, 560.0, 0.0),
    }
    vm_counts = {"s1": 1, "s2": 1, "s3": 2, "s4": 1, "s5": 3, "s6": 2, "s7": 1}
    sps = tuple(
        ServiceProvider(id=k, position=positions[k], vm_count=vm_counts[k], exec_time=exec_time)
        for k in sorted(positions)
    )
    ws = 0.055
    vc_edges = tuple(
        VcEdge(a=a, b=b, weight=ws)
        for a, b in (
            ("s1", "s2"),
            ("s2", "s5"),
            ("s3", "s5"),
            ("s3", "s6"),
            ("s4", "s5"),
            ("s5", "s6"),
            ("s6", "s7"),
        )
    )
    vc = VcGraph(sps=sps, edges=vc_edges)

    uavs = (
        Uav(
            id="u1",
            position=(360.0, 640.0, 90.0),
            power_budget=1.8,
            coverage=frozenset({"s2", "s3", "s4", "s5"}),
        ),
        Uav(
            id="u2",
            position=(600.0, 610.0, 90.0),
            power_budget=1.8,
            coverage=frozenset({"s3", "s5", "s6", "s7"}),
        ),
    )

    data_size = 5.5e5
    wu = 0.2
    task1 = GraphTask(
        owner="u1",
        components=tuple(Component(id=c, data_size=data_size) for c in "ABCD"),
        edges=tuple(TaskEdge(a="A", b=c, weight=wu) for c in "BCD"),
    )
    task2 = GraphTask(
        owner="u2",
        components=tuple(Component(id=c, data_size=data_size) for c in "EFGHI"),
        edges=(
            TaskEdge(a="E", b="F", weight=wu),
            TaskEdge(a="E", b="H", weight=wu),
            TaskEdge(a="F", b="G", weight=wu),
            TaskEdge(a="F", b="H", weight=wu),
            TaskEdge(a="F", b="I", weight=wu),
            TaskEdge(a="G", b="I", weight=wu),
        ),
    )

    return Scenario(
        vc=vc,
        uavs=uavs,
        tasks=(task1, task2),
        channel=ChannelParams(),
        config=SchedulingConfig(),
        seed=0,
    )
