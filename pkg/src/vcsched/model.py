"""Domain types and closed-form physics of the scheduling problem.

All quantities are kept in SI base units internally: bits, seconds, watts,
joules, meters, hertz. Path loss values are in dB. Every function here is
pure and every type is immutable after construction, so instances can be
shared freely across concurrent evaluators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    BelowReferenceDistance,
    MissingRate,
    NegativePower,
    NonPositiveBreakpoint,
    NotATaskEdge,
    ZeroDistance,
)

Vec3 = tuple[float, float, float]

LOG2 = math.log(2.0)


def _dist(a: Vec3, b: Vec3) -> float:
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2)


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelParams:
    """Parameters of the ground-to-ground and air-to-ground channel models.

    d0/pl0 anchor the dual-slope ground model, eta1/eta2 are the slopes
    before and after the breakpoint, sigma the shadowing std-dev in dB.
    g1 is the air-to-ground gain at 1 m and eta3 its distance exponent.
    bandwidth (Hz) and noise_power (W) parameterise the rate formula.
    """

    d0: float = 1.0
    pl0: float = 47.86
    eta1: float = 2.0
    eta2: float = 4.0
    sigma: float = 3.0
    ht: float = 1.5
    hr: float = 1.5
    wavelength: float = 0.0508
    g1: float = 1.0
    eta3: float = 2.0
    bandwidth: float = 1.1e7
    noise_power: float = 4.5e-3

    def __post_init__(self):
        positives = {
            "d0": self.d0, "pl0": self.pl0, "sigma": self.sigma,
            "ht": self.ht, "hr": self.hr, "wavelength": self.wavelength,
            "g1": self.g1, "eta3": self.eta3,
            "bandwidth": self.bandwidth, "noise_power": self.noise_power,
        }
        for name, value in positives.items():
            if not value > 0:
                raise ValueError(f"ChannelParams.{name} must be > 0, got {value}")
        if not 0 <= self.eta1 <= self.eta2:
            raise ValueError(
                f"require eta2 >= eta1 >= 0, got eta1={self.eta1} eta2={self.eta2}"
            )


@dataclass(frozen=True)
class ServiceProvider:
    """A ground vehicle leasing idle VMs. Position z is 0 for ground units."""

    id: str
    position: Vec3
    vm_count: int
    exec_time: float

    def __post_init__(self):
        if self.vm_count < 0:
            raise ValueError(f"vm_count must be >= 0, got {self.vm_count}")
        if not self.exec_time > 0:
            raise ValueError(f"exec_time must be > 0, got {self.exec_time}")
        object.__setattr__(self, "position", tuple(float(c) for c in self.position))


@dataclass(frozen=True)
class VcEdge:
    """One-hop link between two providers; weight is the exponential
    contact-duration rate (1/s)."""

    a: str
    b: str
    weight: float


@dataclass(frozen=True)
class VcGraph:
    """The service graph: providers plus one-hop links."""

    sps: tuple[ServiceProvider, ...]
    edges: tuple[VcEdge, ...]

    def __post_init__(self):
        object.__setattr__(self, "sps", tuple(self.sps))
        object.__setattr__(self, "edges", tuple(self.edges))
        ids = [sp.id for sp in self.sps]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate service provider ids")
        known = set(ids)
        seen = set()
        for e in self.edges:
            if e.a == e.b:
                raise ValueError(f"self-loop on {e.a}")
            if e.a not in known or e.b not in known:
                raise ValueError(f"edge ({e.a},{e.b}) references unknown provider")
            key = frozenset((e.a, e.b))
            if key in seen:
                raise ValueError(f"duplicate edge ({e.a},{e.b})")
            seen.add(key)
            if not e.weight > 0:
                raise ValueError(f"edge ({e.a},{e.b}) weight must be > 0")
        object.__setattr__(self, "_by_id", {sp.id: sp for sp in self.sps})
        adjacency: dict[str, dict[str, float]] = {sp.id: {} for sp in self.sps}
        for e in self.edges:
            adjacency[e.a][e.b] = e.weight
            adjacency[e.b][e.a] = e.weight
        object.__setattr__(self, "_adj", adjacency)

    def sp(self, sp_id: str) -> ServiceProvider:
        return self._by_id[sp_id]

    def sp_ids(self) -> tuple[str, ...]:
        return tuple(sp.id for sp in self.sps)

    def has_edge(self, a: str, b: str) -> bool:
        return b in self._adj[a]

    def edge_weight(self, a: str, b: str) -> float:
        try:
            return self._adj[a][b]
        except KeyError:
            raise KeyError(f"no edge between {a} and {b}") from None

    def neighbors(self, sp_id: str) -> tuple[str, ...]:
        return tuple(self._adj[sp_id])

    def distance(self, a: str, b: str) -> float:
        return _dist(self.sp(a).position, self.sp(b).position)


@dataclass(frozen=True)
class Component:
    """One unit of task data needing a full VM; data_size in bits."""

    id: str
    data_size: float

    def __post_init__(self):
        if not self.data_size > 0:
            raise ValueError(f"component {self.id}: data_size must be > 0")


@dataclass(frozen=True)
class TaskEdge:
    """Undirected dependency between two components; weight is the required
    connect duration (s) for their intermediate data exchange."""

    a: str
    b: str
    weight: float


@dataclass(frozen=True)
class GraphTask:
    """An undirected task graph owned by one UAV."""

    owner: str
    components: tuple[Component, ...]
    edges: tuple[TaskEdge, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "edges", tuple(self.edges))
        ids = [c.id for c in self.components]
        if len(set(ids)) != len(ids):
            raise ValueError(f"task of {self.owner}: duplicate component ids")
        known = set(ids)
        seen = set()
        for e in self.edges:
            if e.a == e.b:
                raise ValueError(f"task of {self.owner}: self-loop on {e.a}")
            if e.a not in known or e.b not in known:
                raise ValueError(
                    f"task of {self.owner}: edge ({e.a},{e.b}) references unknown component"
                )
            key = frozenset((e.a, e.b))
            if key in seen:
                raise ValueError(f"task of {self.owner}: duplicate edge ({e.a},{e.b})")
            seen.add(key)
            if not e.weight > 0:
                raise ValueError(f"task of {self.owner}: edge ({e.a},{e.b}) weight must be > 0")
        object.__setattr__(self, "_by_id", {c.id: c for c in self.components})
        adjacency: dict[str, dict[str, float]] = {c.id: {} for c in self.components}
        for e in self.edges:
            adjacency[e.a][e.b] = e.weight
            adjacency[e.b][e.a] = e.weight
        object.__setattr__(self, "_adj", adjacency)

    def component(self, comp_id: str) -> Component:
        return self._by_id[comp_id]

    def component_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.components)

    def has_edge(self, a: str, b: str) -> bool:
        return b in self._adj[a]

    def edge_weight(self, a: str, b: str) -> float:
        try:
            return self._adj[a][b]
        except KeyError:
            raise KeyError(f"no task edge between {a} and {b}") from None

    def neighbors(self, comp_id: str) -> tuple[str, ...]:
        return tuple(self._adj[comp_id])

    def degree(self, comp_id: str) -> int:
        return len(self._adj[comp_id])


@dataclass(frozen=True)
class Uav:
    """A hovering service requestor with a transmission power budget (W)
    and a fixed set of providers inside its communication radius."""

    id: str
    position: Vec3
    power_budget: float
    coverage: frozenset[str]

    def __post_init__(self):
        if not self.power_budget > 0:
            raise ValueError(f"uav {self.id}: power_budget must be > 0")
        object.__setattr__(self, "position", tuple(float(c) for c in self.position))
        object.__setattr__(self, "coverage", frozenset(self.coverage))


@dataclass(frozen=True)
class SchedulingConfig:
    """Objective weights, probabilistic thresholds, and cost coefficients.

    omega1/2/3 weight completion time, UAV energy, and exchange cost.
    alpha1 gates rate-dependent contact feasibility (power stage), alpha2
    gates the structural contact test (template stage). tail_energy is the
    fixed channel-hold energy added to every transmission. p is the norm
    order of the peak-time surrogate. cost_slope/cost_offset map path loss
    to an exchange cost.
    """

    omega1: float = 1.0 / 3.0
    omega2: float = 1.0 / 3.0
    omega3: float = 1.0 / 3.0
    alpha1: float = 0.9
    alpha2: float = 0.9
    tail_energy: float = 0.1
    p: int = 3
    cost_slope: float = 0.15
    cost_offset: float = 0.001

    def __post_init__(self):
        for name in ("omega1", "omega2", "omega3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("alpha1", "alpha2"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0,1), got {v}")
        if self.tail_energy < 0:
            raise ValueError("tail_energy must be >= 0")
        if not (isinstance(self.p, int) and self.p >= 1):
            raise ValueError(f"p must be an integer >= 1, got {self.p!r}")


@dataclass(frozen=True)
class ObjectiveBreakdown:
    """The scheduling objective and its three weighted constituents."""

    total: float
    time_term: float
    energy_term: float
    exchange_term: float


# ---------------------------------------------------------------------------
# channel and cost formulas
# ---------------------------------------------------------------------------

def breakpoint_distance(params: ChannelParams) -> float:
    """Breakpoint of the dual-slope ground model: 4*ht*hr/lambda - lambda/4."""
    d_b = 4.0 * params.ht * params.hr / params.wavelength - params.wavelength / 4.0
    if d_b <= 0:
        raise NonPositiveBreakpoint(
            f"breakpoint distance {d_b:.6g} m is not positive "
            f"(ht={params.ht}, hr={params.hr}, wavelength={params.wavelength})"
        )
    return d_b


def v2v_path_loss(d: float, params: ChannelParams, shadowing: float = 0.0) -> float:
    """Dual-slope path loss (dB) between two ground providers at distance d.

    Below the breakpoint the loss grows with slope 10*eta1 per decade of
    d/d0; past it an extra 10*eta2 per decade of d/d_B accrues, so the
    curve is continuous at the breakpoint. `shadowing` is an externally
    sampled dB offset; scoring paths pass 0 for reproducibility.
    """
    if d < params.d0:
        raise BelowReferenceDistance(
            f"distance {d} m is below reference distance {params.d0} m"
        )
    d_b = breakpoint_distance(params)
    loss = params.pl0 + 10.0 * params.eta1 * math.log10(d / params.d0)
    if d > d_b:
        loss += 10.0 * params.eta2 * math.log10(d / d_b)
    return loss + shadowing


def exchange_cost(
    k: str,
    k2: str,
    vc: VcGraph,
    params: ChannelParams,
    config: SchedulingConfig,
    shadowing: float = 0.0,
) -> float:
    """Cost of moving intermediate data between providers k and k2.

    Zero when both ids name the same provider; otherwise an affine map of
    the pairwise path loss, cost_slope * pl + cost_offset.
    """
    if k == k2:
        return 0.0
    pl = v2v_path_loss(vc.distance(k, k2), params, shadowing)
    return config.cost_slope * pl + config.cost_offset


def pairwise_exchange_cost(
    task: GraphTask,
    n: str,
    n2: str,
    k: str,
    k2: str,
    vc: VcGraph,
    params: ChannelParams,
    config: SchedulingConfig,
    shadowing: float = 0.0,
) -> float:
    """Exchange cost charged when task edge (n, n2) lands on providers
    (k, k2); zero when the endpoints are co-located."""
    if not (task.has_edge(n, n2) if n != n2 else False):
        raise NotATaskEdge(f"({n},{n2}) is not an edge of the task of {task.owner}")
    if k == k2:
        return 0.0
    return exchange_cost(k, k2, vc, params, config, shadowing)


def a2g_gain(uav: Uav, sp: ServiceProvider, params: ChannelParams) -> float:
    """Line-of-sight air-to-ground channel gain g1 * d^(-eta3)."""
    d = _dist(uav.position, sp.position)
    if d <= 0:
        raise ZeroDistance(f"uav {uav.id} and provider {sp.id} are co-located")
    return params.g1 * d ** (-params.eta3)


def rate(q: float, g: float, params: ChannelParams) -> float:
    """Transmission rate B * log2(1 + q*g/N0) in bits/s.

    Strictly increasing and concave in the power q.
    """
    if q < 0:
        raise NegativePower(f"power must be >= 0, got {q}")
    return params.bandwidth * math.log2(1.0 + q * g / params.noise_power)


# ---------------------------------------------------------------------------
# time, energy, objective
# ---------------------------------------------------------------------------

def _loads_by_sp(assignment: Mapping[str, str], task: GraphTask) -> dict[str, float]:
    """Total bits each provider receives from this task's components."""
    loads: dict[str, float] = {}
    for comp in task.components:
        sp_id = assignment[comp.id]
        loads[sp_id] = loads.get(sp_id, 0.0) + comp.data_size
    return loads


def completion_time(
    assignment: Mapping[str, str],
    rates: Mapping[str, float],
    task: GraphTask,
    vc: VcGraph,
) -> float:
    """Completion time of one task: the slowest provider's transmission
    time plus its per-VM execution time.

    `assignment` maps this task's component ids to provider ids, `rates`
    gives the owner's achieved rate toward each used provider.
    """
    loads = _loads_by_sp(assignment, task)
    worst = 0.0
    for sp_id, bits in loads.items():
        r = rates.get(sp_id, 0.0)
        if r <= 0:
            raise MissingRate(
                f"task of {task.owner}: provider {sp_id} is used but has no rate"
            )
        worst = max(worst, bits / r + vc.sp(sp_id).exec_time)
    return worst


def uav_energy(
    assignment: Mapping[str, str],
    powers: Mapping[str, float],
    rates: Mapping[str, float],
    task: GraphTask,
    config: SchedulingConfig,
) -> float:
    """Transmission energy of the owning UAV plus the fixed tail energy.

    Each provider contributes q_k * (bits sent to k) / r_k joules.
    """
    loads = _loads_by_sp(assignment, task)
    energy = config.tail_energy
    for sp_id, bits in loads.items():
        r = rates.get(sp_id, 0.0)
        if r <= 0:
            raise MissingRate(
                f"task of {task.owner}: provider {sp_id} is used but has no rate"
            )
        energy += powers.get(sp_id, 0.0) * bits / r
    return energy


def cross_sp_edges(
    assignment: Mapping[str, str], task: GraphTask
) -> list[tuple[str, str, str, str]]:
    """Task edges whose endpoints land on distinct providers, as
    (comp_a, comp_b, sp_a, sp_b) tuples in declaration order."""
    out = []
    for e in task.edges:
        ka, kb = assignment[e.a], assignment[e.b]
        if ka != kb:
            out.append((e.a, e.b, ka, kb))
    return out


def objective(
    assignments: Mapping[str, Mapping[str, str]],
    powers: Mapping[str, Mapping[str, float]],
    rates: Mapping[str, Mapping[str, float]],
    tasks: Iterable[GraphTask],
    vc: VcGraph,
    params: ChannelParams,
    config: SchedulingConfig,
) -> ObjectiveBreakdown:
    """Weighted sum of completion time, UAV energy, and exchange cost.

    `assignments`, `powers`, and `rates` are keyed by UAV id. The exchange
    term sums each distinct cross-provider task edge once (the undirected
    double count and its compensating 1/2 factor cancel). Shadowing is
    deterministic (zero) here so scores are reproducible.
    """
    time_term = 0.0
    energy_term = 0.0
    exchange_term = 0.0
    for task in tasks:
        assignment = assignments[task.owner]
        time_term += completion_time(assignment, rates[task.owner], task, vc)
        energy_term += uav_energy(
            assignment, powers[task.owner], rates[task.owner], task, config
        )
        for _, _, ka, kb in cross_sp_edges(assignment, task):
            exchange_term += exchange_cost(ka, kb, vc, params, config)
    total = (
        config.omega1 * time_term
        + config.omega2 * energy_term
        + config.omega3 * exchange_term
    )
    return ObjectiveBreakdown(
        total=total,
        time_term=time_term,
        energy_term=energy_term,
        exchange_term=exchange_term,
    )
