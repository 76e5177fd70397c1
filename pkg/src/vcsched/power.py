"""Stage 2: optimal transmission power for one UAV under one template.

The peak transmission time is smoothed by a p-norm surrogate and the
program is convexified by the change of variables rho_k = 1/r_k, giving

    minimize   sum_k  W1_k rho_k^p  +  W2_k rho_k (2^(1/(B rho_k)) - 1)
    subject to sum_k (1/g_k) 2^(1/(B rho_k)) <= C*          (power budget)
               (rho_a - rho_b)^2 <= bound^2                 (per coupled pair)

with W1_k = w1 * Dk^p, W2_k = w2 * Dk * N0/g_k and C* = Q/N0 + sum 1/g_k.
The budget constraint in rho form is algebraically identical to
sum q_k <= Q under the inversion q_k = (N0/g_k) (2^(1/(B rho_k)) - 1).

The solver is a log-barrier interior-point method: Newton steps with an
Armijo backtracking line search on the barrier function, shrinking the
barrier weight geometrically. Pairs whose gap bound is exactly zero are
merged into a single variable, which keeps the barrier interior nonempty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import (
    BaselineInfeasible,
    HeterogeneousD,
    Infeasible,
    NumericalFailure,
    TemplateInfeasibleForAlpha1,
)
from .model import SchedulingConfig, Uav, a2g_gain
from .scenario import Scenario
from .search import Template

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class GapConstraint:
    """|rho_a - rho_b| <= bound, induced by one cross-provider task edge."""

    sp_a: str
    sp_b: str
    bound: float
    edge: str  # "owner:compA-compB", for diagnostics


@dataclass(frozen=True)
class PowerProblem:
    """One UAV's power program over the providers its template uses."""

    uav_id: str
    sps: tuple[str, ...]
    gains: tuple[float, ...]
    loads: tuple[float, ...]  # bits per provider
    budget: float
    bandwidth: float
    noise_power: float
    omega1: float
    omega2: float
    p: int
    constraints: tuple[GapConstraint, ...] = ()

    def __post_init__(self):
        if len(self.sps) == 0:
            raise ValueError("power problem needs at least one provider")
        if len(set(self.sps)) != len(self.sps):
            raise ValueError("duplicate providers in power problem")
        if not (len(self.sps) == len(self.gains) == len(self.loads)):
            raise ValueError("sps, gains, and loads must align")
        for name, vals in (("gains", self.gains), ("loads", self.loads)):
            if any(not v > 0 for v in vals):
                raise ValueError(f"all {name} must be > 0")
        known = set(self.sps)
        for c in self.constraints:
            if c.sp_a not in known or c.sp_b not in known:
                raise ValueError(f"constraint {c.edge} references unused provider")
            if c.bound < 0:
                raise ValueError(f"constraint {c.edge} has negative bound")

    @cached_property
    def w1(self) -> np.ndarray:
        return self.omega1 * np.asarray(self.loads) ** self.p

    @cached_property
    def w2(self) -> np.ndarray:
        return self.omega2 * np.asarray(self.loads) * self.noise_power / np.asarray(self.gains)

    @cached_property
    def c_star(self) -> float:
        return self.budget / self.noise_power + float(np.sum(1.0 / np.asarray(self.gains)))

    def index_of(self, sp_id: str) -> int:
        return self.sps.index(sp_id)

    def with_p(self, p: int) -> "PowerProblem":
        return replace(self, p=p)

    # rho <-> q conversions ------------------------------------------------

    def rho_of_power(self, q: np.ndarray) -> np.ndarray:
        g = np.asarray(self.gains)
        return 1.0 / (self.bandwidth * np.log2(1.0 + q * g / self.noise_power))

    def power_of_rho(self, rho: np.ndarray) -> np.ndarray:
        g = np.asarray(self.gains)
        return (self.noise_power / g) * np.expm1(
            LOG2 / (self.bandwidth * rho)
        )

    def surrogate_objective(self, rho: np.ndarray) -> float:
        """The smoothed time + energy objective evaluated at rho."""
        rho = np.asarray(rho, dtype=float)
        um1 = np.expm1(LOG2 / (self.bandwidth * rho))
        return float(np.sum(self.w1 * rho**self.p + self.w2 * rho * um1))


@dataclass(frozen=True)
class SolveDiagnostics:
    iterations: int
    outer_steps: int
    mu_final: float
    kkt_residual: float


@dataclass(frozen=True)
class RhoVector:
    """Inverse rates (s/bit) per used provider."""

    sps: tuple[str, ...]
    values: tuple[float, ...]

    def as_map(self) -> dict[str, float]:
        return dict(zip(self.sps, self.values))


@dataclass(frozen=True)
class PowerAllocation:
    """Per-provider powers with the rates they achieve."""

    sps: tuple[str, ...]
    q: tuple[float, ...]
    rates: tuple[float, ...]
    diagnostics: SolveDiagnostics | None = None

    def power_map(self) -> dict[str, float]:
        return dict(zip(self.sps, self.q))

    def rate_map(self) -> dict[str, float]:
        return dict(zip(self.sps, self.rates))

    def total_power(self) -> float:
        return float(sum(self.q))


# ---------------------------------------------------------------------------
# problem construction
# ---------------------------------------------------------------------------

def build_power_problem(
    template: Template,
    uav: Uav,
    scenario: Scenario,
    config: SchedulingConfig | None = None,
) -> PowerProblem:
    """Assemble one UAV's power program from a feasible template.

    Each cross-provider task edge contributes a rho-gap constraint whose
    bound is -(ln(alpha1) + w_u*w_s) / (D*w_s). A positive numerator means
    no rate assignment can reach the alpha1 contact probability, which
    makes the template unusable at this threshold. The derived bound
    assumes both endpoints of the edge share one data size.
    """
    config = config or scenario.config
    task = scenario.task_of(uav.id)
    assignment = template.assignment_for(uav.id)

    loads: dict[str, float] = {}
    for comp in task.components:
        sp_id = assignment[comp.id]
        loads[sp_id] = loads.get(sp_id, 0.0) + comp.data_size
    used = tuple(sp.id for sp in scenario.vc.sps if sp.id in loads)
    gains = tuple(
        a2g_gain(uav, scenario.vc.sp(sp_id), scenario.channel) for sp_id in used
    )

    ln_alpha1 = math.log(config.alpha1)
    gap_constraints = []
    for e in task.edges:
        ka, kb = assignment[e.a], assignment[e.b]
        if ka == kb:
            continue
        if not scenario.vc.has_edge(ka, kb):
            raise ValueError(
                f"template maps edge {e.a}-{e.b} of {uav.id} to non-adjacent "
                f"providers {ka},{kb}; validate templates before building problems"
            )
        ws = scenario.vc.edge_weight(ka, kb)
        d_a = task.component(e.a).data_size
        d_b = task.component(e.b).data_size
        if abs(d_a - d_b) > 1e-12 * max(d_a, d_b):
            raise HeterogeneousD(
                f"edge {e.a}-{e.b} of {uav.id} couples data sizes {d_a} and {d_b}; "
                "the gap bound requires a shared size"
            )
        numerator = ln_alpha1 + e.weight * ws
        tol = 1e-12 * max(1.0, e.weight * ws)
        if numerator > tol:
            raise TemplateInfeasibleForAlpha1(
                f"edge {e.a}-{e.b} of {uav.id} on {ka},{kb}: contact probability "
                f"exp(-{e.weight * ws:.6g}) < alpha1={config.alpha1}; no rate can satisfy it"
            )
        bound = 0.0 if abs(numerator) <= tol else -numerator / (d_a * ws)
        gap_constraints.append(
            GapConstraint(sp_a=ka, sp_b=kb, bound=bound, edge=f"{uav.id}:{e.a}-{e.b}")
        )

    return PowerProblem(
        uav_id=uav.id,
        sps=used,
        gains=gains,
        loads=tuple(loads[sp_id] for sp_id in used),
        budget=uav.power_budget,
        bandwidth=scenario.channel.bandwidth,
        noise_power=scenario.channel.noise_power,
        omega1=config.omega1,
        omega2=config.omega2,
        p=config.p,
        constraints=tuple(gap_constraints),
    )


def evaluate_allocation(problem: PowerProblem, alloc: PowerAllocation) -> tuple[float, float]:
    """Peak per-provider transmission time and total transmit energy of an
    allocation, without the constant execution and tail terms."""
    loads = np.asarray(problem.loads)
    rates = np.asarray(alloc.rates)
    q = np.asarray(alloc.q)
    times = loads / rates
    return float(np.max(times)), float(np.sum(q * times))


def allocation_violations(
    problem: PowerProblem,
    q: np.ndarray,
    *,
    budget_slack: float = 1e-9,
    gap_slack: float = 1e-12,
) -> list[str]:
    """Constraint check for any candidate power vector (baselines, tests)."""
    q = np.asarray(q, dtype=float)
    out = []
    if np.any(q < 0):
        out.append("negative power entry")
        return out
    total = float(np.sum(q))
    if total > problem.budget * (1.0 + budget_slack):
        out.append(f"budget exceeded: {total} > {problem.budget}")
    if np.any(q == 0):
        out.append("zero power on a used provider")
        return out
    rho = problem.rho_of_power(q)
    for c in problem.constraints:
        d = abs(rho[problem.index_of(c.sp_a)] - rho[problem.index_of(c.sp_b)])
        allowed = c.bound + gap_slack * max(1.0, c.bound) + 1e-18
        if d > allowed:
            out.append(f"gap {c.edge}: |d rho| = {d:.3e} > bound {c.bound:.3e}")
    return out


# ---------------------------------------------------------------------------
# interior-point solve
# ---------------------------------------------------------------------------

class _Reduced:
    """The program after merging zero-bound pairs into shared variables."""

    def __init__(self, problem: PowerProblem):
        self.problem = problem
        n = len(problem.sps)

        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for c in problem.constraints:
            if c.bound == 0.0:
                a = find(problem.index_of(c.sp_a))
                b = find(problem.index_of(c.sp_b))
                if a != b:
                    parent[max(a, b)] = min(a, b)

        roots = sorted({find(i) for i in range(n)})
        self.group_of = np.array([roots.index(find(i)) for i in range(n)])
        self.n_groups = len(roots)

        # Tightest positive bound per unordered group pair.
        pair_bounds: dict[tuple[int, int], float] = {}
        for c in problem.constraints:
            if c.bound == 0.0:
                continue
            a = int(self.group_of[problem.index_of(c.sp_a)])
            b = int(self.group_of[problem.index_of(c.sp_b)])
            if a == b:
                continue
            key = (min(a, b), max(a, b))
            pair_bounds[key] = min(pair_bounds.get(key, math.inf), c.bound)
        self.gaps = sorted((a, b, bound) for (a, b), bound in pair_bounds.items())

        g = np.asarray(problem.gains)
        # A rho floor at twice the budget: strictly below any point the
        # budget constraint allows, so it never competes with that
        # boundary, yet it keeps 1/(B rho) bounded during line searches.
        q_full = problem.budget * 2.0
        rho_full = 1.0 / (
            problem.bandwidth * np.log2(1.0 + q_full * g / problem.noise_power)
        )
        self.floors = np.array(
            [
                float(np.max(rho_full[self.group_of == gi]))
                for gi in range(self.n_groups)
            ]
        )

        self.w1 = np.asarray(problem.w1, dtype=float).copy()
        self.w2 = np.asarray(problem.w2, dtype=float).copy()
        # Budget constraint in the cancellation-free scaled form
        # sum_k N0/(Q g_k) * (2^(1/(B rho_k)) - 1) - 1 <= 0, identical to
        # sum q_k <= Q under the power inversion.
        self.bcoef = problem.noise_power / (problem.budget * g)
        self.B = problem.bandwidth
        self.p = problem.p
        self.obj_scale = 1.0

    def rescale_objective(self, scale: float) -> None:
        """Normalize the objective to O(1) so barrier multipliers, and with
        them the attainable boundary slack, stay within float resolution."""
        self.obj_scale = max(scale, 1e-300)
        self.w1 = self.w1 / self.obj_scale
        self.w2 = self.w2 / self.obj_scale

    def expand(self, x: np.ndarray) -> np.ndarray:
        return x[self.group_of]

    # objective pieces, all in terms of per-provider rho -------------------

    def _um1(self, rho: np.ndarray) -> np.ndarray:
        """2^(1/(B rho)) - 1 without cancellation. Infeasible trial points
        can overflow; the resulting inf is rejected by the feasibility
        check, so silence the warning."""
        with np.errstate(over="ignore"):
            return np.expm1(LOG2 / (self.B * rho))

    def objective(self, x: np.ndarray) -> float:
        rho = self.expand(x)
        um1 = self._um1(rho)
        return float(np.sum(self.w1 * rho**self.p + self.w2 * rho * um1))

    def obj_grad_hess(
        self, x: np.ndarray
    ) -> tuple[float, np.ndarray, np.ndarray, float]:
        """Value, gradient, Hessian of the (scaled) objective, plus the
        largest magnitude among the gradient's constituent terms. Near a
        stationary point the terms cancel, so that magnitude, not the
        summed gradient, is the natural scale for residual tests."""
        rho = self.expand(x)
        um1 = self._um1(rho)
        u = um1 + 1.0
        B, p = self.B, self.p
        du = -(LOG2 / (B * rho**2)) * u
        val = float(np.sum(self.w1 * rho**p + self.w2 * rho * um1))
        t1 = p * self.w1 * rho ** (p - 1)
        t2 = self.w2 * (um1 + rho * du)
        d1 = t1 + t2
        d2 = p * (p - 1) * self.w1 * rho ** (p - 2) + self.w2 * u * LOG2**2 / (
            B**2 * rho**3
        )
        magnitude = np.abs(t1) + self.w2 * (um1 + rho * np.abs(du))
        grad = np.bincount(self.group_of, weights=d1, minlength=self.n_groups)
        hess_diag = np.bincount(self.group_of, weights=d2, minlength=self.n_groups)
        scale = np.bincount(self.group_of, weights=magnitude, minlength=self.n_groups)
        return val, grad, np.diag(hess_diag), float(np.max(scale))

    # constraints: value < 0 strictly inside --------------------------------

    def constraint_values(self, x: np.ndarray) -> np.ndarray:
        rho = self.expand(x)
        um1 = self._um1(rho)
        vals = [float(np.sum(self.bcoef * um1)) - 1.0]
        for a, b, bound in self.gaps:
            # Same feasible set as (x_a - x_b)^2 <= bound^2, scaled to O(1)
            # so the barrier multipliers stay well conditioned.
            vals.append(((x[a] - x[b]) / bound) ** 2 - 1.0)
        vals.extend(self.floors - x)
        return np.array(vals)

    def strictly_feasible(self, x: np.ndarray) -> bool:
        return bool(np.all(x > 0) and np.all(self.constraint_values(x) < 0))

    def barrier_value(self, x: np.ndarray, mu: float) -> float:
        c = self.constraint_values(x)
        if np.any(c >= 0):
            return math.inf
        return self.objective(x) + mu * float(np.sum(-np.log(-c)))

    def barrier_grad_hess(
        self, x: np.ndarray, mu: float
    ) -> tuple[float, np.ndarray, np.ndarray, float]:
        """Value, gradient, Hessian, and gradient term scale of
        objective + mu * sum(-log(-c))."""
        val, grad, hess, scale = self.obj_grad_hess(x)
        rho = self.expand(x)
        um1 = self._um1(rho)
        u = um1 + 1.0
        du = -(LOG2 / (self.B * rho**2)) * u
        d2u = u * (LOG2**2 / (self.B**2 * rho**4) + 2.0 * LOG2 / (self.B * rho**3))

        # budget constraint
        c0 = float(np.sum(self.bcoef * um1)) - 1.0
        gc = np.bincount(
            self.group_of, weights=self.bcoef * du, minlength=self.n_groups
        )
        hc_diag = np.bincount(
            self.group_of, weights=self.bcoef * d2u, minlength=self.n_groups
        )
        val += mu * -math.log(-c0)
        grad = grad + mu * gc / (-c0)
        hess = hess + mu * (np.outer(gc, gc) / c0**2 + np.diag(hc_diag) / (-c0))

        # gap constraints, scaled form ((x_a - x_b)/bound)^2 - 1
        for a, b, bound in self.gaps:
            d = (x[a] - x[b]) / bound
            c = d * d - 1.0
            gvec = np.zeros(self.n_groups)
            gvec[a] = 2.0 * d / bound
            gvec[b] = -2.0 * d / bound
            hmat = np.zeros((self.n_groups, self.n_groups))
            hmat[a, a] = hmat[b, b] = 2.0 / bound**2
            hmat[a, b] = hmat[b, a] = -2.0 / bound**2
            val += mu * -math.log(-c)
            grad = grad + mu * gvec / (-c)
            hess = hess + mu * (np.outer(gvec, gvec) / c**2 + hmat / (-c))

        # floors: c = floor - x, gradient of c is -1 per coordinate
        cf = self.floors - x
        val += mu * float(np.sum(-np.log(-cf)))
        grad = grad - mu / (-cf)
        hess = hess + mu * np.diag(1.0 / cf**2)
        return val, grad, hess, scale

    def constraint_gradients(self, x: np.ndarray) -> np.ndarray:
        """Rows aligned with constraint_values."""
        rho = self.expand(x)
        u = self._um1(rho) + 1.0
        du = -(LOG2 / (self.B * rho**2)) * u
        rows = [
            np.bincount(
                self.group_of, weights=self.bcoef * du, minlength=self.n_groups
            )
        ]
        for a, b, bound in self.gaps:
            d = (x[a] - x[b]) / bound
            gvec = np.zeros(self.n_groups)
            gvec[a] = 2.0 * d / bound
            gvec[b] = -2.0 * d / bound
            rows.append(gvec)
        for gi in range(self.n_groups):
            gvec = np.zeros(self.n_groups)
            gvec[gi] = -1.0
            rows.append(gvec)
        return np.array(rows)

    def kkt_residual(self, x: np.ndarray, mu: float) -> float:
        """Stationarity residual of the returned point with least-squares
        non-negative multipliers over the near-active constraints, relative
        to the objective gradient's term magnitude. Complementarity is
        mu * (number of constraints) by construction of the barrier."""
        _, grad_obj, _, scale = self.obj_grad_hess(x)
        scale = max(scale, 1e-300)
        cvals = self.constraint_values(x)
        grads = self.constraint_gradients(x)
        lam_bar = mu / np.maximum(-cvals, 1e-300)
        weight = lam_bar * np.max(np.abs(grads), axis=1)
        active = weight >= 1e-12 * scale
        if not np.any(active):
            return float(np.max(np.abs(grad_obj))) / scale
        a_mat = grads[active].T
        lam, *_ = np.linalg.lstsq(a_mat, -grad_obj, rcond=None)
        lam = np.maximum(lam, 0.0)
        residual = grad_obj + a_mat @ lam
        return float(np.max(np.abs(residual))) / scale


def _starting_point(red: _Reduced) -> np.ndarray:
    """A strictly feasible start: uniform half-budget powers, gap-projected
    by pair averaging, with provable fallbacks."""
    problem = red.problem
    n = len(problem.sps)
    q0 = np.full(n, problem.budget / (2.0 * n))
    rho0 = problem.rho_of_power(q0)
    x = np.array(
        [float(np.max(rho0[red.group_of == gi])) for gi in range(red.n_groups)]
    )

    def sweep(x):
        for _ in range(60):
            moved = False
            for a, b, bound in red.gaps:
                d = x[a] - x[b]
                if d * d >= bound * bound:
                    mid = 0.5 * (x[a] + x[b])
                    half = 0.45 * bound
                    s = 1.0 if d >= 0 else -1.0
                    x[a] = mid + s * half
                    x[b] = mid - s * half
                    moved = True
            if not moved:
                return x
        return x

    x = sweep(x.copy())
    if red.strictly_feasible(x):
        return x

    # Averaging can push implied powers past the budget; back power off
    # geometrically and re-project.
    x_try = x.copy()
    for _ in range(60):
        rho_members = red.expand(x_try)
        q = problem.power_of_rho(rho_members) * 0.5
        rho_halved = problem.rho_of_power(q)
        x_try = np.array(
            [
                float(np.max(rho_halved[red.group_of == gi]))
                for gi in range(red.n_groups)
            ]
        )
        x_try = sweep(x_try)
        if red.strictly_feasible(x_try):
            return x_try

    # Last resort: equalize every gap-connected component at its largest
    # member value. Gaps become exactly zero (strictly inside any positive
    # bound), total power only shrinks, and floors stay clear.
    comp = list(range(red.n_groups))

    def find(i):
        while comp[i] != i:
            comp[i] = comp[comp[i]]
            i = comp[i]
        return i

    for a, b, _ in red.gaps:
        ra, rb = find(a), find(b)
        if ra != rb:
            comp[max(ra, rb)] = min(ra, rb)
    x_eq = x.copy()
    for root in {find(i) for i in range(red.n_groups)}:
        members = [i for i in range(red.n_groups) if find(i) == root]
        x_eq[members] = max(x[i] for i in members)
    if red.strictly_feasible(x_eq):
        return x_eq
    raise Infeasible(
        f"no strictly feasible starting point for {problem.uav_id}'s power program"
    )


def optimize_power(
    problem: PowerProblem,
    *,
    mu0: float = 1.0,
    mu_shrink: float = 0.2,
    mu_min: float = 1e-11,
    armijo_c: float = 1e-4,
    backtrack: float = 0.5,
    max_inner: int = 80,
    grad_tol: float = 1e-9,
) -> tuple[RhoVector, PowerAllocation]:
    """Solve the convexified per-UAV program to optimality.

    Returns the inverse-rate vector and the recovered power allocation. The
    completion-time weight must be positive; with it at zero the objective
    loses coercivity and the infimum sits at zero power.
    """
    if problem.omega1 <= 0:
        raise ValueError("omega1 must be > 0: the time term makes the program coercive")
    red = _Reduced(problem)
    x = _starting_point(red)
    red.rescale_objective(red.objective(x))

    total_iters = 0
    outer_steps = 0
    mu = mu0
    while True:
        outer_steps += 1
        final_stage = mu < mu_min
        for _ in range(max_inner):
            val, grad, hess, scale = red.barrier_grad_hess(x, mu)
            try:
                step = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError:
                ridge = 1e-12 * float(np.max(np.abs(np.diag(hess)))) + 1e-300
                step = np.linalg.solve(hess + ridge * np.eye(len(x)), -grad)
            decrement = float(-grad @ step)
            grad_small = float(np.max(np.abs(grad))) <= grad_tol * scale
            # Intermediate stages only center the iterate; the last stage
            # polishes until the duals-fitted stationarity residual is an
            # order below the advertised tolerance.
            if final_stage:
                if grad_small or red.kkt_residual(x, mu) <= 1e-9:
                    break
            elif decrement <= 2e-10 * max(1.0, abs(val)):
                break
            if decrement <= 0:
                break
            total_iters += 1
            t = 1.0
            gTs = float(grad @ step)
            accepted = False
            while t > 1e-18:
                x_new = x + t * step
                if red.barrier_value(x_new, mu) <= val + armijo_c * t * gTs:
                    x = x_new
                    accepted = True
                    break
                t *= backtrack
            if not accepted:
                # Progress is float-limited; accept the iterate if it is
                # already essentially stationary.
                if grad_small or decrement <= 1e-10 * max(1.0, abs(val)):
                    break
                raise NumericalFailure(
                    f"barrier stalled at mu={mu:.3e} for {problem.uav_id}",
                    last_iterate=red.expand(x),
                )
        if final_stage:
            break
        mu *= mu_shrink

    kkt = red.kkt_residual(x, mu)
    rho = red.expand(x)
    q = problem.power_of_rho(rho)

    # Budget polish: the barrier leaves a sliver of slack on an active
    # budget constraint; when spending it keeps every gap bound satisfied
    # and lowers the objective, take the boundary point itself.
    total = float(np.sum(q))
    if 0 < total < problem.budget:
        q_full = q * (problem.budget / total)
        rho_full = problem.rho_of_power(q_full)
        ok = True
        for c in problem.constraints:
            d = abs(
                rho_full[problem.index_of(c.sp_a)]
                - rho_full[problem.index_of(c.sp_b)]
            )
            if d > c.bound:
                ok = False
                break
        if ok and problem.surrogate_objective(rho_full) <= problem.surrogate_objective(rho):
            q, rho = q_full, rho_full

    g = np.asarray(problem.gains)
    rates = problem.bandwidth * np.log2(1.0 + q * g / problem.noise_power)
    diag = SolveDiagnostics(
        iterations=total_iters,
        outer_steps=outer_steps,
        mu_final=mu,
        kkt_residual=kkt,
    )
    return (
        RhoVector(sps=problem.sps, values=tuple(float(v) for v in rho)),
        PowerAllocation(
            sps=problem.sps,
            q=tuple(float(v) for v in q),
            rates=tuple(float(v) for v in rates),
            diagnostics=diag,
        ),
    )


# ---------------------------------------------------------------------------
# baseline allocators
# ---------------------------------------------------------------------------

def _allocation_from_q(problem: PowerProblem, q: np.ndarray) -> PowerAllocation:
    g = np.asarray(problem.gains)
    rates = problem.bandwidth * np.log2(1.0 + q * g / problem.noise_power)
    return PowerAllocation(
        sps=problem.sps,
        q=tuple(float(v) for v in q),
        rates=tuple(float(v) for v in rates),
    )


def uniform_power(problem: PowerProblem) -> PowerAllocation:
    """Split the budget evenly across used providers; fails rather than
    bend the gap constraints."""
    n = len(problem.sps)
    q = np.full(n, problem.budget / n)
    violations = allocation_violations(problem, q)
    if violations:
        raise BaselineInfeasible(f"uniform allocation: {violations[0]}")
    return _allocation_from_q(problem, q)


def random_power(
    problem: PowerProblem, seed, max_iters: int = 1000
) -> PowerAllocation:
    """Rejection-sample budget splits until one passes the gap check.

    Draws are uniform on the simplex of non-negative splits summing to the
    budget (normalized exponentials).
    """
    rng = np.random.default_rng(seed)
    n = len(problem.sps)
    for _ in range(max_iters):
        w = rng.exponential(1.0, n) + 1e-12
        q = problem.budget * w / float(np.sum(w))
        if not allocation_violations(problem, q):
            return _allocation_from_q(problem, q)
    raise BaselineInfeasible(
        f"random allocation: no feasible split in {max_iters} draws"
    )


def channel_weighted_power(problem: PowerProblem) -> PowerAllocation:
    """Give each provider power proportional to its channel gain."""
    g = np.asarray(problem.gains)
    q = problem.budget * g / float(np.sum(g))
    violations = allocation_violations(problem, q)
    if violations:
        raise BaselineInfeasible(f"channel-weighted allocation: {violations[0]}")
    return _allocation_from_q(problem, q)


def annealed_power(
    problem: PowerProblem,
    seed,
    *,
    t0: float = 1.0,
    t_min: float = 1e-4,
    cooling: float = 0.95,
    proposals_per_temp: int = 50,
    grid_steps: int = 1000,
) -> PowerAllocation:
    """Simulated annealing over a discrete power grid.

    Powers live on multiples of budget/grid_steps; proposals move one
    coordinate by one step, decrementing the largest other coordinate when
    the budget is already exhausted. Only gap-feasible states are accepted,
    and the annealing energy is the same smoothed time-plus-energy
    objective the convex stage minimizes, so the two attack one problem
    with different machinery.
    """
    rng = np.random.default_rng(seed)
    n = len(problem.sps)
    if n > grid_steps:
        raise BaselineInfeasible("annealing grid coarser than the provider count")
    unit = problem.budget / grid_steps
    g = np.asarray(problem.gains)
    loads = np.asarray(problem.loads)
    pairs = [
        (problem.index_of(c.sp_a), problem.index_of(c.sp_b), c.bound)
        for c in problem.constraints
    ]

    w1 = np.asarray(problem.w1)
    w2 = np.asarray(problem.w2)

    def assess(counts: np.ndarray) -> float | None:
        """Smoothed objective of a grid state, or None when it breaks a
        gap bound."""
        q = counts * unit
        rates = problem.bandwidth * np.log2(1.0 + q * g / problem.noise_power)
        rho = 1.0 / rates
        for a, b, bound in pairs:
            if abs(rho[a] - rho[b]) > bound * (1.0 + 1e-12) + 1e-18:
                return None
        um1 = q * g / problem.noise_power
        return float(np.sum(w1 * rho**problem.p + w2 * rho * um1))

    def feasible(counts: np.ndarray) -> bool:
        return assess(counts) is not None

    def projected_start() -> np.ndarray:
        """Half-budget uniform powers with pairwise rho averaging, rounded
        onto the grid; finds unbalanced-but-feasible splits the random
        restarts would practically never hit."""
        rho = problem.rho_of_power(np.full(n, problem.budget / (2.0 * n)))
        for _ in range(60):
            moved = False
            for a, b, bound in pairs:
                d = rho[a] - rho[b]
                if abs(d) >= bound:
                    mid = 0.5 * (rho[a] + rho[b])
                    half = 0.45 * bound
                    s = 1.0 if d >= 0 else -1.0
                    rho[a], rho[b] = mid + s * half, mid - s * half
                    moved = True
            if not moved:
                break
        q = problem.power_of_rho(rho)
        trial = np.maximum(np.round(q / unit).astype(int), 1)
        total = int(np.sum(trial))
        if total > grid_steps:
            trial = np.maximum((trial * grid_steps) // (total + 1), 1)
        return trial

    counts = np.full(n, grid_steps // n, dtype=int)
    if not feasible(counts):
        found = False
        trial = projected_start()
        if int(np.sum(trial)) <= grid_steps and feasible(trial):
            counts, found = trial, True
        if not found:
            for _ in range(2000):
                trial = 1 + rng.multinomial(grid_steps - n, [1.0 / n] * n)
                if feasible(trial):
                    counts, found = trial, True
                    break
        if not found:
            raise BaselineInfeasible(
                "annealing: no feasible grid state found to start from"
            )

    current = assess(counts)
    best, best_energy = counts.copy(), current
    temp = t0
    while temp > t_min:
        for _ in range(proposals_per_temp):
            i = int(rng.integers(n))
            delta = int(rng.integers(2)) * 2 - 1
            trial = counts.copy()
            if delta < 0:
                if trial[i] <= 1:
                    continue
                trial[i] -= 1
            else:
                trial[i] += 1
                if int(np.sum(trial)) > grid_steps:
                    others = [j for j in range(n) if j != i and trial[j] >= 2]
                    if not others:
                        continue
                    j = max(others, key=lambda j: (trial[j], -j))
                    trial[j] -= 1
            e_new = assess(trial)
            if e_new is None:
                continue
            if e_new <= current or rng.random() < math.exp((current - e_new) / temp):
                counts, current = trial, e_new
                if current < best_energy:
                    best, best_energy = counts.copy(), current
        temp *= cooling
    return _allocation_from_q(problem, best * unit)


def peak_time_by_norm_order(
    problem: PowerProblem, p_values: tuple[int, ...] | list[int], **solver_kw
) -> list[tuple[int, float]]:
    """Re-solve the program for each norm order and report the achieved
    peak transmission time."""
    out = []
    for p in p_values:
        _, alloc = optimize_power(problem.with_p(int(p)), **solver_kw)
        peak, _ = evaluate_allocation(problem, alloc)
        out.append((int(p), peak))
    return out
