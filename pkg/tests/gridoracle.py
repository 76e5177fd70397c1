"""Independent brute-force oracle for the convexified power program.

Evaluates the surrogate objective on a dense grid over a rho box and
returns the best feasible grid point. Deliberately shares no code with the
interior-point solver: objective and constraints are written out directly
from their definitions, and the search is pure enumeration.
"""

from __future__ import annotations

import itertools

import numpy as np


def _unconstrained_argmin_1d(w1, w2, bandwidth, p, lo, hi, iters=200):
    """Golden-section minimum of one coordinate's objective term."""
    phi = (np.sqrt(5.0) - 1.0) / 2.0

    def f(rho):
        u = 2.0 ** (1.0 / (bandwidth * rho))
        return w1 * rho**p + w2 * rho * (u - 1.0)

    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def rho_box(problem, widen=3.0):
    """A per-coordinate search box certain to bracket the interesting
    region: from just above the full-budget rho up to a multiple of the
    largest single-coordinate unconstrained minimum plus gap slack."""
    g = np.asarray(problem.gains)
    w1 = np.asarray(problem.w1)
    w2 = np.asarray(problem.w2)
    lo = 1.0 / (
        problem.bandwidth
        * np.log2(1.0 + problem.budget * g / problem.noise_power)
    ) * (1.0 + 1e-9)
    hi_probe = lo * 1e6
    mins = np.array(
        [
            _unconstrained_argmin_1d(
                w1[k], w2[k], problem.bandwidth, problem.p, lo[k], hi_probe[k]
            )
            for k in range(len(g))
        ]
    )
    slack = sum(c.bound for c in problem.constraints)
    hi = np.full_like(lo, widen * float(np.max(mins)) + slack)
    hi = np.maximum(hi, lo * 2.0)
    return lo, hi


def grid_minimum(problem, points_per_dim=200):
    """Best feasible grid value of the surrogate objective, or None when no
    grid point is feasible. Returns (value, rho_tuple)."""
    lo, hi = rho_box(problem)
    n = len(problem.sps)
    grids = [np.linspace(lo[k], hi[k], points_per_dim) for k in range(n)]
    g = np.asarray(problem.gains)
    w1 = np.asarray(problem.w1)
    w2 = np.asarray(problem.w2)
    bandwidth = problem.bandwidth

    # Per-coordinate pieces; the full objective/budget are outer sums.
    per_obj = []
    per_budget = []
    for k in range(n):
        rho = grids[k]
        u = 2.0 ** (1.0 / (bandwidth * rho))
        per_obj.append(w1[k] * rho**problem.p + w2[k] * rho * (u - 1.0))
        per_budget.append(u / g[k])

    shape = [points_per_dim] * n

    def axis_view(arr, k):
        view = [1] * n
        view[k] = points_per_dim
        return arr.reshape(view)

    objective = np.zeros(shape)
    budget = np.zeros(shape)
    for k in range(n):
        objective = objective + axis_view(per_obj[k], k)
        budget = budget + axis_view(per_budget[k], k)
    feasible = budget <= problem.c_star

    index = {sp: k for k, sp in enumerate(problem.sps)}
    for c in problem.constraints:
        a, b = index[c.sp_a], index[c.sp_b]
        diff = axis_view(grids[a], a) - axis_view(grids[b], b)
        feasible = feasible & (np.abs(diff) <= c.bound)

    if not np.any(feasible):
        return None
    masked = np.where(feasible, objective, np.inf)
    flat = int(np.argmin(masked))
    idx = np.unravel_index(flat, shape)
    rho = tuple(float(grids[k][idx[k]]) for k in range(n))
    return float(masked[idx]), rho


def brute_force_schedule_objective(scenario, templates, allocators):
    """Exhaustive cross-product reference: the minimum objective over all
    (template, per-UAV allocation from `allocators`) combinations.

    `allocators` maps uav_id to a list of PowerAllocation candidates per
    template index; built by the caller from whatever allocation rules the
    test wants to compare against.
    """
    from vcsched.scheduler import score_template

    best = None
    for t_idx, template in enumerate(templates):
        per_uav = allocators(t_idx, template)
        if per_uav is None:
            continue
        uav_ids = sorted(per_uav)
        for combo in itertools.product(*(per_uav[u] for u in uav_ids)):
            allocations = dict(zip(uav_ids, combo))
            breakdown = score_template(template, allocations, scenario)
            if best is None or breakdown.total < best:
                best = breakdown.total
    return best
