"""Power allocation on one template of the walkthrough instance.

Builds the first UAV's program (two rate-coupled provider pairs), solves
it with the interior-point stage, and lines the result up against the
baseline allocators.
"""

import numpy as np

from vcsched import (
    BaselineInfeasible,
    annealed_power,
    build_power_problem,
    channel_weighted_power,
    evaluate_allocation,
    enumerate_templates,
    optimize_power,
    random_power,
    walkthrough_fixture,
    uniform_power,
)

scenario = walkthrough_fixture()
template = next(
    t for t in enumerate_templates(scenario)
    if t.mapping == {
        ("u1", "A"): "s5", ("u1", "B"): "s2", ("u1", "C"): "s4", ("u1", "D"): "s5",
        ("u2", "E"): "s7", ("u2", "F"): "s6", ("u2", "G"): "s5",
        ("u2", "H"): "s6", ("u2", "I"): "s3",
    }
)
problem = build_power_problem(template, scenario.uav("u1"), scenario)
print("u1 uses providers:", problem.sps)
print("per-provider load (bits):", dict(zip(problem.sps, problem.loads)))
print("rate-coupled pairs:", [(c.sp_a, c.sp_b, f"{c.bound:.3e}") for c in problem.constraints])

rho, alloc = optimize_power(problem)
print(f"\ninterior point: {alloc.diagnostics.iterations} Newton steps, "
      f"kkt residual {alloc.diagnostics.kkt_residual:.2e}")

rows = [("optimal", alloc)]
for name, make in [("uniform", uniform_power),
                   ("channel-weighted", channel_weighted_power),
                   ("random", lambda p: random_power(p, seed=7)),
                   ("annealed", lambda p: annealed_power(p, seed=7))]:
    try:
        rows.append((name, make(problem)))
    except BaselineInfeasible as exc:
        print(f"{name}: infeasible ({exc})")

print(f"\n{'allocator':>16} {'peak time':>10} {'energy':>10} {'smoothed':>12} {'sum q':>7}")
for name, a in rows:
    peak, energy = evaluate_allocation(problem, a)
    surrogate = problem.surrogate_objective(1.0 / np.array(a.rates))
    print(f"{name:>16} {peak:10.3f} {energy:10.3f} {surrogate:12.5f} {a.total_power():7.3f}")
