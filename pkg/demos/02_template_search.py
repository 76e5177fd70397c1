"""Template enumeration on the reference walkthrough instance.

Replays the pinned exploration trace step by step — the candidate sets,
the available-degree updates — and then enumerates the full template set,
cross-checking it against the exhaustive baseline.
"""

from vcsched import (
    SearchState,
    available_degree,
    build_sequence,
    candidates,
    enumerate_templates,
    exhaustive_search,
    walkthrough_fixture,
)

scenario = walkthrough_fixture()
sequence = build_sequence(scenario.tasks)
print("exploration order:", " ".join(c for _, c in sequence.order))
for key in sequence.order:
    preds = sorted(c for _, c in sequence.pred[key])
    print(f"  pred({key[1]}) = {{{', '.join(preds)}}}")

print("\nwalkthrough branch:")
state = SearchState(scenario)
branch = [("F", "s6"), ("E", "s7"), ("H", "s6"), ("G", "s5"), ("I", "s3"),
          ("A", "s5"), ("B", "s2"), ("C", "s4"), ("D", "s5")]
owner = {c: ("u1" if c in "ABCD" else "u2") for c in "ABCDEFGHI"}
for comp, chosen in branch:
    cands = candidates(state, (owner[comp], comp), sequence, scenario)
    print(f"  {comp}: candidates {cands} -> {chosen}   "
          f"[D^s(s6) = {available_degree(state, 's6')}]")
    state.assign((owner[comp], comp), chosen)

templates = enumerate_templates(scenario)
oracle = exhaustive_search(scenario)
print(f"\nenumerated {len(templates)} templates; exhaustive baseline finds {len(oracle)}")
print("sets equal:", {t.assignment for t in templates} == {t.assignment for t in oracle})
print("\nfirst template:", templates[0].canonical_line())
