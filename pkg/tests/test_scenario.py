"""Scenario generation, validation, serialization, and the walkthrough
fixture."""

import json

import pytest

from vcsched.errors import ParseError, SchemaVersionMismatch, UnsatisfiableSpec
from vcsched.scenario import (
    GenSpec,
    TASK_SHAPES,
    generate,
    load,
    save,
    scenario_to_text,
    walkthrough_fixture,
)


def small_spec(**overrides) -> GenSpec:
    base = dict(sp_count=6, vm_total=8, uav_count=1, task_shapes=("star-4",),
                v2v_radius=450.0, uav_radius=700.0)
    base.update(overrides)
    return GenSpec(**base)


def test_generation_deterministic_bytes():
    spec = small_spec()
    a = generate(spec, 123)
    b = generate(spec, 123)
    assert scenario_to_text(a) == scenario_to_text(b)
    c = generate(spec, 124)
    assert scenario_to_text(a) != scenario_to_text(c)


def test_vm_total_conserved():
    scenario = generate(small_spec(sp_count=7, vm_total=8), 9)
    assert sum(sp.vm_count for sp in scenario.vc.sps) == 8


def test_weights_and_params_inside_intervals():
    spec = small_spec(ws_interval=(0.05, 0.06), wu_interval=(0.1, 0.3))
    for seed in range(10):
        s = generate(spec, seed)
        for e in s.vc.edges:
            assert 0.05 <= e.weight <= 0.06
        for t in s.tasks:
            for e in t.edges:
                assert 0.1 <= e.weight <= 0.3
        for c in s.tasks[0].components:
            assert 5.0e5 <= c.data_size <= 6.0e5
        assert 1.0e7 <= s.channel.bandwidth <= 1.2e7
        assert 4.0e-3 <= s.channel.noise_power <= 5.0e-3
        for u in s.uavs:
            assert 1.5 <= u.power_budget <= 2.0
            assert 80.0 <= u.position[2] <= 100.0


def test_coverage_follows_distance_rule():
    import math

    spec = small_spec(uav_radius=500.0)
    s = generate(spec, 17)
    for u in s.uavs:
        for sp in s.vc.sps:
            within = math.dist(u.position, sp.position) <= 500.0
            assert (sp.id in u.coverage) == within


def test_vc_edge_count_trim_and_augment():
    trimmed = generate(small_spec(vc_edge_count=3), 3)
    assert len(trimmed.vc.edges) == 3
    dense = generate(small_spec(vc_edge_count=12), 3)
    assert len(dense.vc.edges) == 12


def test_impossible_edge_count_rejected():
    with pytest.raises(UnsatisfiableSpec):
        small_spec(sp_count=4, vc_edge_count=7)  # max is 6


def test_unknown_shape_rejected():
    with pytest.raises(UnsatisfiableSpec):
        small_spec(task_shapes=("dodecahedron-12",))


def test_round_trip_identity(tmp_path):
    scenario = generate(small_spec(uav_count=2, task_shapes=("star-4", "tri-3")), 77)
    path = tmp_path / "s.scn"
    save(scenario, path)
    loaded = load(path)
    assert loaded == scenario
    save(loaded, tmp_path / "s2.scn")
    assert (tmp_path / "s.scn").read_bytes() == (tmp_path / "s2.scn").read_bytes()


def test_parse_error_names_field(tmp_path):
    scenario = generate(small_spec(), 5)
    doc = json.loads(scenario_to_text(scenario))
    doc["vc"]["sps"][2]["vm_count"] = -3
    path = tmp_path / "bad.scn"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(ParseError, match=r"vc\.sps\[2\]"):
        load(path)


def test_version_mismatch(tmp_path):
    scenario = generate(small_spec(), 5)
    doc = json.loads(scenario_to_text(scenario))
    doc["version"] = 99
    path = tmp_path / "v99.scn"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(SchemaVersionMismatch):
        load(path)


def test_malformed_json_reports_location(tmp_path):
    path = tmp_path / "broken.scn"
    path.write_text('{"format": "vcsched-scenario",\n  "version": ', encoding="utf-8")
    with pytest.raises(ParseError, match="line"):
        load(path)


def test_shipped_shapes_present():
    for required in ("star-4", "hub-6", "ring-5"):
        assert required in TASK_SHAPES
    comps, edges = TASK_SHAPES["hub-6"]
    degree = {c: 0 for c in comps}
    for a, b in edges:
        degree[a] += 1
        degree[b] += 1
    assert max(degree.values()) == 5  # the rare component


# ---------------------------------------------------------------------------
# walkthrough fixture
# ---------------------------------------------------------------------------

def test_fixture_validates_and_counts():
    s = walkthrough_fixture()
    vm = {sp.id: sp.vm_count for sp in s.vc.sps}
    assert vm["s3"] == 2 and vm["s5"] == 3 and vm["s6"] == 2 and vm["s7"] == 1
    assert set(s.vc.neighbors("s6")) == {"s3", "s5", "s7"}
    assert s.uav("u1").coverage == {"s2", "s3", "s4", "s5"}
    assert s.uav("u2").coverage == {"s3", "s5", "s6", "s7"}


def test_fixture_matches_shipped_file():
    from importlib import resources

    s = walkthrough_fixture()
    shipped = resources.files("vcsched").joinpath("data/walkthrough.scn").read_text("utf-8")
    assert scenario_to_text(s) == shipped


def test_fixture_file_loads(tmp_path):
    s = walkthrough_fixture()
    path = tmp_path / "walkthrough.scn"
    save(s, path)
    assert load(path) == s


def test_scenario_lookup_helpers():
    s = walkthrough_fixture()
    assert s.uav("u1").id == "u1"
    assert s.task_of("u2").owner == "u2"
    with pytest.raises(KeyError):
        s.uav("u9")
