"""Command-line behavior: outputs, exit codes, manifests, determinism."""

import csv
import json

import pytest

from vcsched.cli import main
from vcsched.scenario import load, save, walkthrough_fixture


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def drop_columns(rows, names):
    header = rows[0]
    keep = [i for i, name in enumerate(header) if name not in names]
    return [[row[i] for i in keep] for row in rows]


GEN_ARGS = [
    "generate", "--seed", "5", "--sp-count", "6", "--vm-total", "8",
    "--uav-count", "1", "--tasks", "star-4", "--v2v-radius", "450",
    "--uav-radius", "700",
]


def test_generate_writes_scenario_and_manifest(tmp_path):
    out = tmp_path / "a.scn"
    assert main(GEN_ARGS + ["--out", str(out)]) == 0
    scenario = load(out)
    assert sum(sp.vm_count for sp in scenario.vc.sps) == 8
    manifest = json.loads((tmp_path / "a.scn.manifest.json").read_text())
    assert manifest["command"] == "generate"
    assert manifest["seeds"] == {"seed": 5}
    assert "timestamp" in manifest and "version" in manifest


def test_generate_deterministic(tmp_path):
    a, b = tmp_path / "a.scn", tmp_path / "b.scn"
    assert main(GEN_ARGS + ["--out", str(a)]) == 0
    assert main(GEN_ARGS + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_generate_bad_spec_exits_2(tmp_path):
    code = main(GEN_ARGS + ["--out", str(tmp_path / "x.scn"), "--vc-edges", "99"])
    assert code == 2


def test_search_proposed_equals_exhaustive(tmp_path):
    scn = tmp_path / "a.scn"
    main(GEN_ARGS + ["--out", str(scn)])
    assert main(["search", str(scn), "--method", "proposed", "--out", str(tmp_path / "p")]) == 0
    assert main(["search", str(scn), "--method", "esa", "--out", str(tmp_path / "e")]) == 0
    assert (tmp_path / "p.templates.txt").read_bytes() == (tmp_path / "e.templates.txt").read_bytes()
    stats = read_csv(tmp_path / "p.stats.csv")
    assert stats[0] == ["method", "templates_count", "wall_time_s"]


def test_search_random_is_subset(tmp_path):
    scn = tmp_path / "a.scn"
    main(GEN_ARGS + ["--out", str(scn)])
    main(["search", str(scn), "--method", "proposed", "--out", str(tmp_path / "p")])
    assert main(["search", str(scn), "--method", "rsa", "--iters", "3000",
                 "--seed", "2", "--out", str(tmp_path / "r")]) == 0
    full = set((tmp_path / "p.templates.txt").read_text().splitlines())
    found = set((tmp_path / "r.templates.txt").read_text().splitlines())
    assert found <= full
    count = int(read_csv(tmp_path / "r.stats.csv")[1][1])
    assert count == len(found) <= len(full)


def test_search_empty_vms_counts_zero(tmp_path):
    import dataclasses

    s = walkthrough_fixture()
    drained = dataclasses.replace(
        s,
        vc=dataclasses.replace(
            s.vc,
            sps=tuple(dataclasses.replace(sp, vm_count=0) for sp in s.vc.sps),
        ),
    )
    scn = tmp_path / "empty.scn"
    save(drained, scn)
    assert main(["search", str(scn), "--out", str(tmp_path / "z")]) == 0
    assert int(read_csv(tmp_path / "z.stats.csv")[1][1]) == 0
    assert (tmp_path / "z.templates.txt").read_text() == ""


def test_schedule_outputs_and_recompute(tmp_path):
    scn = tmp_path / "a.scn"
    main(GEN_ARGS + ["--out", str(scn)])
    assert main(["schedule", str(scn), "--out", str(tmp_path / "run")]) == 0
    summary = read_csv(tmp_path / "run.summary.csv")
    assert summary[0][0] == "method"
    row = dict(zip(summary[0], summary[1]))
    total = float(row["objective"])
    recomposed = (
        float(row["time_term"]) / 3 + float(row["energy_term"]) / 3
        + float(row["exchange_term"]) / 3
    )
    assert total == pytest.approx(recomposed, rel=1e-10)
    template_line = (tmp_path / "run.template.txt").read_text().strip()
    assert template_line  # canonical chosen template present
    scores = read_csv(tmp_path / "run.scores.csv")
    assert scores[0] == ["template_id", "p", "feasible", "objective", "failure_reason", "template"]
    assert int(row["templates_total"]) == len(scores) - 1


def test_schedule_psweep_written_for_multiple_p(tmp_path):
    scn = tmp_path / "a.scn"
    main(GEN_ARGS + ["--out", str(scn)])
    assert main(["schedule", str(scn), "--p", "1,3", "--out", str(tmp_path / "pp")]) == 0
    sweep = read_csv(tmp_path / "pp.psweep.csv")
    assert sweep[0] == ["template_id", "p", "objective"]
    p_values = {row[1] for row in sweep[1:]}
    assert p_values == {"1", "3"}


def test_schedule_infeasible_baseline_exits_1(tmp_path):
    import dataclasses

    s = walkthrough_fixture()
    # rate-coupled pairs get a positive but hair-thin gap bound: the convex
    # stage can thread it, the even split cannot
    tight = dataclasses.replace(s, config=dataclasses.replace(s.config, alpha1=0.98905))
    scn = tmp_path / "tight.scn"
    save(tight, scn)
    code = main(["schedule", str(scn), "--method", "ua", "--limit", "40",
                 "--out", str(tmp_path / "ua")])
    assert code == 1
    scores = read_csv(tmp_path / "ua.scores.csv")
    assert all(row[2] == "0" for row in scores[1:])
    assert all("BaselineInfeasible" in row[4] for row in scores[1:])
    ok = main(["schedule", str(scn), "--method", "proposed", "--limit", "40",
               "--out", str(tmp_path / "prop")])
    assert ok == 0


def test_schedule_rerun_identical_except_walltime(tmp_path):
    scn = tmp_path / "a.scn"
    main(GEN_ARGS + ["--out", str(scn)])
    for name in ("r1", "r2"):
        assert main(["schedule", str(scn), "--p", "1,3", "--out", str(tmp_path / name)]) == 0
    s1 = drop_columns(read_csv(tmp_path / "r1.summary.csv"), {"wall_time_s"})
    s2 = drop_columns(read_csv(tmp_path / "r2.summary.csv"), {"wall_time_s"})
    assert s1 == s2
    assert (tmp_path / "r1.scores.csv").read_bytes() == (tmp_path / "r2.scores.csv").read_bytes()
    assert (tmp_path / "r1.template.txt").read_bytes() == (tmp_path / "r2.template.txt").read_bytes()


def test_bench_sweep_shape_and_determinism(tmp_path):
    sweep = {
        "axes": [{"name": "sp_count", "values": [5, 6]}],
        "base": {
            "sp_count": 5, "vm_total": 6, "uav_count": 1,
            "task_shapes": ["tri-3"], "v2v_radius": 450.0, "uav_radius": 700.0,
        },
        "seeds": [1, 2],
        "methods": ["proposed", "ua"],
        "limit": 30,
    }
    sweep_path = tmp_path / "sweep.json"
    sweep_path.write_text(json.dumps(sweep), encoding="utf-8")
    assert main(["bench", str(sweep_path), "--out", str(tmp_path / "b1")]) == 0
    rows = read_csv(tmp_path / "b1" / "sp_count.csv")
    assert rows[0] == ["axis", "axis_value", "method", "templates_count", "objective", "wall_time_s"]
    assert len(rows) == 1 + 2 * 2  # two axis values x two methods
    assert main(["bench", str(sweep_path), "--out", str(tmp_path / "b2")]) == 0
    r1 = drop_columns(read_csv(tmp_path / "b1" / "sp_count.csv"), {"wall_time_s"})
    r2 = drop_columns(read_csv(tmp_path / "b2" / "sp_count.csv"), {"wall_time_s"})
    assert r1 == r2


def test_env_config_sets_defaults(tmp_path, monkeypatch):
    cfg = tmp_path / "defaults.json"
    cfg.write_text(json.dumps({"p": "1,3"}), encoding="utf-8")
    monkeypatch.setenv("VCSCHED_CONFIG", str(cfg))
    scn = tmp_path / "a.scn"
    main(GEN_ARGS + ["--out", str(scn)])
    assert main(["schedule", str(scn), "--out", str(tmp_path / "envrun")]) == 0
    assert (tmp_path / "envrun.psweep.csv").exists()  # multi-p default applied


def test_missing_scenario_exits_2(tmp_path):
    assert main(["search", str(tmp_path / "nope.scn"), "--out", str(tmp_path / "x")]) == 2
