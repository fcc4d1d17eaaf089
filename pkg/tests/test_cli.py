import json

import numpy as np
import pytest

from clusterhop.cli import main

from conftest import toy_doc


def _write(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def _run(args):
    return main([str(a) for a in args])


def test_validate_ok(tmp_path, toy_file, capsys):
    assert _run(["validate", "--scenario", toy_file]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["n_beams"] == 8
    assert out["n_clusters"] == 4


def test_missing_file_is_io_error(tmp_path, capsys):
    rc = _run(["validate", "--scenario", tmp_path / "absent.json"])
    assert rc == 5
    assert "error: io:" in capsys.readouterr().err


def test_malformed_json_is_parse_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{oops")
    rc = _run(["validate", "--scenario", path])
    assert rc == 2
    assert "error: parse:" in capsys.readouterr().err


def test_invalid_scenario_is_validate_error(tmp_path, capsys):
    doc = toy_doc()
    doc["clusters"][1] = [2, 3]
    rc = _run(["validate", "--scenario", _write(tmp_path, doc)])
    assert rc == 2
    assert "error: validate:" in capsys.readouterr().err


def test_infeasible_exit_code(tmp_path, capsys):
    doc = toy_doc(adjacency="complete")
    rc = _run(["plan", "--scenario", _write(tmp_path, doc),
               "--out", tmp_path / "out"])
    assert rc == 3
    assert "error: infeasible:" in capsys.readouterr().err


def test_cap_exceeded_exit_code(tmp_path, capsys):
    beams = [{"id": i + 1, "u": float(3 * i), "v": 0.0, "demand_bps": 1e8}
             for i in range(40)]
    doc = toy_doc()
    doc["beams"] = beams
    doc["clusters"] = [[i + 1] for i in range(40)]
    del doc["adjacency"]
    doc["system"]["N_P"] = 20
    rc = _run(["snapshots", "--scenario", _write(tmp_path, doc),
               "--out", tmp_path / "out"])
    assert rc == 4
    assert "error: cap-exceeded:" in capsys.readouterr().err


def test_plan_outputs(tmp_path, toy_file, capsys):
    out = tmp_path / "out"
    assert _run(["plan", "--scenario", toy_file, "--out", out]) == 0
    plan = json.loads((out / "plan.json").read_text())
    assert sum(plan["psi"].values()) == 8
    assert len(plan["schedule"]) == 8
    assert plan["status"] == "optimal"
    for key, members in plan["selected_snapshots"].items():
        assert key in plan["psi"]
        assert len(members) == 2
    config = json.loads((out / "run_config.json").read_text())
    assert config["solver"] == "ilp"
    assert "plan.json" in config["files"]


def test_plan_solver_choices(tmp_path, toy_file):
    for solver, status in [("greedy", "heuristic"), ("oracle", "optimal")]:
        out = tmp_path / f"out_{solver}"
        assert _run(["plan", "--scenario", toy_file, "--out", out,
                     "--solver", solver]) == 0
        plan = json.loads((out / "plan.json").read_text())
        assert plan["status"] == status


def test_compare_outputs(tmp_path, toy_file):
    out = tmp_path / "cmp"
    assert _run(["compare", "--scenario", toy_file, "--out", out]) == 0
    for scheme in ("ch", "4c_fr", "1c_ffr_bh"):
        beams = (out / f"report_beams_{scheme}.csv").read_text().splitlines()
        assert beams[0] == "beam_id,demand_bps,offered_bps,scheme"
        assert len(beams) == 9
        clusters = (out / f"report_clusters_{scheme}.csv").read_text().splitlines()
        assert len(clusters) == 5
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary) == {"ch", "4c_fr", "1c_ffr_bh"}


def test_capacity_outputs(tmp_path, toy_file):
    out = tmp_path / "cap"
    assert _run(["capacity", "--scenario", toy_file, "--out", out]) == 0
    beams = (out / "capacity_beams.csv").read_text().splitlines()
    assert len(beams) == 9
    clusters = (out / "capacity_clusters.csv").read_text().splitlines()
    assert len(clusters) == 5


def test_snapshots_output(tmp_path, toy_file):
    out = tmp_path / "snaps"
    assert _run(["snapshots", "--scenario", toy_file, "--out", out]) == 0
    lines = (out / "snapshots.csv").read_text().splitlines()
    # path adjacency on 4 clusters with N_P=2 gives 3 snapshots
    assert lines[0] == "s0,s1,s2"
    assert len(lines) == 5


def test_leakage_output(tmp_path, toy_file):
    out = tmp_path / "leak"
    assert _run(["leakage", "--scenario", toy_file, "--out", out]) == 0
    doc = json.loads((out / "leakage.json").read_text())
    assert len(doc["per_slot_worst_ratio"]) == 8
    assert doc["max_ratio"] >= 0


def test_byte_identical_reruns(tmp_path, toy_file):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out in (out_a, out_b):
        assert _run(["compare", "--scenario", toy_file, "--out", out]) == 0
    for name in sorted(p.name for p in out_a.iterdir()):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_seed_override_changes_nothing_but_seed(tmp_path, toy_file):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert _run(["capacity", "--scenario", toy_file, "--out", out_a]) == 0
    assert _run(["capacity", "--scenario", toy_file, "--out", out_b,
                 "--seed", "12345"]) == 0
    cfg_a = json.loads((out_a / "run_config.json").read_text())
    cfg_b = json.loads((out_b / "run_config.json").read_text())
    assert cfg_a["seed"] == 7
    assert cfg_b["seed"] == 12345


def test_plan_reference_window_budget(tmp_path, ref_doc):
    out = tmp_path / "ref_out"
    path = _write(tmp_path, ref_doc, "ref.json")
    assert _run(["plan", "--scenario", path, "--out", out]) == 0
    plan = json.loads((out / "plan.json").read_text())
    assert sum(plan["psi"].values()) == 256
    assert len(plan["schedule"]) == 256


def test_compare_scheme_subset(tmp_path, toy_file):
    from clusterhop.cli import RunManifest, run

    out = tmp_path / "subset"
    run(RunManifest(scenario_path=str(toy_file), out_dir=str(out),
                    command="compare", schemes=("4c_fr",)))
    assert (out / "report_beams_4c_fr.csv").exists()
    assert not (out / "report_beams_ch.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary) == {"4c_fr"}


def test_custom_dvbs2_table(tmp_path, toy_file):
    table = tmp_path / "table.csv"
    table.write_text("threshold_db,se_bits_per_symbol\n-100.0,1.5\n")
    out = tmp_path / "cap"
    assert _run(["capacity", "--scenario", toy_file, "--out", out,
                 "--dvbs2-table", table]) == 0
    lines = (out / "capacity_beams.csv").read_text().splitlines()[1:]
    ses = {float(line.split(",")[3]) for line in lines}
    assert ses == {1.5}
