import csv
import json

import pytest

from posiplant.cli import main
from posiplant.formats import read_instance
from posiplant.model import Qubo

WORKED_SEED = 42485


def run(*args):
    return main([str(a) for a in args])


def test_graph_counts(tmp_path, capsys):
    assert run("graph", "chimera", "16", "-o", tmp_path / "c.edges") == 0
    assert "nodes=2048" in capsys.readouterr().out
    assert run("graph", "complete", "3", "-o", tmp_path / "k.edges") == 0
    assert "edges=3" in capsys.readouterr().out
    assert run("graph", "zephyr", "4", "--defect-nodes", "13", "-o", tmp_path / "z.edges") == 0
    assert "active=563" in capsys.readouterr().out


def test_graph_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        run("graph", "hexagon", "3")
    assert exc.value.code == 2
    assert run("graph", "random", "5") == 2


def test_worked_example(tmp_path):
    assert run("plant", "-n", 3, "--planted", "101", "--seed", WORKED_SEED, "--out-dir", tmp_path) == 0
    inst, _ = read_instance(tmp_path / "instance_0000.json")
    assert inst.qubo == Qubo.from_terms(3, {1: 1, 2: 1}, {(0, 2): -2})
    assert inst.offset == 1
    assert run("verify", tmp_path / "instance_0000.json") == 0


def test_single_variable(tmp_path):
    assert run("plant", "-n", 1, "--planted", "0", "--out-dir", tmp_path) == 0
    inst, _ = read_instance(tmp_path / "instance_0000.json")
    assert inst.clause_count == 1 and not inst.qubo.quadratic
    assert run("verify", tmp_path / "instance_0000.json") == 0


def test_corrupted_instance_fails(tmp_path, capsys):
    run("plant", "-n", 3, "--planted", "101", "--seed", WORKED_SEED, "--out-dir", tmp_path)
    path = tmp_path / "instance_0000.json"
    d = json.loads(path.read_text())
    d["linear"]["2"] = -d["linear"]["2"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d))
    capsys.readouterr()
    assert run("verify", bad) == 1
    out = capsys.readouterr().out
    assert "energy: FAIL" in out and "recorded planted_energy = -1" in out


def test_large_instance_certified_by_construction(tmp_path, capsys):
    run("plant", "-n", 30, "--seed", 1, "--out-dir", tmp_path)
    capsys.readouterr()
    assert run("verify", tmp_path / "instance_0000.json") == 0
    out = capsys.readouterr().out
    assert "uniqueness: certified-by-construction" in out and "2sat-certificate: PASS" in out


def test_plant_graph_batch_then_verify(tmp_path):
    edges = tmp_path / "c2.edges"
    run("graph", "chimera", "2", "-o", edges)
    assert run("plant", "--graph", edges, "--count", 5, "--seed", 7, "--out-dir", tmp_path / "out") == 0
    files = sorted((tmp_path / "out").glob("instance_0*.json"))
    assert len(files) == 5
    assert run("verify", *files) == 0
    manifest = json.loads((tmp_path / "out" / "instance_manifest.json").read_text())
    assert manifest["files"] == [f.name for f in files] and manifest["master_seed"] == 7


def test_plant_defective_graph_needs_compact(tmp_path):
    edges = tmp_path / "z.edges"
    run("graph", "zephyr", "1", "--defect-nodes", "2", "-o", edges)
    assert run("plant", "--graph", edges, "--out-dir", tmp_path) == 2
    assert run("plant", "--graph", edges, "--compact", "--out-dir", tmp_path) == 0
    _, raw = read_instance(tmp_path / "instance_0000.json")
    assert len(raw["active_nodes"]) == 46


def test_plant_sparse_failure_exit_code(tmp_path):
    path = tmp_path / "p.edges"
    path.write_text("n 4\n0 1\n1 2\n2 3\n")
    assert run("plant", "--graph", path, "--max-clauses", 1, "-B", 1, "--out-dir", tmp_path) == 1


def test_plant_usage_errors(tmp_path):
    assert run("plant", "--out-dir", tmp_path) == 2
    assert run("plant", "-n", 3, "--planted", "10", "--out-dir", tmp_path) == 2
    assert run("plant", "-n", 3, "--planted", "1x1", "--out-dir", tmp_path) == 2


@pytest.fixture
def instance12(tmp_path):
    run("plant", "-n", 12, "--seed", 3, "--out-dir", tmp_path)
    return tmp_path / "instance_0000.json"


def test_solve_and_eval(instance12, tmp_path, capsys):
    inst, _ = read_instance(instance12)
    assert run("solve", instance12, "sa", "--reads", 800, "--sweeps", 100) == 0
    rows = list(csv.DictReader((tmp_path / "instance_0000.sa.csv").open()))
    assert len(rows) == 800
    assert run("solve", instance12, "greedy", "--reads", 100) == 0
    greedy = json.loads((tmp_path / "instance_0000.greedy.json").read_text())
    assert len(greedy["records"]) == 100
    assert all(e >= inst.planted_energy for _, e, _ in greedy["records"])
    assert run("solve", instance12, "exhaustive") == 0
    ex = json.loads((tmp_path / "instance_0000.exhaustive.json").read_text())
    assert [r[1] for r in ex["records"]] == [inst.planted_energy]
    capsys.readouterr()
    out = tmp_path / "report.csv"
    sets = [tmp_path / f"instance_0000.{s}.json" for s in ("sa", "greedy", "exhaustive")]
    assert run("eval", *sets, "-o", out) == 0
    report = list(csv.DictReader(out.open()))
    assert [r["sampler"] for r in report] == ["exhaustive", "greedy", "sa"]
    sa_rows = list(csv.DictReader((tmp_path / "instance_0000.sa.csv").open()))
    hits = sum(float(r["energy"]) == inst.planted_energy for r in sa_rows)
    assert float(report[2]["p"]) == hits / 800
    exh = report[0]
    assert float(exh["tts_99"]) == float(exh["total_time_s"]) / int(exh["A"])


def test_eval_zero_gsp_has_empty_tts(instance12, tmp_path):
    run("solve", instance12, "sa", "--reads", 5, "--sweeps", 1, "--beta-min", 0.001, "--beta-max", 0.002)
    path = tmp_path / "instance_0000.sa.json"
    d = json.loads(path.read_text())
    for r in d["records"]:
        r[1] = d["ground_energy"] + 1
    path.write_text(json.dumps(d))
    out = tmp_path / "r.csv"
    assert run("eval", path, "-o", out) == 0
    row = next(csv.DictReader(out.open()))
    assert row["p"] == "0.0" and row["tts_99"] == ""


def test_eval_missing_ground_energy(instance12, tmp_path):
    run("solve", instance12, "greedy", "--reads", 3)
    path = tmp_path / "instance_0000.greedy.json"
    d = json.loads(path.read_text())
    d["ground_energy"] = None
    path.write_text(json.dumps(d))
    assert run("eval", path) == 2


def test_solve_exhaustive_cap(instance12):
    assert run("solve", instance12, "exhaustive", "--exhaustive-cap", 10) == 2


def test_nominal_clock_is_deterministic(instance12, tmp_path):
    outputs = []
    for k in range(2):
        stem = tmp_path / f"run{k}"
        run("solve", instance12, "sa", "--reads", 20, "--sweeps", 50, "--seed", 4, "--clock", "nominal", "-o", stem)
        run("eval", f"{stem}.json", "-o", tmp_path / f"rep{k}.csv")
        outputs.append([(tmp_path / f"run{k}.json").read_bytes(), (tmp_path / f"run{k}.csv").read_bytes(),
                        (tmp_path / f"rep{k}.csv").read_bytes()])
    assert outputs[0] == outputs[1]


def test_stats_and_dimacs(tmp_path, capsys):
    run("plant", "-n", 3, "--planted", "101", "--seed", WORKED_SEED, "--out-dir", tmp_path)
    capsys.readouterr()
    assert run("stats", tmp_path / "instance_0000.json") == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[1:] == [["instance_0000", "linear", "1", "2"], ["instance_0000", "quadratic", "-2", "1"]]
    assert run("dimacs", tmp_path / "instance_0000.json", "-o", tmp_path / "f.cnf") == 0
    assert (tmp_path / "f.cnf").read_text().startswith("p cnf 3 6\n")


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "posiplant", "graph", "complete", "4", "-o", tmp_path / "k.edges"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "edges=6" in out.stdout
