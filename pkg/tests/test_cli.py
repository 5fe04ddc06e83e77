import json
import subprocess
import sys

import pytest

from replicadiv import serialize_population
from replicadiv.adversary import ExactComponent, FaultScenario, Vulnerability
from replicadiv.cli import main
from replicadiv.ingest import serialize_scenario

from conftest import SS, make_population


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def uniform8_file(tmp_path):
    p = tmp_path / "u8.json"
    p.write_text(serialize_population(make_population([1] * 8)))
    return p


@pytest.fixture
def pools_file(tmp_path, pool_csv):
    p = tmp_path / "pools.csv"
    p.write_text(pool_csv)
    return p


def test_entropy_uniform8(capsys, uniform8_file):
    code, out, _ = run(capsys, "entropy", "--input", str(uniform8_file), "--format", "population")
    assert code == 0
    assert out == "entropy_bits=3.000000000000 support=8 max=3.000000000000 kappa_optimal=true\n"


def test_entropy_example1_csv(capsys, pools_file):
    code, out, _ = run(capsys, "entropy", "--input", str(pools_file), "--format", "csv", "--csv")
    assert code == 0
    first, header, row = out.splitlines()
    assert first.startswith("entropy_bits=2.827497772360 support=18")
    assert first.endswith("kappa_optimal=false")
    assert header == "entropy_bits,support,max_entropy_bits,kappa_optimal"
    assert float(row.split(",")[0]) < 3.0


def test_entropy_operator_grouping(capsys, tmp_path):
    p = tmp_path / "p.json"
    p.write_text(serialize_population(make_population([25] * 4, operators=["a", "a", "b", "b"])))
    _, out, _ = run(capsys, "entropy", "--input", str(p), "--grouping", "operator")
    assert out.startswith("entropy_bits=1.000000000000 support=2")


def test_entropy_empty_file(capsys, tmp_path):
    p = tmp_path / "empty.json"
    p.write_text("")
    code, out, err = run(capsys, "entropy", "--input", str(p))
    assert code == 1 and out == "" and "error" in err


def test_entropy_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "entropy", "--input", str(tmp_path / "nope"))
    assert code == 1 and err


def test_figure1_rows(capsys, tmp_path, pools_file):
    out_path = tmp_path / "f1.csv"
    assert run(capsys, "figure1", "--pools", str(pools_file), "--x-max", "1000", "--out", str(out_path))[0] == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "x,total_miners,entropy_bits"
    assert len(lines) == 1001
    assert lines[101] .startswith("101,118,")
    assert all(float(line.split(",")[2]) < 3.0 for line in lines[1:])


def test_figure1_x1_matches_entropy(capsys, tmp_path, pools_file):
    out_path = tmp_path / "f1.csv"
    run(capsys, "figure1", "--pools", str(pools_file), "--x-max", "1", "--out", str(out_path))
    (row,) = out_path.read_text().splitlines()[1:]
    _, out, _ = run(capsys, "entropy", "--input", str(pools_file), "--format", "csv", "--csv")
    assert row.split(",")[2] == out.splitlines()[2].split(",")[0]


def test_figure1_deterministic_and_default_data(capsys, tmp_path, pools_file):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "figure1", "--pools", str(pools_file), "--x-max", "50", "--out", str(a))
    run(capsys, "figure1", "--x-max", "50", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_figure1_bad_input(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("name,share_percent\nA,x\n")
    assert run(capsys, "figure1", "--pools", str(bad), "--out", str(tmp_path / "o"))[0] == 1
    assert run(capsys, "figure1", "--x-max", "0", "--out", str(tmp_path / "o"))[0] == 1


def _scenario_file(tmp_path, *vulns):
    p = tmp_path / "scenario.json"
    p.write_text(serialize_scenario(FaultScenario(tuple(vulns))))
    return p


def test_check_empty_scenario(capsys, tmp_path, uniform8_file):
    s = _scenario_file(tmp_path)
    code, out, _ = run(capsys, "check", "--input", str(uniform8_file), "--f", "2", "--scenario", str(s))
    assert code == 0 and "safe=true" in out


def test_check_violation(capsys, tmp_path):
    pop = tmp_path / "p.json"
    pop.write_text(serialize_population(make_population([5, 1, 1], configs=["big", "a", "b"])))
    s = _scenario_file(tmp_path, Vulnerability("v", ExactComponent(SS, "big", "1")))
    code, out, _ = run(capsys, "check", "--input", str(pop), "--f", "4", "--scenario", str(s))
    assert code == 2 and "safe=false" in out


def test_check_overlap_shows_paper_literal(capsys, tmp_path):
    pop = tmp_path / "p.json"
    pop.write_text(serialize_population(make_population([30, 70])))
    doc = {"vulnerabilities": [
        {"id": "v1", "target": {"kind": "exact_component", "category": "system_software", "id": "c0", "version": "1"}},
        {"id": "v2", "target": {"kind": "any_version", "category": "system_software", "id": "c0"}},
    ]}
    s = tmp_path / "s.json"
    s.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "check", "--input", str(pop), "--f", "40", "--scenario", str(s))
    assert code == 0
    assert "union_affected=30" in out and "sum_affected=60 (paper-literal) paper_condition=false" in out


def test_check_parse_error(capsys, tmp_path, uniform8_file):
    s = tmp_path / "s.json"
    s.write_text("{not json")
    assert run(capsys, "check", "--input", str(uniform8_file), "--f", "1", "--scenario", str(s))[0] == 1


def _model_file(tmp_path, probs):
    p = tmp_path / "model.json"
    comps = [{"category": "system_software", "id": f"c{i}", "version": "1", "probability": pr}
             for i, pr in enumerate(probs)]
    p.write_text(json.dumps({"components": comps}))
    return p


def test_simulate_all_zero(capsys, tmp_path, uniform8_file):
    m = _model_file(tmp_path, [0] * 8)
    code, out, _ = run(capsys, "simulate", "--input", str(uniform8_file), "--model", str(m),
                       "--f", "2", "--trials", "1000", "--seed", "1")
    assert code == 0 and out.startswith("p_violation=0.000000")


def test_simulate_deterministic(capsys, tmp_path, uniform8_file):
    m = _model_file(tmp_path, ["1/3"] * 8)
    args = ["simulate", "--input", str(uniform8_file), "--model", str(m), "--f", "2", "--trials", "10000", "--seed", "42"]
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    _, c, _ = run(capsys, *args, "--workers", "3")
    assert a == b == c


def test_prop3_kappa4_row(capsys, tmp_path):
    out = tmp_path / "t.csv"
    assert run(capsys, "prop3", "--kappa-max", "4", "--omega-max", "4", "--alpha", "1/2", "--out", str(out))[0] == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "kappa,omega,min_corruptions"
    row4 = [int(l.split(",")[2]) for l in lines[1:] if l.startswith("4,")]
    assert row4 == [3, 5, 7, 9]


def test_prop3_alpha_one(capsys, tmp_path):
    out = tmp_path / "t.csv"
    run(capsys, "prop3", "--kappa-max", "3", "--omega-max", "3", "--alpha", "1", "--out", str(out))
    assert all(l.endswith(",unbreakable") for l in out.read_text().splitlines()[1:])


def test_prop3_divisibility_error(capsys, tmp_path):
    code, _, err = run(capsys, "prop3", "--kappa-max", "3", "--omega-max", "2", "--total-power", "7",
                       "--out", str(tmp_path / "t.csv"))
    assert code == 1 and "divisible" in err


def test_registry_commands(capsys, tmp_path):
    state = tmp_path / "state"
    record = {"epoch": 0, "replica": {"id": "r1", "operator": "o1", "power_units": 3, "configuration": {
        "components": [{"category": "system_software", "id": "linux", "version": "6.1"}]}}}
    rfile = tmp_path / "rec.json"
    second = json.loads(json.dumps(record))
    second["replica"]["id"] = "r2"
    second["replica"]["configuration"]["components"][0]["id"] = "bsd"
    rfile.write_text(json.dumps([record, second]))
    assert run(capsys, "registry", "--state", str(state), "register", "--record", str(rfile))[0] == 0
    code, out, _ = run(capsys, "registry", "--state", str(state), "snapshot", "--epoch", "0")
    assert code == 0 and [r["id"] for r in json.loads(out)["replicas"]] == ["r1", "r2"]
    record["replica"]["configuration"]["components"][0]["version"] = "6.2"
    rfile.write_text(json.dumps(record))
    code, _, err = run(capsys, "registry", "--state", str(state), "register", "--record", str(rfile))
    assert code == 1 and "already registered" in err
    code, out, _ = run(capsys, "registry", "--state", str(state), "anonymize", "--epoch", "0", "--min-share", "1")
    assert code == 0 and "OTHER,1," in out


def test_stdin_and_module_entry(uniform8_file):
    proc = subprocess.run(
        [sys.executable, "-m", "replicadiv", "entropy", "--input", "-"],
        input=uniform8_file.read_text(), capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "kappa_optimal=true" in proc.stdout
