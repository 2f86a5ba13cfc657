import json

from cwlab.cli import main, parse_range


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


def csv_rows(path):
    return [l.split(",") for l in path.read_text().splitlines() if not l.startswith("#")]


def test_parse_range():
    assert parse_range("1..4") == [1, 2, 3, 4]
    assert parse_range("3,5") == [3, 5]
    assert parse_range([2, "3"]) == [2, 3]


def test_count_table(tmp_path):
    code, out = run(tmp_path, "count", "--n-range", "1..5", "--verify")
    assert code == 0
    text = out.read_text()
    assert text.startswith("# cwlab ") and "config_sha256=" in text.splitlines()[0]
    rows = csv_rows(out)
    assert rows[0] == ["n", "per", "per_antipodal", "per_sphere", "verified"]
    table = [tuple(int(v) for v in r[:4]) for r in rows[1:]]
    assert table == [(1, 1, 5, 3), (2, 5, 9, 7), (3, 16, 20, 18), (4, 45, 49, 47), (5, 121, 125, 123)]
    assert all(r[4] == "True" for r in rows[1:])


def test_unknown_command_is_usage_error(capsys):
    assert main(["frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err


def test_missing_command_is_usage_error(capsys):
    assert main([]) == 2
    assert "usage" in capsys.readouterr().err


def test_runtime_failure_leaves_no_file(tmp_path, capsys):
    # this generated pseudo-orbit cannot close up, which is a runtime failure
    code, out = run(tmp_path, "shadow", "--n", "5", "--delta", "1/1000", "--x0", "1/7 2/7", "--seed", "2")
    assert code == 1 and not out.exists()
    assert "failed" in capsys.readouterr().err
    assert list(tmp_path.iterdir()) == []


def test_randomised_commands_need_seed(tmp_path):
    code, out = run(tmp_path, "shadow", "--n", "5", "--delta", "1/1000")
    assert code == 2 and not out.exists()


def test_shadow_true_orbit(tmp_path):
    code, out = run(tmp_path, "shadow", "--n", "3", "--delta", "0", "--x0", "1/2 0", "--seed", "0")
    assert code == 0
    data = json.loads(out.read_text())
    assert data["result"]["epsilon"] in ("0", 0)
    assert "config_sha256" in data["provenance"]


def test_shadow_from_file(tmp_path):
    src = tmp_path / "po.txt"
    src.write_text("torus 2 periodic\n2/5 4/5\n3/5 1/5\n")
    code, out = run(tmp_path, "shadow", "--input", str(src))
    assert code == 0 and json.loads(out.read_text())["result"]["epsilon"] in ("0", 0)


def test_config_defaults_and_hash(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "count", "n-range": "1..3"}))
    code_a, a = run(tmp_path, "count", "--config", str(cfg), name="a.csv")
    code_b, b = run(tmp_path, "count", "--n-range", "1..3", name="b.csv")
    assert code_a == code_b == 0
    assert len(csv_rows(a)) == 4
    # the config file is a source of defaults, so both runs share one configuration
    assert a.read_text() == b.read_text()


def test_bad_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["count", "--config", str(cfg)]) == 2
    cfg.write_text(json.dumps({"command": "measure"}))
    assert main(["count", "--config", str(cfg)]) == 2


def test_bit_identical_reruns(tmp_path):
    argv = ["homogeneity", "--r", "7", "--n-range", "2..3", "--centers", "8", "--seed", "3"]
    _, a = run(tmp_path, *argv, name="a.csv")
    _, b = run(tmp_path, *argv, name="b.csv")
    assert a.read_bytes() == b.read_bytes()


def test_measure_report(tmp_path):
    code, out = run(tmp_path, "measure", "--n-range", "5..6", "--K", "3")
    data = json.loads(out.read_text())
    assert code == 0 and data["discrepancy"]["5"]["discrepancy"] == "0"


def test_measure_atoms(tmp_path):
    code, out = run(tmp_path, "measure", "--n", "2", "--space", "sphere", "--atoms")
    assert code == 0 and len(csv_rows(out)) == 1 + 7


def test_entropy_tasks(tmp_path):
    code, out = run(tmp_path, "entropy", "--task", "growth", "--n-range", "1..10", name="g.csv")
    rows = csv_rows(out)
    assert code == 0 and rows[10][1] == "15127" and rows[10][3:] == ["True", "True"]
    code, out = run(tmp_path, "entropy", "--task", "separation", "--n-range", "1..4", "--delta", "1/5", name="s.csv")
    assert code == 0 and all(r[2] == "0" for r in csv_rows(out)[1:])


def test_carpet_table_and_validation(tmp_path):
    code, out = run(tmp_path, "carpet", "--periods", "3,4", "--n-range", "12", name="c.csv")
    rows = csv_rows(out)
    assert code == 0 and rows[1][:4] == ["12", "103682", "103703", "103703"]
    reg = tmp_path / "reg.txt"
    reg.write_text("0 0\n")
    code, out = run(tmp_path, "carpet", "--registry", str(reg), "--validate", name="v.json")
    assert code == 1 and not out.exists()


def test_spec_command(tmp_path):
    code, out = run(tmp_path, "spec", "--point", "0 0", "--length", "5", "--point", "2/5 4/5", "--length", "4")
    data = json.loads(out.read_text())
    assert code == 0 and data["result"]["period"] == 31
