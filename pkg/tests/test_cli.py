import json
import subprocess
import sys

import numpy as np
import pytest

from catgini import LabeledDataset, write_csv
from catgini.cli import main


@pytest.fixture
def hand_csv(tmp_path):
    path = tmp_path / "hand.csv"
    path.write_text("z,x,y\na,0,0\na,0,1\nb,1,0\nb,1,1\n")
    return path


@pytest.fixture
def sim_csv(tmp_path):
    gen = np.random.default_rng(0)
    labels = np.repeat(["u", "v", "w"], 30)
    shift = np.repeat([0.0, 1.0, 2.0], 30)[:, None]
    x = gen.normal(size=(90, 2)) + shift
    noise = gen.normal(size=(90, 2))
    path = tmp_path / "sim.csv"
    write_csv(LabeledDataset(np.hstack([x, noise, x[:, :1]]), labels), path,
              feature_names=["x1", "x2", "n1", "n2", "copy"], label_name="z")
    return path


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_compare_hand_bootstrap(hand_csv, capsys):
    code, out, _ = run(["compare", hand_csv, "--label", "z", "--x", "x", "--y", "y",
                        "--method", "bootstrap", "--B", "100", "--seed", "0", "--json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["d_n"] == 1.5
    assert round(doc["p_value"] * 100) == pytest.approx(doc["p_value"] * 100, abs=1e-9)


def test_compare_text_has_hypothesis(sim_csv, capsys):
    code, out, _ = run(["compare", sim_csv, "--label", "z", "--x", "x1,x2", "--y", "n1,n2"],
                       capsys)
    assert code == 0
    assert out.startswith("H0: rho_g(X,Z) = rho_g(Y,Z)  vs  H1: rho_g(X,Z) > rho_g(Y,Z)")
    assert "reject H0" in out and "distance correlation" in out


def test_compare_swap(sim_csv, capsys):
    args = ["compare", sim_csv, "--label", "z", "--x", "x1,x2", "--y", "n1,n2", "--json"]
    _, a, _ = run(args, capsys)
    _, b, _ = run(args + ["--swap"], capsys)
    assert json.loads(a)["d_n"] == -json.loads(b)["d_n"]
    assert json.loads(a)["reject"] and not json.loads(b)["reject"]


def test_compare_identical_columns_exit_3(sim_csv, capsys):
    code, _, err = run(["compare", sim_csv, "--label", "z", "--x", "x1", "--y", "copy"],
                       capsys)
    assert code == 3
    assert "degenerate" in err


def test_missing_label_column_exit_2(hand_csv, capsys):
    code, _, err = run(["compare", hand_csv, "--label", "klass", "--x", "x", "--y", "y"],
                       capsys)
    assert code == 2
    assert "klass" in err


def test_bad_flag_exit_2(hand_csv, capsys):
    with pytest.raises(SystemExit) as info:
        main(["compare", str(hand_csv), "--label", "z", "--bogus"])
    assert info.value.code == 2


def test_added_value(sim_csv, capsys):
    code, out, _ = run(["added-value", sim_csv, "--label", "z", "--x", "x1,x2",
                        "--y", "n1,n2", "--json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["p_value"] > 0.5
    assert doc["hypothesis"].startswith("H0: rho_g(W,Z) = rho_g(X,Z)")
    code, out, _ = run(["added-value", sim_csv, "--label", "z", "--x", "n1,n2",
                        "--y", "x1,x2", "--json"], capsys)
    assert code == 0 and json.loads(out)["p_value"] < 0.01


def test_added_value_malformed_y(sim_csv, capsys):
    code, _, _ = run(["added-value", sim_csv, "--label", "z", "--x", "x1",
                      "--y", "nope"], capsys)
    assert code == 2


def test_independence_separated(tmp_path, capsys):
    path = tmp_path / "sep.csv"
    path.write_text("z,f\na,0\na,0\na,0\nb,10\nb,10\nb,10\n")
    code, out, _ = run(["independence", path, "--label", "z", "--R", "199", "--json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["rho_hat"] == 1.0
    # 1 + number of permutations keeping both groups intact, over R + 1
    assert doc["p_value"] * 200 == pytest.approx(round(doc["p_value"] * 200))
    assert doc["p_value"] < 0.2
    code, out, _ = run(["independence", path, "--label", "z", "--R", "1", "--json"], capsys)
    assert json.loads(out)["p_value"] in (0.5, 1.0)


def test_independence_small_class_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("z,f\na,0\na,1\nb,2\n")
    code, _, err = run(["independence", path, "--label", "z"], capsys)
    assert code == 2 and "class size below 2" in err


def test_simulate_rows(capsys):
    code, out, _ = run(["simulate", "--design", "ex1a", "--p", "1", "--q", "1",
                        "--n", "40,40,40", "--beta-grid", "0:1:0.2", "--methods", "asN",
                        "--R", "200"], capsys)
    assert code == 0
    body = [l for l in out.splitlines() if not l.startswith("#")]
    assert body[0] == "beta,method,rejection_rate,mean_dn,mc_se,time"
    assert len(body) == 7
    assert "# replications = 200" in out


def test_simulate_plan_file(tmp_path, capsys):
    plan = tmp_path / "plan.toml"
    plan.write_text('design = "ex2b"\nbeta_grid = [0.0]\nreplications = 5\n'
                    'methods = ["asN"]\n')
    out_path = tmp_path / "rep.json"
    code, out, _ = run(["simulate", "--plan", plan, "--out", out_path, "--format", "json"],
                       capsys)
    assert code == 0 and out == ""
    doc = json.loads(out_path.read_text())
    assert doc["plan"]["design"] == "ex2b" and len(doc["rows"]) == 1


def test_simulate_invalid_design(capsys):
    code, _, err = run(["simulate", "--design", "ex7"], capsys)
    assert code == 2
    assert "ex1a" in err and "ex3" in err


def test_simulate_bad_plan_exit_2(tmp_path, capsys):
    plan = tmp_path / "plan.toml"
    plan.write_text("replications = = 3\n")
    assert run(["simulate", "--plan", plan], capsys)[0] == 2


def test_simulate_abort_exit_4(capsys, monkeypatch):
    import catgini.harness as h

    def broken(cfg, rng):
        from catgini import DegeneratePredictorError
        raise DegeneratePredictorError("forced", side="X")

    monkeypatch.setattr(h, "gen_scenario", broken)
    code, _, err = run(["simulate", "--R", "3", "--beta-grid", "0"], capsys)
    assert code == 4 and "replicate 0" in err


def test_module_entry_point(hand_csv):
    proc = subprocess.run([sys.executable, "-m", "catgini", "compare", str(hand_csv),
                           "--label", "z", "--x", "x", "--y", "y"],
                          capture_output=True, text=True)
    # asN needs at least 3 rows per class
    assert proc.returncode == 2
    assert "3" in proc.stderr
