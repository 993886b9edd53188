import csv
import json

import pytest

from antiplane.cli import main


def run(tmp_path, *args):
    return main(["--out", str(tmp_path), *args])


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_material_check(tmp_path):
    assert run(tmp_path, "material", "check") == 0
    rep = json.loads((tmp_path / "material_report.json").read_text())
    assert rep["report"]["all_passed"] and len(rep["config_hash"]) == 64


def test_material_check_failure_names_condition(tmp_path):
    assert run(tmp_path, "material", "check", "--w1", "0") == 1
    rep = json.loads((tmp_path / "material_report.json").read_text())
    assert "enhanced_ellipticity" in rep["report"]["failures"]


def test_missing_w1_is_usage_error(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\nfamily = tanh\n")
    assert main(["--config", str(cfg), "--out", str(tmp_path), "material", "check"]) == 2
    assert json.loads((tmp_path / "error.json").read_text())["error"] == "usage"


def test_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\nw1 = 1\n[numeric]\nspeed = fast\n")
    assert main(["--config", str(cfg), "--out", str(tmp_path), "material", "check"]) == 2


def test_bad_usage(tmp_path):
    assert main([]) == 2
    assert run(tmp_path, "front", "solve", "--epsilon", "x") == 2


def test_config_file_drives_the_run(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\nw1 = 0.5\nfamily = tanh\n[conjugate]\nlambdas = 1.0\n")
    out = tmp_path / "o"
    assert main(["--config", str(cfg), "--out", str(out), "conjugate", "table"]) == 0
    meta = json.loads((out / "conjugate.json").read_text())
    assert meta["config"]["model"] == {"extra": [], "family": "tanh", "w1": 0.5}


def test_conjugate_table(tmp_path):
    assert run(tmp_path, "conjugate", "table", "--lambdas", "0.25,1,4") == 0
    rows = read_csv(tmp_path / "conjugate.csv")
    assert list(rows[0]) == ["lambda", "c1", "U_plus_at_0", "Vmax", "S_plus", "phi_dot_end", "sigma0"]
    S = [float(r["S_plus"]) for r in rows]
    assert len(rows) == 3 and S[0] > S[1] > S[2]
    assert all(float(r["sigma0"]) < 0 for r in rows)
    # 17 significant digits
    assert len(rows[1]["c1"].replace(".", "").lstrip("0")) >= 16


def test_conjugate_table_edge_cases(tmp_path):
    assert run(tmp_path, "conjugate", "table", "--lambdas", "") == 0
    assert (tmp_path / "conjugate.csv").read_text().strip() == "lambda,c1,U_plus_at_0,Vmax,S_plus,phi_dot_end,sigma0"
    assert run(tmp_path, "conjugate", "table", "--lambdas", "0,1") == 1
    assert "error" in json.loads((tmp_path / "error.json").read_text())


def test_period_map_and_spectrum(tmp_path):
    assert run(tmp_path, "period-map", "--lam", "1", "--n", "6") == 0
    P = [float(r["P"]) for r in read_csv(tmp_path / "period_map.csv")]
    assert len(P) == 6 and all(a < b for a, b in zip(P, P[1:]))
    assert run(tmp_path, "spectrum", "--epsilons", "0.2,0.1") == 0
    meta = json.loads((tmp_path / "spectrum.json").read_text())
    assert meta["richardson"] == pytest.approx(-2.0, abs=0.01)


def test_front_solve_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["--out", str(a), "front", "solve", "--epsilon", "0.2"]) == 0
    assert main(["--out", str(b), "front", "solve", "--epsilon", "0.2"]) == 0
    meta = json.loads((a / "meta.json").read_text())
    assert meta["nodal_ok"] and meta["residual_max"] <= 1e-10
    assert (a / "u.csv").read_bytes() == (b / "u.csv").read_bytes()
    assert (a / "meta.json").read_bytes() == (b / "meta.json").read_bytes()


def test_front_solve_lambda_and_neumann(tmp_path):
    assert run(tmp_path, "front", "solve", "--lambda", "0.3", "--bc", "neumann", "--ny", "33") == 0
    meta = json.loads((tmp_path / "meta.json").read_text())
    assert meta["bc"] == "neumann" and meta["grid"]["n_y"] == 33


@pytest.mark.slow
def test_branch_continue(tmp_path):
    assert run(tmp_path, "branch", "continue", "--epsilon", "0.3", "--steps", "4", "--ny", "33") == 0
    rows = read_csv(tmp_path / "branch.csv")
    assert len(rows) == 5 and all(float(r["lambda"]) > 0 for r in rows)
    summ = json.loads((tmp_path / "branch.json").read_text())["summary"]
    assert summ["all_nodal_ok"]


def test_verify_subset(tmp_path):
    assert run(tmp_path, "verify", "all", "--only", "1,2") == 0
    res = json.loads((tmp_path / "verify.json").read_text())["results"]
    assert [r["number"] for r in res] == [1, 2]
    assert run(tmp_path, "verify", "all", "--only", "12") == 2
