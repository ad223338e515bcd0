import csv
import json
import subprocess
import sys

BASE = [sys.executable, "-m", "hubbard_lax.cli"]


def run(*args, **kw):
    return subprocess.run(BASE + list(args), capture_output=True, text=True, **kw)


def test_ness_contract(tmp_path):
    out = tmp_path / "o"
    r = run("ness", "--n", "2", "--gammaL", "1", "--gammaR", "0.5", "--u", "1",
            "--out", str(out))
    assert r.returncode == 0, r.stderr
    doc = json.loads(r.stdout)
    assert doc["schema_version"] == 1
    assert doc["driving"]["gamma_R"] == 0.5
    assert doc["map"]["lambda"] == [1.0 / 3.0, 0.0]
    assert doc["passed"] is True
    assert (out / "ness.json").exists()


def test_ness_deterministic_output(tmp_path):
    args = ("ness", "--n", "2", "--gammaL", "1.2", "--gammaR", "0.7",
            "--muL", "0.3", "--u", "1")
    r1 = run(*args, "--out", str(tmp_path / "a"))
    r2 = run(*args, "--out", str(tmp_path / "b"))
    assert r1.returncode == r2.returncode == 0
    assert (tmp_path / "a" / "ness.json").read_bytes() == \
           (tmp_path / "b" / "ness.json").read_bytes()


def test_zero_rate_rejected(tmp_path):
    r = run("ness", "--n", "2", "--gammaL", "0", "--gammaR", "1", "--u", "1",
            "--out", str(tmp_path))
    assert r.returncode == 2
    assert "positive" in r.stderr


def test_oracle_size_refusal(tmp_path):
    r = run("oracle", "--n", "4", "--gammaL", "1", "--gammaR", "1", "--u", "1",
            "--out", str(tmp_path))
    assert r.returncode == 2
    assert "n <= 3" in r.stderr


def test_oracle_two_sites(tmp_path):
    r = run("oracle", "--n", "2", "--gammaL", "1", "--gammaR", "0.5", "--u", "1",
            "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    doc = json.loads(r.stdout)
    assert doc["frobenius_distance"] < 1e-10
    assert doc["passed"] is True


def test_verify_small(tmp_path):
    r = run("verify", "--samples", "1", "--K", "3", "--seed", "7",
            "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    doc = json.loads(r.stdout)
    assert doc["seed"] == 7
    assert doc["all_passed"] is True
    assert all(rep["passed"] for rep in doc["reports"])
    assert all(x["passed"] for x in doc["interaction_blocks"])


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 2, "gammaL": 1.0, "gammaR": 0.5, "u": 1.0}))
    r1 = run("ness", "--config", str(cfg), "--out", str(tmp_path / "a"))
    assert r1.returncode == 0, r1.stderr
    assert json.loads(r1.stdout)["driving"]["gamma_R"] == 0.5
    # flag overrides the file
    r2 = run("ness", "--config", str(cfg), "--gammaR", "2.0",
             "--out", str(tmp_path / "b"))
    assert json.loads(r2.stdout)["driving"]["gamma_R"] == 2.0


def test_observe_csv(tmp_path):
    r = run("observe", "--n", "3", "--gammaL", "1", "--gammaR", "0.5", "--u", "1",
            "--gnuplot", "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    with open(tmp_path / "densities.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["site", "sz", "tz"]
    assert len(rows) == 4
    with open(tmp_path / "currents.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["bond", "J_sigma", "J_tau"]
    assert len(rows) == 3
    assert (tmp_path / "profile.dat").exists()


def test_commute_reports_seed(tmp_path):
    r = run("commute", "--n", "2", "--pairs", "2", "--seed", "5",
            "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    doc = json.loads(r.stdout)
    assert doc["seed"] == 5
    assert doc["tier"] == "conjecture"


def test_sweep_deterministic_ordering(tmp_path):
    args = ("sweep", "--n", "2", "--gammaL", "0.5,1.5", "--gammaR", "1",
            "--u", "1")
    r1 = run(*args, "--out", str(tmp_path / "a"))
    assert r1.returncode == 0, r1.stderr
    doc = json.loads(r1.stdout)
    keys = [c["key"] for c in doc["configurations"]]
    assert keys == sorted(keys)
    r2 = run(*args, "--out", str(tmp_path / "b"))
    assert (tmp_path / "a" / "sweep.json").read_bytes() == \
           (tmp_path / "b" / "sweep.json").read_bytes()


def test_unwritable_output(tmp_path):
    r = run("commute", "--n", "2", "--pairs", "1", "--out", "/proc/definitely/not")
    assert r.returncode == 2
    assert "error" in r.stderr
