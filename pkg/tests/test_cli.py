import csv
import json
import math
import os

import pytest

from dunklriesz.cli import main


def run(args, tmp_path):
    cwd = os.getcwd()
    os.chdir(tmp_path)
    try:
        return main(args)
    finally:
        os.chdir(cwd)


def test_basis_command(tmp_path, capsys):
    code = run(["basis", "--group", "z2", "--kappa", "0.5", "--degree", "6",
                "--out", "basis.json"], tmp_path)
    assert code == 0
    out = capsys.readouterr().out
    assert "c_kappa=" in out and "gamma=" in out
    payload = json.loads((tmp_path / "basis.json").read_text())
    assert payload["degree"] == 6 and len(payload["indices"]) == 7


def test_basis_degree_zero(tmp_path):
    assert run(["basis", "--group", "z2", "--kappa", "1", "--degree", "0",
                "--out", "b0.json"], tmp_path) == 0
    payload = json.loads((tmp_path / "b0.json").read_text())
    assert payload["indices"] == [[0]]


def test_negative_kappa_rejected(tmp_path, capsys):
    code = run(["basis", "--group", "z2", "--kappa", "-1", "--degree", "4"], tmp_path)
    assert code == 2


def test_eval_heat_kernel(tmp_path):
    (tmp_path / "pts.csv").write_text("t,x0,y0\n1.0,0.0,0.0\n")
    code = run(["eval", "--group", "z2", "--kappa", "0", "--degree", "4",
                "--what", "heat-kernel", "--points", "pts.csv", "--out", "hk.csv"], tmp_path)
    assert code == 0
    rows = list(csv.reader((tmp_path / "hk.csv").read_text().splitlines()))
    assert rows[0][-2:] == ["value", "status"]
    val = float(rows[1][-2])
    assert val == pytest.approx((2 * math.pi * math.sinh(2.0)) ** -0.5, rel=1e-10)


def test_eval_dunkl_kernel_kappa0(tmp_path):
    (tmp_path / "pts.csv").write_text("0.7,0.3\n-1.0,2.0\n")
    code = run(["eval", "--group", "z2", "--kappa", "0", "--degree", "4",
                "--what", "dunkl-kernel", "--points", "pts.csv", "--out", "dk.csv"], tmp_path)
    assert code == 0
    rows = list(csv.reader((tmp_path / "dk.csv").read_text().splitlines()))[1:]
    for row in rows:
        x, y = float(row[0]), float(row[1])
        assert float(row[2]) == pytest.approx(math.exp(x * y), rel=1e-10)


def test_eval_riesz_orbit_flagged_not_fatal(tmp_path):
    (tmp_path / "pts.csv").write_text("1,1.0,2.5\n1,1.0,1.0\n")
    code = run(["eval", "--group", "z2", "--kappa", "0.5", "--degree", "4",
                "--what", "riesz-kernel", "--points", "pts.csv", "--out", "rk.csv"], tmp_path)
    assert code == 0
    rows = list(csv.reader((tmp_path / "rk.csv").read_text().splitlines()))[1:]
    assert rows[0][-1] == "ok"
    assert rows[1][-1] == "orbit-too-close"


def test_verify_subset_and_reports(tmp_path):
    code = run(["verify", "--group", "z2", "--kappa", "0.5", "--degree", "12",
                "--checks", "eigen,heat,riesz_l2", "--out", "rep"], tmp_path)
    assert code == 0
    rep = json.loads((tmp_path / "rep.json").read_text())
    assert {c["name"] for c in rep["checks"]} == {"eigen", "heat", "riesz_l2"}
    assert all(c["status"] == "pass" for c in rep["checks"])
    assert (tmp_path / "rep.csv").read_text().startswith("check,constant,value")


def test_verify_empty_checks_noop(tmp_path):
    code = run(["verify", "--group", "z2", "--kappa", "0.5", "--degree", "4",
                "--checks", "", "--out", "rep"], tmp_path)
    assert code == 0
    rep = json.loads((tmp_path / "rep.json").read_text())
    assert rep["checks"] == []


def test_verify_failure_exit_code(tmp_path):
    # mehler at N=12 fails its 1e-6 tolerance at r = 0.5 (truncation tail)
    code = run(["verify", "--group", "z2", "--kappa", "0.5", "--degree", "12",
                "--checks", "mehler", "--out", "rep"], tmp_path)
    assert code == 1


def test_verify_corrupted_basis_exit2(tmp_path, capsys):
    assert run(["basis", "--group", "z2", "--kappa", "0.5", "--degree", "4",
                "--out", "b.json"], tmp_path) == 0
    payload = json.loads((tmp_path / "b.json").read_text())
    payload["norms"][0] = 42.0
    (tmp_path / "b.json").write_text(json.dumps(payload))
    code = run(["verify", "--group", "z2", "--kappa", "0.5", "--degree", "4",
                "--basis-file", "b.json", "--checks", "eigen", "--out", "rep"], tmp_path)
    assert code == 2
    assert "checksum" in capsys.readouterr().err


def test_config_file_with_overrides(tmp_path):
    cfg = {
        "group": "z2",
        "kappa": 0.5,
        "degree": 8,
        "checks": ["eigen"],
        "verify": {"lp_samples": 5},
        "kernel": {"separation_floor": 1e-5},
    }
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    code = run(["verify", "--config", "cfg.json", "--out", "rep"], tmp_path)
    assert code == 0


def test_config_unknown_key_rejected(tmp_path):
    (tmp_path / "cfg.json").write_text(json.dumps({"grup": "z2"}))
    assert run(["verify", "--config", "cfg.json", "--out", "rep"], tmp_path) == 2


def test_config_root_system_block_catalogue(tmp_path):
    cfg = {
        "root_system": {"type": "catalogue", "name": "b2", "multiplicity": [1, 2]},
        "degree": 4,
        "checks": ["eigen"],
    }
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    assert run(["verify", "--config", "cfg.json", "--out", "rep"], tmp_path) == 0
    rep = json.loads((tmp_path / "rep.json").read_text())
    assert rep["config"]["group"] == "b2"


def test_config_root_system_block_explicit(tmp_path):
    cfg = {
        "root_system": {
            "type": "explicit",
            "roots": [[1.0, 0.0], [0.0, 1.0]],
            "multiplicity": [0.5, 1.5],
        },
        "degree": 3,
        "checks": ["eigen"],
    }
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    assert run(["verify", "--config", "cfg.json", "--out", "rep"], tmp_path) == 0


def test_basis_cache_round_trip(tmp_path):
    cfg = {"group": "z2", "kappa": 1.0, "degree": 6, "cache_dir": "cache",
           "checks": ["eigen"]}
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    assert run(["verify", "--config", "cfg.json", "--out", "r1"], tmp_path) == 0
    cached = os.listdir(tmp_path / "cache")
    assert len(cached) == 1
    # second run loads from cache (float basis) and still passes
    assert run(["verify", "--config", "cfg.json", "--out", "r2"], tmp_path) == 0


def test_reports_reproducible(tmp_path):
    args = ["verify", "--group", "z2", "--kappa", "0.5", "--degree", "8",
            "--checks", "eigen,heat,lp_empirical", "--seed", "7"]
    assert run(args + ["--out", "repA"], tmp_path) == 0
    assert run(args + ["--out", "repB"], tmp_path) == 0
    a = json.loads((tmp_path / "repA.json").read_text())
    b = json.loads((tmp_path / "repB.json").read_text())
    def strip(rep):
        for c in rep["checks"]:
            c.pop("runtime_ms")
        return rep
    assert strip(a) == strip(b)
