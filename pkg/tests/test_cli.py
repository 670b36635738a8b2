import json
import subprocess
import sys

import numpy as np
import pytest

from pnfgame.cli import EXIT_CONFIG, EXIT_NOT_EQUILIBRIUM, EXIT_OK, EXIT_SOLVER, EXIT_USAGE, execute
from pnfgame.equilibrium import gamma_region
from pnfgame.topology import ring, star

from conftest import make_config


def run(capsys, *argv):
    code = execute(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_profile(tmp_path, g, x=None, name="p.json"):
    data = {"g": np.asarray(g).tolist()}
    if x is not None:
        data["x"] = list(map(float, x))
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_gamma_regions(capsys):
    code, out, _ = run(capsys, "gamma-regions", "--n", "10", "--rho", "0.8", "--c", "0.1")
    lines = out.splitlines()
    assert code == EXIT_OK and lines[0] == "d,x_s,X_s,gamma_lo,gamma_hi" and len(lines) == 11
    rows = [list(map(float, ln.split(","))) for ln in lines[1:]]
    assert rows[0][4] == float("inf") and rows[-1][3] == 0.0
    assert all(a[3] > b[4] for a, b in zip(rows, rows[1:]))


def test_json_format(capsys):
    code, out, _ = run(capsys, "gamma-regions", "--n", "4", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data[0]["gamma_hi"] == "inf" and set(data[0]) == {"d", "x_s", "X_s", "gamma_lo", "gamma_hi"}


def test_output_is_byte_identical(tmp_path, capsys):
    outs = []
    for k in range(2):
        path = tmp_path / f"s{k}.csv"
        assert run(capsys, "search", "--n", "6", "--gamma", "2", "--seeds", "3", "--out", str(path))[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    man = json.loads((tmp_path / "s0.csv.manifest.json").read_text())
    assert man["command"] == "search" and man["seeds"] == [0, 1, 2] and man["config"]["n"] == 6
    assert set(man) >= {"argv", "version", "backend", "conventions", "summary"}
    assert man["summary"]["found"] == 3


def test_verify_star_exits_one(tmp_path, capsys):
    path = write_profile(tmp_path, star(5))
    code, out, _ = run(capsys, "verify", "--profile", path, "--gamma", "0.5")
    rep = json.loads(out)
    assert code == EXIT_NOT_EQUILIBRIUM and rep["verdict"] == "not_equilibrium"
    failed = {c["name"] for c in rep["audit"] if c["status"] == "fail"}
    assert "cor1_2_balance" in failed


def test_verify_equilibrium_exits_zero(tmp_path, capsys):
    cfg = make_config()
    iv = gamma_region(4, cfg)
    path = write_profile(tmp_path, ring(10, 2), [iv.x_s] * 10)
    gamma = str(0.5 * (iv.gamma_lo + iv.gamma_hi))
    code, out, _ = run(capsys, "verify", "--profile", path, "--gamma", gamma)
    assert code == EXIT_OK and json.loads(out)["verdict"] == "strict_equilibrium"
    code, out, _ = run(capsys, "verify", "--profile", path, "--gamma", "0.5", "--format", "csv")
    assert code == EXIT_NOT_EQUILIBRIUM and out.startswith("user,kind,reason,new_x,new_outbound,utility_gain\n")


def test_optimum_and_sweep(tmp_path, capsys):
    code, out, _ = run(capsys, "optimum", "--gamma", "0.5")
    header, row = out.splitlines()
    rec = dict(zip(header.split(","), row.split(",")))
    assert code == 0 and rec["d_opt"] == "4" and float(rec["p_opt"]) == pytest.approx(0.02)
    code, out, _ = run(capsys, "pricing-sweep", "--gamma-grid", "0.1:2:5")
    assert code == 0 and len(out.splitlines()) == 6
    code, out, _ = run(capsys, "pricing-sweep", "--gamma-list", "2")
    assert out.splitlines()[1].endswith(",inf,nan")


def test_scaling(capsys):
    code, out, _ = run(capsys, "scaling", "--n-list", "5,6", "--seeds", "2", "--gamma", "2.5")
    assert code == 0 and out.splitlines()[0] == "n,seed,n_h,fraction,x_hi,x_lo,k_hi,k_lo"
    assert len(out.splitlines()) == 5


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 5, "rho": 0.5, "c": 0.2, "gamma": 0.1}))
    code, out, _ = run(capsys, "gamma-regions", "--config", str(cfg), "--n", "6")
    assert code == 0 and len(out.splitlines()) == 7


@pytest.mark.parametrize("argv,code", [
    (["--bogus"], EXIT_USAGE),
    (["gamma-regions", "--nope"], EXIT_USAGE),
    ([], EXIT_USAGE),
    (["gamma-regions", "--c", "3"], EXIT_CONFIG),
    (["gamma-regions", "--rho", "1.5"], EXIT_CONFIG),
    (["verify", "--profile", "/nonexistent.json"], EXIT_CONFIG),
    (["--version"], EXIT_OK),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_verify_bad_profile(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"g": [[1, 0], [0, 0]]}))
    assert run(capsys, "verify", "--profile", str(path))[0] == EXIT_CONFIG
    path.write_text("{not json")
    assert run(capsys, "verify", "--profile", str(path))[0] == EXIT_CONFIG


def test_solver_failure_exit(tmp_path, capsys, monkeypatch):
    from pnfgame import cli
    from pnfgame.errors import ConvergenceError

    def boom(*a, **k):
        raise ConvergenceError("no", 1.0)

    monkeypatch.setattr(cli, "production_fixed_point", boom)
    path = write_profile(tmp_path, star(5))
    assert run(capsys, "verify", "--profile", path)[0] == EXIT_SOLVER


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "pnfgame.cli", "gamma-regions", "--n", "3"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and len(out.stdout.splitlines()) == 4
