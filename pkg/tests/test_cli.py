import csv
import json

import pytest

from kp5 import fieldio
from kp5.cli import fit_order, load_config, main, ConfigError
from kp5.spectral import GridSpec, random_field


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg, indent=2) if isinstance(cfg, dict) else cfg)
    return p


BASE = {"nx": 16, "ny": 16, "dt": 0.01, "t-end": 0.05, "modes": [{"m": 1, "n": 0, "re": 0.05}]}


def manifest(out):
    return json.loads((out / "manifest.json").read_text())


def test_simulate_zero_data(tmp_path):
    cfg = write(tmp_path, {**BASE, "modes": []})
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out / "series.csv")))
    assert rows[0].keys() == {"t", "mass", "energy", "e_norm", "linf"}
    assert all(float(r["mass"]) == 0 and float(r["energy"]) == 0 for r in rows)
    m = manifest(out)
    assert m["status"] == "ok" and m["command"] == "simulate"
    assert {"config_echo", "seed", "version", "wall_time_s", "outputs"} <= set(m)
    assert fieldio.load(out / "final.kp5f").grid == GridSpec(16, 16)


def test_dt_zero_names_field(tmp_path, capsys):
    cfg = write(tmp_path, '{\n  "nx": 16, "ny": 16,\n  "dt": 0,\n  "t-end": 1\n}')
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 1
    err = capsys.readouterr().err
    assert "cfg.json:3:" in err and "'dt'" in err
    assert manifest(out)["status"] == "precondition_failed"


@pytest.mark.parametrize("text, needle", [
    ('{"nx": 16, "ny": 16, "dt": 0.1}', "missing required field 't-end'"),
    ('{"nx": 15, "ny": 16, "dt": 0.1, "t-end": 1}', "even integer"),
    ('{"nx": 16, "ny": 16, "dt": 0.1, "t-end": 1, "colour": 2}', "unknown field 'colour'"),
    ('{"nx": 16, "ny": 16, "dt": 0.1, "t-end": 1, "scheme": "rk4"}', "scheme"),
    ('{"nx": 16,\n "ny": 16 "dt": 0.1}', ":2: invalid JSON"),
    ('{"nx": 16, "ny": 16, "dt": 0.1, "t-end": 1, "modes": [{"m": 0, "n": 2, "re": 1}]}', "x-mean"),
    ('{"nx": 16, "ny": 16, "dt": 0.1, "t-end": 1, "modes": [{"m": 8, "n": 0, "re": 1}]}', "Nyquist"),
    ('{"nx": 16, "ny": 16, "dt": 2, "t-end": 1}', "must not exceed"),
])
def test_config_errors(tmp_path, text, needle):
    with pytest.raises(ConfigError, match=needle):
        load_config(write(tmp_path, text))


def test_mean_mode_goes_to_drift(tmp_path):
    cfg = {**BASE, "c-drift": 0.1, "modes": [{"m": 0, "n": 0, "re": 0.3}, {"m": 1, "n": 0, "re": 0.5}]}
    echo, sim, u0 = load_config(write(tmp_path, cfg))
    assert sim.c_drift == pytest.approx(0.4) and echo["resolved-mean"] == pytest.approx(0.3)
    assert u0.coeff(1, 0) == pytest.approx(0.5) and u0.coeff(0, 0) == 0


def test_checkpoint_input(tmp_path, rng):
    g = GridSpec(16, 16)
    fieldio.save(random_field(g, rng, kmax=2, amplitude=0.01), tmp_path / "u0.kp5f")
    cfg = write(tmp_path, {"nx": 16, "ny": 16, "dt": 0.01, "t-end": 0.02, "checkpoint": "u0.kp5f"})
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    bad = write(tmp_path, {"nx": 32, "ny": 16, "dt": 0.01, "t-end": 0.02, "checkpoint": "u0.kp5f"}, "bad.json")
    with pytest.raises(ConfigError, match="differs"):
        load_config(bad)


def test_blowup_exit_code(tmp_path):
    cfg = write(tmp_path, {**BASE, "modes": [{"m": 1, "n": 0, "re": 1e13}]})
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 2
    assert manifest(out)["status"] == "blowup"


def test_convergence_ladder_errors(tmp_path):
    cfg = write(tmp_path, BASE)
    out = str(tmp_path / "o")
    assert main(["convergence", "--config", str(cfg), "--dts", "1e-2,5e-3", "--out", out]) == 1
    assert main(["convergence", "--config", str(cfg), "--dts", "1e-2,4e-3,1e-3", "--out", out]) == 1


def test_convergence_linear_skips(tmp_path):
    cfg = write(tmp_path, {**BASE, "nonlinear": False})
    out = tmp_path / "o"
    assert main(["convergence", "--config", str(cfg), "--dts", "1e-2,5e-3,2.5e-3", "--out", str(out)]) == 0
    m = manifest(out)
    assert m["order_status"] == "skipped_linear" and m["order"] is None
    assert max(m["errors"]) < 1e-12


def test_fit_order():
    dts = [0.1, 0.05, 0.025]
    assert fit_order(dts, [d**4 for d in dts]) == pytest.approx(4.0)


def test_verify_bad_regime_constant(tmp_path):
    assert main(["verify", "bilinear", "--regime-constant", "-1", "--out", str(tmp_path)]) == 1


def test_verify_counting_small(tmp_path, capsys):
    assert main(["verify", "counting", "--trials", "200", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "verify_report.json").read_text())
    assert report["counting"]["passed"]
    assert "parabola" in capsys.readouterr().out


def test_verify_resonance_small(tmp_path):
    assert main(["verify", "resonance", "--mmax", "8", "--out", str(tmp_path)]) == 0


def test_verify_strict_constant_vacuous(tmp_path, monkeypatch):
    # shrink the sweep: lowmod cases only matter here
    from kp5.verifier import suites
    monkeypatch.setattr(suites, "oracle_check", lambda seed=0: {"passed": True, "max_rel_err": 0.0})
    monkeypatch.setattr(suites, "trilinear_check", lambda seed=0: {"passed": True, "max_constant": 0.0, "cap": 4})
    out = tmp_path / "o"
    code = main(["verify", "bilinear", "--mmax", "4", "--trials", "2", "--regime-constant", "1e-10",
                 "--out", str(out)])
    assert code == 0
    report = json.loads((out / "verify_report.json").read_text())["bilinear"]
    low = [c for c in report["cases"] if c["params"]["kind"] == "lowmod_18"]
    assert low and all(c["status"] == "vacuous" for c in low)
    assert (out / "verify_ledger.csv").exists()


def test_usage_errors():
    assert main([]) == 1
    assert main(["verify", "nope"]) == 1
