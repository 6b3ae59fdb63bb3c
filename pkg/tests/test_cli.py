import json

import pytest

from duronlab.cli import main


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_algebra_eval(capsys):
    assert main(["algebra", "eval", "[A,B][B,C]"]) == 0
    assert capsys.readouterr().out.strip() == "[A,C]"


def test_algebra_eval_undefined(capsys):
    assert main(["algebra", "eval", "[A,B][C,D]"]) == 1
    assert "not defined" in capsys.readouterr().err


def test_algebra_eval_syntax_error(capsys):
    assert main(["algebra", "eval", "[A,B"]) == 2


def test_preset_table(capsys):
    assert main(["algebra", "table", "standard-doubling"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["preset"] == "standard-doubling"
    assert not all(e["agrees_with_printed"] for e in out["entries"])
    assert main(["algebra", "table", "nope"]) == 2


def test_thermofield_point(capsys):
    assert main(["thermofield", "--theta", "0.8", "--n", "40"]) == 0
    rep = _json(capsys)
    row = next(c for c in rep["checks"] if c["name"] == "thermofield.c0_cosh")
    assert row["pass"] and row["value"] <= 1e-8
    assert set(rep) == {"config", "checks", "summary"}


def test_thermofield_inadequate_cutoff(capsys):
    assert main(["thermofield", "--theta", "0.8", "--n", "10"]) == 2
    assert "config.n" in capsys.readouterr().err


def test_thermofield_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["thermofield", "--theta-sweep", "0:0.8:3", "--n", "40", "--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    head = lines[0].split(",")
    assert head[:2] == ["theta", "c0"] and head[-3:] == ["mean_occupation", "gibbs_deviation", "bogoliubov_residual"]
    assert "c10" in head and len(lines) == 4
    summary = json.loads((tmp_path / "sweep.csv.json").read_text())
    assert summary["summary"]["failed"] == 0


def test_moyal_bracket(capsys):
    assert main(["moyal", "bracket", "--f", "x^3", "--g", "p^3"]) == 0
    text, terms = capsys.readouterr().out.splitlines()
    assert text == "9 x^2 p^2 - 3/2 h^2"
    assert json.loads(terms)[1] == {"x": 0, "p": 0, "h": 2, "re": "-3/2", "im": "0"}


def test_moyal_bad_input():
    assert main(["moyal", "bracket", "--f", "x y", "--g", "p"]) == 2


def test_superops_report(capsys):
    assert main(["superops", "--n", "4", "--seed", "3"]) == 0
    rep = _json(capsys)
    assert rep["config"]["seed"] == 3 and rep["summary"]["failed"] == 0


def test_tolerance_override_fails_run(capsys):
    assert main(["superops", "--tol", "superops.spectra=1e-30"]) == 1
    assert "superops.spectra" in capsys.readouterr().err


def test_unknown_tolerance_key():
    assert main(["superops", "--tol", "nothing=1"]) == 2


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed = 11\nn = 3\n")
    assert main(["superops", "--config", str(cfg)]) == 2
    assert "config.n" in capsys.readouterr().err
    assert main(["superops", "--config", str(cfg), "--n", "5"]) == 0
    rep = _json(capsys)
    assert rep["config"]["seed"] == 11 and rep["config"]["n"] == 5


def test_classical_grid_csv(capsys):
    assert main(["bilocal-classical", "--system", "free", "--grid=-1:1:3", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("x2,r1,r2") and len(lines) == 4


def test_quantum_oscillator(capsys):
    assert main(["bilocal-quantum", "--system", "oscillator", "--n", "6"]) == 0
    assert _json(capsys)["summary"]["failed"] == 0


def test_timing_flag(capsys):
    assert main(["superops", "--n", "4", "--timing"]) == 0
    assert _json(capsys)["summary"]["runtime_ms"] > 0


@pytest.mark.parametrize("argv", [["verify-all", "--seed", "5", "--n", "40"]])
def test_parallel_matches_serial(argv, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b), "--jobs", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_superops_size_limit(capsys):
    assert main(["superops", "--n", "60"]) == 2
    assert "config.n" in capsys.readouterr().err
