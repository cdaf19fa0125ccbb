import csv
import io
import json
import subprocess
import sys

import pytest

from veronese.cli import RunConfig, main, parse_number, parse_scales, run
from veronese.errors import InvalidSpec

Z = "meinsatz:b=2,k=2,rho=1"


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_formula_text(capsys):
    code, out, _ = _run(["formula", "hausdorff", "--k", "2", "--lambda", "3", "--format", "text"], capsys)
    assert code == 0 and out == "1/4\n"


def test_formula_json_has_exact_rationals(capsys):
    code, out, _ = _run(["formula", "bestens", "--lambda1", "5", "--k", "2"], capsys)
    body = json.loads(out)
    assert code == 0 and body["result"]["value"] == "2/1"
    assert body["result"]["provenance"] == "CITED"


def test_verify_lemma2_exit_zero(capsys):
    code, out, _ = _run(["verify", "lemma2", "--number", Z, "--xmax", "100000"], capsys)
    body = json.loads(out)
    assert code == 0 and body["result"]["report"]["violations"] == []


def test_estimate_lambda_final_sample(capsys):
    code, out, _ = _run(["estimate", "lambda", "--number", "bugeaud:alpha=1,tau=3", "--k", "1",
                         "--scales", "2^16,2^64"], capsys)
    body = json.loads(out)
    final = float(body["result"]["samples"][-1]["value"])
    assert code == 0 and 2.85 <= final <= 3.15


def test_csv_samples(capsys):
    code, out, _ = _run(["estimate", "lambda", "--number", Z, "--k", "1", "--scales", "2^8,2^32",
                         "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [int(r["scale"]) for r in rows] == [2**8, 2**32]


def test_liouville_exit_codes(capsys):
    argv = ["verify", "liouville", "--number", "lacunary:b=2,q=2", "--k", "2", "--xmax", "100000"]
    code, out, _ = _run(argv, capsys)
    assert code == 1 and json.loads(out)["result"]["finding"] is True
    code, _, _ = _run(argv + ["--evidence"], capsys)
    assert code == 0


def test_precision_exit_code(capsys):
    code, _, err = _run(["scan", "mx", "--number", "lacunary:b=2,terms=1;5;23", "--k", "1", "--x", "2^40"], capsys)
    assert code == 2 and "precision" in err


@pytest.mark.parametrize("argv", [
    ["formula", "hausdorff", "--k", "3", "--lambda", "1/2"],
    ["formula", "hausdorff", "--k", "2"],
    ["scan", "mx", "--number", "nonsense", "--x", "3"],
    ["estimate", "lambda", "--number", Z, "--scales", "10", "--workers", "0"],
    ["formula", "nope"],
])
def test_invalid_config_exit_code(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 3


def test_env_worker_default(monkeypatch, capsys):
    monkeypatch.setenv("VERONESE_WORKERS", "many")
    code, _, err = _run(["formula", "uniform", "--k", "2"], capsys)
    assert code == 3 and "VERONESE_WORKERS" in err


@pytest.mark.parametrize("argv", [
    ["verify", "lemma2", "--number", Z, "--xmax", "30000"],
    ["estimate", "lambda_hat", "--number", Z, "--k", "2", "--scales", "2^10,2^16"],
    ["scan", "linear", "--number", Z, "--k", "2", "--height", "40"],
])
def test_reports_identical_across_workers(argv, capsys):
    outs = []
    for w in ("1", "3"):
        code, out, _ = _run(argv + ["--workers", w], capsys)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_ini_round_trip(tmp_path, capsys):
    ini = tmp_path / "run.ini"
    argv = ["formula", "neuko", "--w1", "14/5", "--k", "3", "--save-config", str(ini)]
    code, direct, _ = _run(argv, capsys)
    cfg = RunConfig.from_ini(ini.read_text())
    assert RunConfig.from_ini(cfg.to_ini()) == cfg
    assert cfg.params == {"w1": "14/5", "k": "3"}
    code2, replay, _ = _run(["run", str(ini)], capsys)
    assert code == code2 == 0 and replay == direct


def test_config_validation():
    with pytest.raises(InvalidSpec):
        RunConfig.from_ini("[run]\ncommand = formula\nworkers = 0\n")
    with pytest.raises(InvalidSpec):
        RunConfig.from_ini("[run]\ncommand = estimate\n[params]\ntolerance = 2\n")
    with pytest.raises(InvalidSpec):
        RunConfig.from_ini("not an ini file")
    code, text = run(RunConfig("formula", "uniform", {"k": "4"}, fmt="text"))
    assert code == 0 and text == "1/2\n"


def test_number_and_scale_parsing():
    h, cert = parse_number("meinsatz:b=3,k=2,rho=2,coeff=2")
    assert cert.k == 2 and h.spec.coeff == 2
    h, cert = parse_number("rational:2/6")
    assert cert is None and str(h.value) == "1/3"
    assert parse_scales("2^8, 2**4,100") == [256, 16, 100]
    with pytest.raises(InvalidSpec):
        parse_number("lacunary:b=2")
    with pytest.raises(InvalidSpec):
        parse_number("meinsatz:b=2,k=2")


def test_output_file(tmp_path, capsys):
    dest = tmp_path / "out.json"
    code, out, _ = _run(["construct", "--number", "bugeaud:alpha=1,tau=3", "--output", str(dest)], capsys)
    body = json.loads(dest.read_text())
    assert code == 0 and out == ""
    assert body["result"]["membership"]["member"] is True


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "veronese", "formula", "uniform", "--k", "4", "--format", "text"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout == "1/2\n"
