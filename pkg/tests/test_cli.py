import json
import os
import subprocess
import sys

import pytest

from entgrowth.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main, normalize_experiment_config, parse_window
from entgrowth.errors import ConfigError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_catalog_text_and_json(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == EXIT_OK and "sin:lambda" in out
    code, out, _ = run(capsys, "catalog", "--json")
    rows = json.loads(out)
    assert isinstance(rows, list)
    by_spec = {r["spec"]: r for r in rows}
    assert by_spec["maximal_type:rho"]["type_tag"] == "maximal"
    assert "|lambda|" in by_spec["sin:lambda"]["ground_truth"]


def test_analyze_sin2(capsys):
    code, out, _ = run(capsys, "analyze", "sin:lambda=2", "--window", "1000:2001")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert set(rep) == {"config", "results", "diagnostics"}
    assert rep["results"]["type"]["value"] == pytest.approx(2.0, rel=0.01)
    assert rep["results"]["rho_used"] == {"policy": "ground_truth", "value": 1.0}
    assert rep["config"]["window"] == [1000, 2001]


def test_analyze_polynomial(capsys):
    code, out, _ = run(capsys, "analyze", "polynomial:coeffs=1;2;3")
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["results"]["order"]["value"] == 0.0 and rep["results"]["type"] == "undefined"


def test_analyze_exp_regression(capsys, tmp_path):
    path = tmp_path / "exp.json"
    code, out, _ = run(capsys, "analyze", "exp", "--method", "regression", "--out", str(path))
    assert code == EXIT_OK and out == ""
    rep = json.loads(path.read_text())
    assert rep["results"]["order"]["value"] == pytest.approx(1.0, abs=0.02)
    assert rep["results"]["order"]["method"] == "regression"
    assert oct(os.stat(path).st_mode & 0o777) == "0o644"


def test_analyze_errors_exit_2(capsys):
    code, _, err = run(capsys, "analyze", "gamma")
    assert code == EXIT_NUMERIC and "UnknownId" in err
    code, out, _ = run(capsys, "analyze", "exp", "--rho-policy", "explicit", "--rho", "-1")
    assert code == EXIT_NUMERIC
    assert json.loads(out)["results"]["type"]["error"] == "RhoOutOfRange"


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as e:
        main(["analyze"])
    assert e.value.code == EXIT_CONFIG
    code, _, err = run(capsys, "analyze", "exp", "--window", "abc")
    assert code == EXIT_CONFIG and "window" in err


def test_parse_window():
    assert parse_window("10:20") == (10, 20)
    assert parse_window(None) is None
    with pytest.raises(ConfigError):
        parse_window("20:10")


def test_subseq_examples(capsys):
    code, out, _ = run(capsys, "subseq", "sin:lambda=1", "--nu", "even", "--z", "1+0i")
    assert code == EXIT_OK
    res = json.loads(out)["results"]
    assert res["theta"]["nu"]["value"] == pytest.approx(1.0, abs=0.01)

    code, out, _ = run(capsys, "subseq", "sin:lambda=1", "--nu", "even", "--z", "3.14159265358979+0i")
    res = json.loads(out)["results"]
    assert res["theta"]["nu"]["value"] == 0.0
    assert res["rho"]["nu"]["error"] == "AllSkipped"

    code, out, _ = run(capsys, "subseq", "exp", "--nu", "squares", "--z", "0")
    res = json.loads(out)["results"]
    assert res["identity"]["rho_ok"] is True and res["identity"]["tau_ok"] is True


def test_subseq_not_proper(capsys):
    code, _, err = run(capsys, "subseq", "exp", "--nu", "all")
    assert code == EXIT_NUMERIC and "NotProper" in err


def write_config(tmp_path, **fields):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(fields))
    return str(path)


AE_ORDER = {
    "experiment": "ae-order", "source": "sin:lambda=1", "nu": "even", "seed": 7,
    "sampling": {"center": [0, 0], "radius": 2.0, "mode": "uniform", "count": 30},
}


def test_experiment_rerun_byte_identical(capsys, tmp_path):
    out_json, out_csv = tmp_path / "r.json", tmp_path / "r.csv"
    cfg = write_config(tmp_path, **AE_ORDER, output={"json": str(out_json), "csv": str(out_csv)})
    assert main(["experiment", cfg]) == EXIT_OK
    first = out_json.read_bytes()
    rep = json.loads(first)
    assert rep["results"]["exceptional_fraction"] == 0.0
    # the report is itself a config; rerun it with more workers
    assert main(["experiment", str(out_json), "--workers", "4"]) == EXIT_OK
    assert out_json.read_bytes() == first


def test_experiment_missing_seed(capsys, tmp_path):
    bad = {k: v for k, v in AE_ORDER.items() if k != "seed"}
    code, _, err = run(capsys, "experiment", write_config(tmp_path, **bad))
    assert code == EXIT_CONFIG and "seed" in err


def test_experiment_config_errors(capsys, tmp_path):
    code, _, err = run(capsys, "experiment", str(tmp_path / "missing.json"))
    assert code == EXIT_CONFIG
    code, _, err = run(capsys, "experiment", write_config(tmp_path, **{**AE_ORDER, "experiment": "nope"}))
    assert code == EXIT_CONFIG and "experiment" in err
    code, _, err = run(capsys, "experiment", write_config(tmp_path, **{**AE_ORDER, "nu": "bogus"}))
    assert code == EXIT_CONFIG and "nu" in err


def test_normalize_idempotent():
    cfg = normalize_experiment_config(dict(AE_ORDER))
    assert normalize_experiment_config(cfg) == cfg
    assert normalize_experiment_config({"config": cfg, "results": {}}) == cfg


def test_gdelta_experiment_json_has_no_nan(capsys, tmp_path):
    cfg = write_config(tmp_path, experiment="gdelta", source="exp", nu="even", seed=1,
                       disks=[[[0, 0], 1.0]], K_schedule=[100], samples=2)
    code, out, _ = run(capsys, "experiment", cfg)
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["diagnostics"]["degenerate"] is True
    assert rep["results"]["records"][0]["growth"] is None


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "entgrowth.cli", "catalog", "--json"],
                          capture_output=True, text=True, check=True)
    assert any(r["spec"] == "exp" for r in json.loads(proc.stdout))
