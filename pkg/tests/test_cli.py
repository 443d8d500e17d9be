import csv
import io
import json
import subprocess
import sys

import pytest

from qutritcodec import cli
from qutritcodec.optics.experiment import ExperimentConfig, Sweep

SMALL = {
    "reflectance": 0.25,
    "seed": 3,
    "imperfections": {"mode_overlap": 0.99, "mz_visibility": 0.97, "phase_drift_rate": 0.003,
                      "stabilization_residual": 0.01, "detector_efficiency": 0.6, "dark_count_rate": 50.0},
    "sweeps": [{"qubit": 1, "theta": 90.0, "phi": [0.0, 90.0]}, {"qubit": 2, "theta": 70.53, "phi": 30.0}],
}


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


@pytest.fixture
def small_config(tmp_path):
    p = tmp_path / "small.json"
    p.write_text(json.dumps(SMALL))
    return str(p)


def test_codec_single_row(capsys):
    code, out, _ = run(["codec", "--theta1", "90", "--phi1", "0", "--theta2", "90", "--phi2", "0", "--decode", "1"], capsys)
    assert code == 0
    assert out.splitlines()[0] == ",".join(cli.CODEC_COLUMNS)
    (row,) = rows_of(out)
    assert float(row["fidelity"]) == pytest.approx(1.0)
    assert float(row["encode_probability"]) == pytest.approx(0.75)


def test_codec_ladder_and_qutrit(capsys):
    code, out, _ = run(["codec", "--n", "3", "--decode", "2"], capsys)
    assert code == 0 and float(rows_of(out)[0]["fidelity"]) == pytest.approx(1.0)
    code, out, _ = run(["codec", "--qutrit1", "1", "1j", "0", "--qutrit2", "0.6", "0", "0.8", "--decode", "2"], capsys)
    assert code == 0 and float(rows_of(out)[0]["fidelity"]) == pytest.approx(1.0)


def test_codec_average_json(capsys):
    code, out, _ = run(["codec", "--decode", "joint", "--average", "--samples", "20000", "--seed", "7",
                        "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert doc["columns"] == list(cli.AVERAGE_COLUMNS)
    assert abs(doc["rows"][0]["fidelity"] - doc["rows"][0]["reference_fidelity"]) < 3e-3


def test_csv_uses_full_precision(capsys):
    _, out, _ = run(["codec", "--theta1", "60", "--theta2", "45", "--decode", "joint"], capsys)
    value = rows_of(out)[0]["fidelity"]
    assert float(value) == float(format(float(value), ".17g"))
    assert len(value.replace(".", "").lstrip("0")) >= 15


@pytest.mark.parametrize(
    "argv",
    [
        ["codec", "--decode", "3"],
        ["codec", "--theta1", "200"],
        ["codec", "--average", "--decode", "1"],
        ["codec", "--qutrit1", "0", "0", "0", "--qutrit2", "1", "0", "0"],
        ["hom", "--R", "0"],
        ["hom", "--R", "0.25", "--visibility", "0.9"],
        ["experiment", "--config", "does-not-exist"],
        ["optimize", "--restarts", "0"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert err.startswith("error:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["codec", "--format", "xml"])
    assert exc.value.code == 2


def test_config_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({**SMALL, "colour": "red"}))
    assert run(["experiment", "--config", str(bad)], capsys)[0] == 2
    bad.write_text(json.dumps({**SMALL, "reflectance": 0.7}))
    assert run(["experiment", "--config", str(bad)], capsys)[0] == 2
    bad.write_text("{not json")
    assert run(["experiment", "--config", str(bad)], capsys)[0] == 2


def test_never_encodable_input_exits_3(capsys):
    code, _, err = run(["codec", "--theta1", "180", "--theta2", "0", "--decode", "1"], capsys)
    assert code == 3
    assert "encoding" in err


def test_hom_header(capsys):
    code, out, _ = run(["hom", "--R", "0.25", "--points", "41"], capsys)
    assert code == 0
    meta = dict(ln[2:].split("=", 1) for ln in out.splitlines() if ln.startswith("# "))
    assert float(meta["visibility"]) == pytest.approx(3 / 7, abs=1e-6)
    rows = rows_of(out)
    assert list(rows[0]) == list(cli.HOM_COLUMNS)
    assert len(rows) == 41


def test_experiment_columns_and_values(small_config, capsys):
    code, out, _ = run(["experiment", "--config", small_config], capsys)
    assert code == 0
    rows = rows_of(out)
    assert list(rows[0]) == list(cli.ROW_COLUMNS)
    assert len(rows) == 3
    assert all(0.9 < float(r["fidelity"]) < 1.0 for r in rows)


def test_experiment_workers_do_not_change_output(small_config, capsys):
    _, serial, _ = run(["experiment", "--config", small_config, "--mode", "shot-noise"], capsys)
    _, parallel, _ = run(["experiment", "--config", small_config, "--mode", "shot-noise", "--workers", "2"], capsys)
    assert serial == parallel


def test_optimize_report(capsys):
    code, out, _ = run(["optimize", "--restarts", "1", "--seed", "1", "--samples", "1000"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert set(doc) >= {"decoder", "splitting_ratio"}
    assert abs(doc["decoder"]["gap"]) < 1e-3
    assert doc["splitting_ratio"]["R_star"] == pytest.approx(0.25, abs=1e-4)


def test_out_file(tmp_path, capsys):
    target = tmp_path / "o.csv"
    code, out, _ = run(["codec", "--out", str(target)], capsys)
    assert code == 0 and out == ""
    assert target.read_text().startswith("code,decode")


def test_config_round_trip(tmp_path):
    cfg = ExperimentConfig.from_dict(SMALL)
    path = tmp_path / "rt.json"
    cfg.dump(path)
    again = ExperimentConfig.load(path)
    assert again == cfg
    assert ExperimentConfig.from_dict(again.to_dict()) == cfg


def test_shipped_configs_load():
    for name in ("ideal", "lab"):
        cfg = cli._load_config(name)
        assert sum(len(s.phis) for s in cfg.sweeps) == 95
        assert {s.theta for s in cfg.sweeps} == {90.0, 78.46, 70.53}


def test_sweep_validation():
    assert Sweep.from_dict({"qubit": 2, "theta": 90, "phi": {"start": 0, "stop": 180, "step": 10}}).phis[-1] == 180.0
    with pytest.raises(ValueError):
        Sweep.from_dict({"qubit": 3, "theta": 90, "phi": 0})
    with pytest.raises(ValueError):
        Sweep.from_dict({"qubit": 1, "theta": 90, "phi": 400})


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qutritcodec", "codec", "--format", "json"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["command"] == "codec"
