import json
import math
import subprocess
import sys

import pytest

from relqfi import DetectorParams, __version__, compute_qfi, decay_factor
from relqfi.cli import main
from relqfi.sweep import FIGURE_POINTS

PI = math.pi


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_qfi_example(capsys):
    out = run_json(capsys, "qfi", "--param", "phi", "--theta", PI / 2, "--tau", 1,
                   "--a", PI, "--w", 0.01)
    vals = [r["fisher"] for r in out["results"]]
    assert [r["method"] for r in out["results"]] == ["closed-form", "bloch-derivative", "sld-oracle"]
    expected = math.exp(-float(decay_factor(PI, 0.01)))
    assert vals == pytest.approx([expected] * 3, rel=1e-6)


def test_qfi_beta(capsys):
    out = run_json(capsys, "qfi", "--param", "beta", "--theta", PI, "--tau", 1,
                   "--beta", 1, "--w", 0.01, "--methods", "bloch-derivative")
    ref = compute_qfi("beta", PI, 1.0, beta=1.0, w=0.01).fisher
    assert out["results"][0]["fisher"] == pytest.approx(ref, rel=1e-14)


def test_qfi_ultrarel_limit(capsys):
    out = run_json(capsys, "qfi", "--param", "phi", "--theta", PI / 3, "--tau", 5,
                   "--ultrarel-limit")
    assert out["results"][0]["fisher"] == pytest.approx(0.75)


def test_rates_numeric_agrees(capsys):
    out = run_json(capsys, "rates", "--trajectory", "uniform", "--a", 1, "--numeric")
    assert out["closed_form"]["A"] == pytest.approx(1 / math.tanh(PI), rel=1e-14)
    assert max(out["relative_difference"].values()) < 1e-4


def test_rates_drifted_is_numeric_only(capsys):
    out = run_json(capsys, "rates", "--trajectory", "drifted", "--a", PI, "--w", 0.05)
    assert "closed_form" not in out and out["numeric"]["A"] > 0


def test_raw_units_conversion(capsys):
    out = run_json(capsys, "qfi", "--param", "phi", "--theta", PI / 2, "--tau", 100,
                   "--a", 2.0, "--raw-units", "--omega0", 2.0, "--mu", 0.1,
                   "--methods", "closed-form")
    g0 = DetectorParams(2.0, 0.1).gamma0
    conv = out["conversion"]
    assert conv["gamma0"] == pytest.approx(g0)
    assert conv["a_rescaled"] == pytest.approx(1.0)
    assert conv["tau_rescaled"] == pytest.approx(100 * g0)
    ref = compute_qfi("phi", PI / 2, 100 * g0, a=1.0).fisher
    assert out["results"][0]["fisher"] == pytest.approx(ref, rel=1e-14)


def test_raw_rates_are_physical(capsys):
    out = run_json(capsys, "rates", "--trajectory", "inertial", "--raw-units",
                   "--omega0", 3.0, "--mu", 0.2)
    assert out["closed_form"]["A"] == pytest.approx(DetectorParams(3.0, 0.2).gamma0, rel=1e-14)


def test_evolve_routes(capsys):
    args = ["evolve", "--theta", 1.0, "--phi", 0.3, "--tau", 2.0, "--a", PI, "--w", 0.01]
    closed = run_json(capsys, *args)
    ode = run_json(capsys, *args, "--ode")
    for k in ("w1", "w2", "w3"):
        assert closed[k] == pytest.approx(ode[k], abs=1e-8)
    assert closed["norm"] <= 1.0


@pytest.mark.parametrize("argv", [
    ["qfi", "--param", "phi", "--theta", 1, "--tau", 1],
    ["qfi", "--param", "phi", "--theta", 1, "--tau", 1, "--a", 1, "--beta", 1],
    ["qfi", "--param", "gamma", "--theta", 1, "--tau", 1, "--a", 1],
    ["qfi", "--param", "phi", "--theta", 1, "--tau", -1, "--a", 1],
    ["qfi", "--param", "phi", "--theta", 1, "--tau", 1, "--a", 0],
    ["rates", "--trajectory", "uniform"],
    ["rates", "--trajectory", "uniform", "--a", 1, "--w", 0.1],
    ["figure", "fig99"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, "--json", *argv)
    assert code == 2
    assert json.loads(err)["exit_code"] == 2


def test_json_flag_after_subcommand(capsys):
    code, _, err = run(capsys, "qfi", "--param", "phi", "--theta", 1, "--tau", 1, "--a", -1, "--json")
    assert code == 2 and json.loads(err)["error"] == "FormulaDomainError"


def test_plain_error_message(capsys):
    code, _, err = run(capsys, "qfi", "--param", "phi", "--theta", 1, "--tau", 1)
    assert code == 2 and err.startswith("relqfi: ")


def test_version(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == 0 and out.strip() == __version__


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "opts.json"
    cfg.write_text(json.dumps({"schema_version": 1, "param": "phi", "theta": PI / 2,
                               "tau": 1.0, "a": PI, "w": 0.01, "methods": ["closed-form"]}))
    from_file = run_json(capsys, "--config", cfg, "qfi")
    override = run_json(capsys, "--config", cfg, "qfi", "--tau", 2.0)
    assert from_file["results"][0]["fisher"] == pytest.approx(
        compute_qfi("phi", PI / 2, 1.0, a=PI, w=0.01).fisher)
    assert override["results"][0]["fisher"] == pytest.approx(
        compute_qfi("phi", PI / 2, 2.0, a=PI, w=0.01).fisher)


@pytest.mark.parametrize("doc", [
    {"schema_version": 2, "tau": 1.0},
    {"schema_version": 1, "bogus": 1.0},
    [1, 2],
])
def test_bad_option_config(capsys, tmp_path, doc):
    cfg = tmp_path / "opts.json"
    cfg.write_text(json.dumps(doc))
    code, _, _ = run(capsys, "--config", cfg, "qfi", "--param", "phi", "--theta", 1,
                     "--tau", 1, "--a", 1)
    assert code == 2


def test_figure_to_file(capsys, tmp_path):
    path = tmp_path / "fig3.csv"
    out = run_json(capsys, "figure", "fig3", "--out", path)
    assert out["rows"] == FIGURE_POINTS and out["errors"] == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "w,phi_closed-form,error"
    assert len(lines) == FIGURE_POINTS + 1


def test_figure_to_stdout(capsys):
    code, out, _ = run(capsys, "figure", "fig8", "--format", "gnuplot")
    assert code == 0 and out.startswith("# w beta_bloch-derivative")


def test_sweep_command(capsys, tmp_path):
    doc = {"schema_version": 1, "param": "theta",
           "axes": [{"name": "tau", "start": 0.0, "stop": 2.0, "count": 4}],
           "fixed": {"theta": 0.0, "a": PI, "w": 0.01}, "format": "jsonl"}
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "sweep", path)
    assert code == 0 and len(out.splitlines()) == 4
    dest = tmp_path / "out.csv"
    summary = run_json(capsys, "sweep", path, "--out", dest, "--format", "csv")
    assert summary["rows"] == 4 and dest.exists()


def test_sweep_invalid_config(capsys, tmp_path):
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps({"schema_version": 1, "param": "phi",
                                "axes": [{"name": "w", "start": 0, "stop": 0.5, "count": 3}],
                                "fixed": {"theta": 1.0, "tau": 1.0, "a": 1.0}}))
    code, _, err = run(capsys, "--json", "sweep", path)
    payload = json.loads(err)
    assert code == 2 and payload["error"] == "ConfigInvalid"
    assert ["w"] == [p[0] for p in payload["problems"]]


def test_verify_single_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "inertial")
    assert code == 0
    assert out.splitlines()[0].startswith("[PASS] inertial")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "relqfi", "--version"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == __version__
