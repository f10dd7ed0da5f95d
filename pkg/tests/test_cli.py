import json

from lapsewalk.cli import main
from lapsewalk.report import emit_json, parse_json


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_predict_text(capsys):
    code, out, _ = run_cli(capsys, "predict", "-p", "0.6", "-q", "0.2",
                           "-r", "0.2", "--theta", "0.5")
    assert code == 0
    assert "regime = diffusive" in out
    assert "lln_limit = 0.2499999999" in out  # 17-significant-digit floats
    assert "phi = 0.604166666" in out


def test_predict_json_superdiffusive(capsys):
    code, out, _ = run_cli(capsys, "predict", "-p", "0.95", "-q", "0.05",
                           "-r", "0", "--theta", "0.9", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["schema_version"] == "1"
    assert rep["derived"]["regime"] == "superdiffusive"
    assert rep["predictions"]["v_limit"] > 1.0


def test_predict_simplex_violation_exit_2(capsys):
    code, _, err = run_cli(capsys, "predict", "-p", "0.5", "-q", "0.2",
                           "-r", "0.2", "--theta", "0.5")
    assert code == 2
    assert "simplex" in err


def test_predict_negative_alpha_exit_2(capsys):
    code, _, err = run_cli(capsys, "predict", "-p", "0.2", "-q", "0.6",
                           "-r", "0.2", "--theta", "0.5")
    assert code == 2


def test_predict_degenerate_exit_2(capsys):
    code, _, err = run_cli(capsys, "predict", "-p", "1", "-q", "0", "-r", "0",
                           "--theta", "0.3")
    assert code == 2
    assert "phi" in err


def test_simulate_csv_deterministic(capsys, tmp_path):
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ("simulate", "-n", "300", "-t", "400", "--seed", "9",
            "--snapshots", "100,300")
    assert main([*args, "-o", str(f1)]) == 0
    assert main([*args, "--workers", "4", "-o", str(f2)]) == 0
    b1, b2 = f1.read_bytes(), f2.read_bytes()
    assert b1 == b2
    head = b1.split(b"\r\n")[0].decode()
    assert head.startswith("n,count,mean_s")


def test_exact_csv_and_cap(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "exact", "-n", "64")
    assert code == 0
    assert out.splitlines()[0].startswith("n,mean_s,var_s,mean_z")
    code, _, err = run_cli(capsys, "exact", "-n", "500", "--distribution")
    assert code == 2
    assert "cap" in err.lower()


def test_exact_distribution_json(capsys):
    code, out, _ = run_cli(capsys, "exact", "-n", "3", "--distribution",
                           "--format", "json")
    assert code == 0
    rep = json.loads(out)
    masses = {(d["s"], d["z"]): d["probability"]
              for d in rep["results"]["distribution"]}
    assert abs(sum(masses.values()) - 1.0) < 1e-12
    assert (3, 3) in masses


def test_experiment_lln_report(tmp_path):
    out = tmp_path / "lln.json"
    code = main(["experiment", "lln", "-n", "1000", "-t", "400", "--seed",
                 "21", "-o", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["kind"] == "lln"
    assert abs(rep["results"]["predicted"] - 0.25) < 1e-12
    assert abs(rep["results"]["z_predicted"] - 2.0 / 3.0) < 1e-12
    assert rep["pass"] is True
    # byte-identical rerun
    out2 = tmp_path / "lln2.json"
    main(["experiment", "lln", "-n", "1000", "-t", "400", "--seed", "21",
          "-o", str(out2)])
    assert out.read_bytes() == out2.read_bytes()


def test_experiment_gate_failure_exit_1(tmp_path):
    out = tmp_path / "clt.json"
    code = main(["experiment", "clt", "-n", "200", "-t", "300", "--seed",
                 "4", "--gate", "1e-9", "-o", str(out)])
    assert code == 1
    rep = json.loads(out.read_text())
    assert rep["pass"] is False


def test_experiment_wrong_regime_exit_2(capsys):
    code, _, err = run_cli(capsys, "experiment", "critical", "-p", "0.6",
                           "-q", "0.2", "-r", "0.2", "--theta", "0.5",
                           "-n", "100", "-t", "50", "--seed", "1")
    assert code == 2
    assert "alpha" in err


def test_experiment_csv_and_plot(tmp_path):
    rep = tmp_path / "r.json"
    csv = tmp_path / "r.csv"
    svg = tmp_path / "r.svg"
    code = main(["experiment", "lln", "-n", "512", "-t", "200", "--seed", "2",
                 "-o", str(rep), "--csv", str(csv), "--plot", str(svg)])
    assert code == 0
    assert csv.read_text().startswith("n,")
    text = svg.read_text()
    assert text.startswith("<?xml")
    assert "<svg" in text and "polyline" in text


def test_config_file_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# experiment defaults\n"
        "p = 0.95\nq = 0.05\nr = 0\ntheta = 0.9\n"
        "steps = 123\n"
    )
    code, out, _ = run_cli(capsys, "predict", "--config", str(cfg),
                           "--format", "json")
    assert code == 0
    assert json.loads(out)["derived"]["regime"] == "superdiffusive"
    # flag beats config
    code, out, _ = run_cli(capsys, "predict", "--config", str(cfg),
                           "--theta", "0.2", "--format", "json")
    assert code == 0
    assert json.loads(out)["derived"]["regime"] == "diffusive"


def test_json_roundtrip():
    obj = {"schema_version": "1", "x": 0.1 + 0.2, "nested": {"k": [1, 2.5]}}
    assert parse_json(emit_json(obj)) == obj


def test_regime_scan_cli(tmp_path):
    out = tmp_path / "scan.json"
    code = main(["experiment", "regime-scan", "-p", "0.9", "-q", "0.05",
                 "-r", "0.05", "--alphas", "0.2,0.75", "--n-max", "16384",
                 "-o", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    rows = rep["results"]["scan"]
    assert [row["regime"] for row in rows] == ["diffusive", "superdiffusive"]
    assert rep["pass"] is True
