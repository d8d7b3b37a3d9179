import csv
import io
import json

import numpy as np
import pytest

from cubicwkb.cli import EXIT_AMBIGUOUS, EXIT_OK, EXIT_USAGE, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_usage_error(capsys):
    code, _, _ = run_cli(capsys, "classify", "--a", "nonsense", "--b", "0")
    assert code == EXIT_USAGE


def test_classify_symmetric(capsys):
    code, out, _ = run_cli(capsys, "classify", "--a", "0", "--b", "0")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["class_code"] == "000"
    assert len(payload["edges"]) == 5


def test_classify_quantizing_with_svg(tmp_path, capsys, sol_11):
    svg_path = tmp_path / "complex.svg"
    code, out, _ = run_cli(
        capsys,
        "classify",
        "--a", repr(sol_11.a.real),
        "--b", repr(sol_11.b.real),
        "--svg", str(svg_path),
    )
    assert code == EXIT_OK
    assert json.loads(out)["class_code"] == "320"
    svg = svg_path.read_text()
    assert svg.startswith("<svg")
    assert svg.count("<polyline") == 9


def test_trace_json(capsys):
    code, out, _ = run_cli(capsys, "trace", "--a", "2", "--b", "0")
    assert code == EXIT_OK
    lines = json.loads(out)
    assert len(lines) == 9  # three simple turning points


def test_poles_csv_schema(tmp_path, capsys):
    out_path = tmp_path / "lattice.csv"
    code, _, err = run_cli(
        capsys, "poles", "--nmax", "2", "--mmax", "2", "--out", str(out_path)
    )
    assert code == EXIT_OK
    rows = list(csv.reader(out_path.open()))
    assert rows[0] == ["n", "m", "re_a", "im_a", "re_b", "im_b", "residual", "rho_max"]
    assert len(rows) == 5
    data = {(int(r[0]), int(r[1])): [float(x) for x in r[2:]] for r in rows[1:]}
    assert data[(1, 1)][0] == pytest.approx(-2.3476, abs=2e-4)
    assert data[(2, 2)][0] == pytest.approx(-5.6535, abs=5e-4)
    # conjugate off-diagonal rows
    assert data[(1, 2)][1] == pytest.approx(-data[(2, 1)][1], abs=1e-8)
    # the summary line reports the sector bound
    assert "min |arg a|" in err
    min_arg = min(
        abs(np.angle(complex(v[0], v[1]))) for v in data.values()
    )
    assert min_arg > 4 * np.pi / 5


def test_verify_symmetric(capsys):
    code, out, _ = run_cli(capsys, "verify", "--a", "0", "--b", "0")
    assert code == EXIT_OK
    report = json.loads(out)
    sig = {int(k): complex(v[0], v[1]) for k, v in report["sigma"].items()}
    for k in range(-2, 3):
        assert sig[k] == pytest.approx(sig[0], abs=1e-8)
    assert max(abs(complex(*r)) for r in report["admissibility_residuals"]) < 1e-8
    assert not report["tritronquee"]


def test_verify_at_solution(capsys, sol_11):
    code, out, _ = run_cli(
        capsys,
        "verify",
        "--a", repr(sol_11.a.real),
        "--b", repr(sol_11.b.real),
        "--threshold", "0.1",
    )
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["tritronquee"]
    assert report["tritronquee_margin"] < 0.1


def test_constants(capsys):
    code, out, _ = run_cli(capsys, "constants")
    assert code == EXIT_OK
    vals = {}
    for line in out.splitlines():
        key, _, val = line.partition("=")
        vals[key.strip()] = float(val)
    assert vals["mu_star"] == pytest.approx(-3158.92, rel=1e-3)
    assert vals["a_star"] == pytest.approx(-4.0874, rel=1e-3)
    assert vals["b_star"] == pytest.approx(-0.1470, rel=1e-3)


def test_table2_format(capsys):
    code, out, _ = run_cli(capsys, "table2")
    assert code == EXIT_OK
    assert "a1" in out and "reference" in out
    assert "-2.348" in out
    assert "unknown" in out  # b2 and mu2 rows have no reference values


def test_config_file_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("nmax = 1\nmmax = 1\n")
    out_path = tmp_path / "lat.csv"
    code, _, _ = run_cli(
        capsys, "--config", str(cfg), "poles", "--out", str(out_path)
    )
    assert code == EXIT_OK
    rows = list(csv.reader(out_path.open()))
    assert len(rows) == 2  # header + single cell
