"""Command-line interface: outputs, exit codes, determinism."""

import json

import numpy as np
import pytest

from levdens.cli import main

SCATTER_HEADER = ("k,re_t,im_t,re_b,im_b,abs_t_sq,abs_b_sq,"
                  "phi_t,phi_r,phi_r_z,det_residual")


def _read_csv(path):
    lines = path.read_text().strip().split("\n")
    return lines[0], [line.split(",") for line in lines[1:]]


def test_scatter_pt1(tmp_path, capsys):
    rc = main(["scatter", "--potential", "poschl-teller", "--l", "1",
               "--k-max", "10", "--n-k", "60", "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "max unitarity residual" in out
    header, rows = _read_csv(tmp_path / "scatter_poschl-teller.csv")
    assert header == SCATTER_HEADER
    assert len(rows) >= 60
    # reflectionless: |b|^2 column is numerically zero throughout
    col = SCATTER_HEADER.split(",").index("abs_b_sq")
    assert max(float(r[col]) for r in rows) < 1e-10
    # phi_r column is nan (phase of a vanishing amplitude)
    col_r = SCATTER_HEADER.split(",").index("phi_r")
    assert all(r[col_r] == "nan" for r in rows)


def test_scatter_deterministic(tmp_path):
    args = ["scatter", "--potential", "gaussian", "--k-max", "5",
            "--n-k", "40"]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b")])
    fa = (tmp_path / "a" / "scatter_gaussian.csv").read_bytes()
    fb = (tmp_path / "b" / "scatter_gaussian.csv").read_bytes()
    assert fa == fb


def test_density_outputs(tmp_path):
    rc = main(["density", "--potential", "delta", "--g", "-2.0",
               "--k-max", "5", "--n-k", "32", "--L", "25", "--L", "35",
               "--out", str(tmp_path)])
    assert rc == 0
    header, rows = _read_csv(tmp_path / "density_delta.csv")
    assert header.startswith("k,rho_smooth,rho_box_L25,rho_box_L35")
    sidecar = json.loads((tmp_path / "density_delta.json").read_text())
    assert sidecar["potential"] == {"kind": "delta", "g": -2.0}
    assert sidecar["b0"] == -1.0
    assert sidecar["delta_weight"] == pytest.approx(-np.pi)
    # identity residual column stays small on the sampled subset
    cols = header.split(",")
    idx = cols.index("identity_residual")
    vals = [float(r[idx]) for r in rows if r[idx] != "nan"]
    assert vals and max(vals) < 1e-2


def test_levinson_report(tmp_path, capsys):
    rc = main(["levinson", "--potential", "delta", "--g", "-2.0",
               "--k-max", "30", "--n-k", "150", "--out", str(tmp_path)])
    assert rc == 0
    report = json.loads((tmp_path / "levinson_delta.json").read_text())
    assert report["verdict"] == "pass"
    assert report["n_oracle"] == 1
    assert abs(report["n_levinson"] - 1.0) < 0.05
    assert report["b0"] == -1.0
    assert "winding" in report and abs(report["winding"] - 0.5) < 0.02


def test_spec_file_input(tmp_path):
    spec = tmp_path / "well.json"
    spec.write_text(json.dumps({"kind": "square-well",
                                "depth": -1.0, "half_width": 1.0}))
    rc = main(["levinson", "--spec", str(spec),
               "--k-max", "30", "--n-k", "150", "--out", str(tmp_path)])
    assert rc == 0
    report = json.loads((tmp_path / "levinson_well.json").read_text())
    assert report["n_oracle"] == 1


def test_config_validation_exit_codes(tmp_path, capsys):
    # both or neither of --potential/--spec
    assert main(["scatter", "--out", str(tmp_path)]) == 1
    assert main(["scatter", "--potential", "free", "--spec", "x.json",
                 "--out", str(tmp_path)]) == 1
    # fixture-specific flags on the wrong kind
    assert main(["scatter", "--potential", "gaussian", "--g", "1.0",
                 "--out", str(tmp_path)]) == 1
    # bad grid
    assert main(["scatter", "--potential", "free", "--k-min", "-1",
                 "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "error" in err.lower()


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
