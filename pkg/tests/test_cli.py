import csv
import json

import numpy as np
import pytest

from brainmaps import datasets
from brainmaps.cli import main
from brainmaps.errors import EmptyInput
from brainmaps.svg import curves_svg, emit_svg_curves, emit_svg_map


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_gen_toy_round_trip(tmp_path):
    out = tmp_path / "toy.bin"
    assert main(["gen", "toy", "--n", "1000", "--seed", "7", "--out", str(out)]) == 0
    d = datasets.load(out)
    ref, truth = datasets.generate_toy(1000, 7)
    np.testing.assert_array_equal(d.X, ref.X)
    np.testing.assert_array_equal(d.Y, ref.Y)
    side = json.loads((tmp_path / "toy.bin.truth.json").read_text())
    assert side["theta_star"] == [1.0, 0.0]


def test_gen_erf_sidecar(tmp_path):
    out = tmp_path / "erf.csv"
    argv = ["gen", "erf", "--channels", "10", "--timepoints", "50", "--n", "200",
            "--snr", "1", "--seed", "3", "--out", str(out)]
    assert main(argv) == 0
    side = json.loads((tmp_path / "erf.csv.truth.json").read_text())
    assert len(side["cerf_reference"]) == 500
    assert datasets.load(out).p == 500


def test_missing_out_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["gen", "toy", "--n", "10"])
    assert exc.value.code == 2


def test_bad_flag_value_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["select", "--data", "x", "--out", str(tmp_path), "--kappa", "2"])
    assert exc.value.code == 2


def test_missing_data_is_runtime_error(tmp_path, capsys):
    code = main(["select", "--data", str(tmp_path / "nope.bin"), "--out", str(tmp_path)])
    assert code == 1
    assert "error" in capsys.readouterr().err


@pytest.fixture
def toy_file(tmp_path):
    out = tmp_path / "toy.bin"
    main(["gen", "toy", "--n", "200", "--seed", "0", "--out", str(out)])
    return out


def test_select_single_lambda(toy_file, tmp_path):
    out = tmp_path / "res"
    assert main(["select", "--data", str(toy_file), "--lambda", "0", "--m", "5",
                 "--no-standardize", "--out", str(out)]) == 0
    rows = read_rows(out / "selection.csv")
    assert len(rows) == 1 and float(rows[0]["lambda"]) == 0.0
    payload = json.loads((out / "selection.json").read_text())
    assert payload["schema"] == 1 and payload["best_by_zeta"] == 0.0


def test_select_toy_grid(toy_file, tmp_path):
    out = tmp_path / "res"
    assert main(["select", "--data", str(toy_file), "--grid", "0,10,500,1000", "--m", "10",
                 "--no-standardize", "--svg", "--out", str(out)]) == 0
    rows = read_rows(out / "selection.csv")
    assert list(rows[0]) == ["lambda", "delta", "eta", "zeta", "psi", "beta",
                             "bias", "variance_net", "flags"]
    assert (out / "curves.svg").read_text().count("<polyline") == 3
    assert (out / "best_zeta_map.svg").exists()


def test_select_heuristic_labels(tmp_path):
    data = tmp_path / "erf.bin"
    main(["gen", "erf", "--channels", "3", "--timepoints", "8", "--n", "30", "--seed", "1",
          "--out", str(data)])
    out = tmp_path / "res"
    assert main(["select", "--data", str(data), "--mode", "heuristic", "--grid", "1,10",
                 "--m", "5", "--out", str(out)]) == 0
    header = (out / "selection.csv").read_text().splitlines()[0].split(",")
    assert "eta_tilde" in header and "beta_tilde" in header and "eta" not in header
    assert json.loads((out / "selection.json").read_text())["mode"] == "heuristic"


def test_report_command(toy_file, tmp_path):
    out = tmp_path / "rep"
    assert main(["report", "--data", str(toy_file), "--lambda", "10", "--m", "5",
                 "--no-standardize", "--out", str(out)]) == 0
    obj = json.loads((out / "report.json").read_text())
    perf = obj["performance"]
    assert abs(perf["mean_oob_loss"] - perf["bias"] - perf["variance_net"]) <= 1e-12
    assert obj["metrics"]["mode"] == "exact"


def test_svg_curves_structure():
    rows = [{"lam": l, "delta": 0.9, "eta": 0.5, "zeta": 0.7} for l in (0.0, 1.0, 10.0)]
    text = curves_svg(rows)
    assert text.count("<polyline") == 3
    assert text == curves_svg(rows)
    with pytest.raises(EmptyInput):
        curves_svg([])


def test_svg_map_paths(tmp_path):
    w = np.arange(8, dtype=float) - 3.5
    emit_svg_map(w, (2, 4), tmp_path / "m.svg")
    text = (tmp_path / "m.svg").read_text()
    assert text.count("<path") == 2
    emit_svg_map(w, (2, 4), tmp_path / "m2.svg")
    assert (tmp_path / "m2.svg").read_bytes() == (tmp_path / "m.svg").read_bytes()


def test_svg_curves_file(tmp_path):
    emit_svg_curves([{"lam": 1.0, "delta": 1.0, "eta": 1.0, "zeta": 1.0}], tmp_path / "c.svg")
    assert (tmp_path / "c.svg").read_text().startswith("<?xml")


def test_table1_command(tmp_path, capsys):
    out = tmp_path / "t1.csv"
    assert main(["table1", "--n", "200", "--m", "10", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "lambda" in printed and "*" in printed
    rows = read_rows(out)
    assert [float(r["lambda"]) for r in rows] == [0, 0.001, 0.01, 0.1, 1, 10, 50, 100, 250, 500, 1000]
