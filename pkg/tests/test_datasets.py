import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from brainmaps import datasets
from brainmaps.datasets import Dataset, generate_erf, generate_toy, standardize
from brainmaps.errors import (
    LabelError, MagicMismatch, ParseError, PatternShapeMismatch, TruncatedFile, ZeroVector,
)
from brainmaps.geometry import normalize
from brainmaps.metrics import cerf_brain_map


def test_dataset_rejects_bad_labels():
    with pytest.raises(LabelError):
        Dataset(np.zeros((2, 1)), [1, 0])


def test_dataset_layout_must_match():
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 6)), [1, -1], layout=(2, 2))


def test_standardize_two_point_column():
    d = Dataset(np.array([[1.0], [3.0]]), [1, -1])
    s, mean, std = standardize(d)
    np.testing.assert_allclose(s.X[:, 0], [-1, 1])
    assert mean[0] == 2.0
    assert std[0] == 1.0  # population convention


def test_standardize_constant_column():
    d = Dataset(np.array([[5.0, 1], [5.0, 2], [5.0, 4]]), [1, -1, 1])
    s, mean, std = standardize(d)
    np.testing.assert_array_equal(s.X[:, 0], 0.0)
    assert std[0] == 0.0


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(2, 30), st.integers(1, 6)),
              elements=st.floats(-1e3, 1e3, allow_nan=False)))
def test_standardize_properties(X):
    Y = np.where(np.arange(X.shape[0]) % 2 == 0, 1, -1)
    s, _, std = standardize(Dataset(X, Y))
    assert np.all(np.abs(s.X.mean(axis=0)) < 1e-10)
    live = std > 0
    np.testing.assert_allclose(s.X[:, live].std(axis=0), 1.0, atol=1e-10)
    s2, _, _ = standardize(s)
    np.testing.assert_allclose(s2.X, s.X, atol=1e-10)


def test_toy_shapes_and_truth():
    d, truth = generate_toy(1000, seed=7)
    assert (d.n, d.p) == (2000, 2)
    np.testing.assert_array_equal(truth.theta_star, [1.0, 0.0])
    diff = d.X[d.Y == 1].mean(0) - d.X[d.Y == -1].mean(0)
    # CLT bound on each class mean, from the stated covariance
    bound = 3 * np.sqrt(np.diag(datasets.TOY_COV) / 1000)
    assert np.all(np.abs(diff - [3.0, 0.0]) < 2 * bound)


def test_toy_minimal_and_reproducible():
    d, _ = generate_toy(1, seed=4)
    assert d.n == 2 and sorted(d.Y.tolist()) == [-1, 1]
    a, _ = generate_toy(50, seed=3)
    b, _ = generate_toy(50, seed=3)
    assert a.X.tobytes() == b.X.tobytes()


def test_toy_least_squares_is_misleading():
    d, truth = generate_toy(1000, seed=7)
    w = np.linalg.lstsq(d.X, d.Y.astype(float), rcond=None)[0]
    # oracle run: 0.4523
    assert normalize(w) @ truth.theta_star == pytest.approx(0.4523, abs=1e-3)
    assert normalize(w) @ truth.theta_star < 0.9


def test_erf_noiseless_limit():
    pattern = datasets.default_erf_pattern(6, 20)
    d, truth = generate_erf(6, 20, 30, snr=np.inf, seed=1)
    raw = cerf_brain_map(d, standardize_features=False)
    np.testing.assert_allclose(raw, normalize(pattern.ravel()), atol=1e-6)
    np.testing.assert_allclose(truth.cerf_reference, normalize(pattern.ravel()))
    assert d.layout == (6, 20)


def test_erf_channel_major_flattening():
    pattern = np.zeros((3, 4))
    pattern[1, 2] = 1.0
    d, _ = generate_erf(3, 4, 2, snr=np.inf, pattern=pattern, seed=0)
    assert d.X[0, 1 * 4 + 2] == 1.0
    assert np.count_nonzero(d.X[0]) == 1


def test_erf_pattern_shape_checked():
    with pytest.raises(PatternShapeMismatch):
        generate_erf(3, 4, 2, pattern=np.ones((4, 3)))


def test_erf_zero_pattern_contrast_vanishes():
    norms = []
    for n in (50, 5000):
        d, truth = generate_erf(2, 3, n, snr=1.0, pattern=np.zeros((2, 3)), seed=0)
        diff = d.X[d.Y == 1].mean(0) - d.X[d.Y == -1].mean(0)
        norms.append(np.linalg.norm(diff))
    assert truth.theta_star is None
    assert norms[1] < norms[0] / 5
    d, _ = generate_erf(2, 3, 4, snr=np.inf, pattern=np.zeros((2, 3)), seed=0)
    with pytest.raises(ZeroVector):
        cerf_brain_map(d, standardize_features=False)


def test_erf_oracle_run():
    d, truth = generate_erf(10, 50, 200, snr=1.0, seed=3)
    raw = cerf_brain_map(d, standardize_features=False)
    # oracle run: 0.99455 on raw features
    assert raw @ truth.cerf_reference == pytest.approx(0.99455, abs=1e-4)
    assert raw @ truth.cerf_reference > 0.8


def test_csv_round_trip(tmp_path):
    d, _ = generate_toy(10, seed=1)
    datasets.save_csv(d, tmp_path / "d.csv")
    back = datasets.load_csv(tmp_path / "d.csv")
    np.testing.assert_allclose(back.X, d.X, rtol=1e-12, atol=0)
    np.testing.assert_array_equal(back.Y, d.Y)
    header = (tmp_path / "d.csv").read_text().splitlines()[0]
    assert header == "label,f0,f1"


def test_csv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("label,f0\n1,0.5\n0,1.5\n")
    with pytest.raises(LabelError) as exc:
        datasets.load_csv(bad)
    assert exc.value.line == 3
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ParseError):
        datasets.load_csv(empty)
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("label,f0,f1\n1,0.5\n")
    with pytest.raises(ParseError):
        datasets.load_csv(ragged)


def test_binary_round_trip(tmp_path):
    d, _ = generate_erf(4, 8, 5, 1.0, seed=2)
    datasets.save_binary(d, tmp_path / "d.bin")
    back = datasets.load_binary(tmp_path / "d.bin")
    assert back.X.tobytes() == d.X.tobytes()
    assert back.Y.tobytes() == d.Y.tobytes()
    assert back.layout == (4, 8)


def test_binary_header_layout(tmp_path):
    d, _ = generate_toy(3, seed=0)
    path = tmp_path / "t.bin"
    datasets.save_binary(d, path)
    raw = path.read_bytes()
    assert raw[:4] == b"IMSD"
    assert int.from_bytes(raw[4:8], "little") == 1
    assert int.from_bytes(raw[8:16], "little") == 6
    assert int.from_bytes(raw[16:24], "little") == 2
    assert raw[24:40] == bytes(16)
    assert len(raw) == 40 + 6 + 6 * 2 * 8


def test_binary_errors(tmp_path):
    d, _ = generate_toy(3, seed=0)
    path = tmp_path / "t.bin"
    datasets.save_binary(d, path)
    raw = path.read_bytes()
    (tmp_path / "magic.bin").write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(MagicMismatch):
        datasets.load_binary(tmp_path / "magic.bin")
    (tmp_path / "short.bin").write_bytes(raw[:-1])
    with pytest.raises(TruncatedFile):
        datasets.load_binary(tmp_path / "short.bin")
