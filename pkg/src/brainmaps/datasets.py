"""Trial datasets: container, standardization, synthetic generators and file IO.

Binary layout (little-endian)::

    magic   4 bytes  b"IMSD"
    version u32      1
    n, p    u64, u64
    c, t    u64, u64 (both 0 when there is no channel x time layout)
    labels  n x i8
    X       n*p x f64, row-major

CSV layout: header ``label,f0,...,f{p-1}``, one trial per row.

Channel x time data are flattened channel-major: all timepoints of
channel 0, then all timepoints of channel 1, and so on.
"""

import csv
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from .errors import (
    LabelError,
    MagicMismatch,
    ParseError,
    PatternShapeMismatch,
    TruncatedFile,
)
from .geometry import normalize

MAGIC = b"IMSD"
VERSION = 1
_HEADER = struct.Struct("<4sIQQQQ")

TOY_MEAN = np.array([1.5, 0.0])
TOY_COV = np.array([[1.02, -0.3], [-0.3, 0.15]])


@dataclass(frozen=True)
class Dataset:
    """``n`` trials by ``p`` features with labels in {+1, -1}."""

    X: np.ndarray
    Y: np.ndarray
    layout: Optional[Tuple[int, int]] = None
    name: str = ""

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64)
        Y = np.array(self.Y)
        if X.ndim != 2:
            raise ValueError(f"X must be 2-D, got shape {X.shape}")
        if Y.shape != (X.shape[0],):
            raise ValueError(f"Y has shape {Y.shape}, expected ({X.shape[0]},)")
        if not np.all((Y == 1) | (Y == -1)):
            raise LabelError("labels must be +1 or -1")
        Y = Y.astype(np.int8)
        layout = self.layout
        if layout is not None:
            layout = (int(layout[0]), int(layout[1]))
            if layout[0] * layout[1] != X.shape[1]:
                raise ValueError(f"layout {layout} does not match p={X.shape[1]}")
        X.setflags(write=False)
        Y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "layout", layout)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    def subset(self, idx):
        return Dataset(self.X[idx], self.Y[idx], self.layout, self.name)


@dataclass(frozen=True)
class GroundTruth:
    """Reference maps for a dataset, in its raw feature space.

    ``theta_star`` is the true decoding direction (exact mode),
    ``cerf_reference`` the population class-mean contrast.
    """

    theta_star: Optional[np.ndarray] = None
    cerf_reference: Optional[np.ndarray] = None
    layout: Optional[Tuple[int, int]] = field(default=None)

    def to_json(self):
        def enc(v):
            return None if v is None else [float(x) for x in v]

        return {
            "schema": 1,
            "theta_star": enc(self.theta_star),
            "cerf_reference": enc(self.cerf_reference),
            "layout": None if self.layout is None else list(self.layout),
        }

    @classmethod
    def from_json(cls, obj):
        def dec(v):
            return None if v is None else normalize(np.asarray(v, dtype=float))

        layout = obj.get("layout")
        return cls(
            theta_star=dec(obj.get("theta_star")),
            cerf_reference=dec(obj.get("cerf_reference")),
            layout=None if layout is None else tuple(layout),
        )


# -- standardization ---------------------------------------------------------

def standardize(d):
    """Center every feature and scale it to unit (population) std.

    Constant columns are centered only and get std 0 in the returned
    parameters. Returns ``(standardized dataset, mean, std)``.
    """
    mean = d.X.mean(axis=0)
    std = d.X.std(axis=0)
    std[std < 1e-12] = 0.0
    return Dataset(apply_standardization(d.X, mean, std), d.Y, d.layout, d.name), mean, std


def apply_standardization(X, mean, std):
    scale = np.where(std > 0, std, 1.0)
    return (X - mean) / scale


# -- generators --------------------------------------------------------------

def generate_toy(n_per_class=1000, seed=0):
    """Two-dimensional toy problem with correlated Gaussian noise.

    Class +1 is drawn from N([1.5, 0], S), class -1 from N([-1.5, 0], S)
    with S = [[1.02, -0.3], [-0.3, 0.15]]. Only the first feature carries
    class information, so the true direction is [1, 0].
    """
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(TOY_COV)
    noise = rng.standard_normal((2 * n_per_class, 2)) @ chol.T
    means = np.vstack([np.tile(TOY_MEAN, (n_per_class, 1)), np.tile(-TOY_MEAN, (n_per_class, 1))])
    Y = np.repeat(np.array([1, -1], dtype=np.int8), n_per_class)
    truth = GroundTruth(theta_star=np.array([1.0, 0.0]))
    return Dataset(means + noise, Y, name="toy"), truth


def default_erf_pattern(channels, timepoints):
    """Smooth evoked bump in a contiguous channel block and time window.

    The bump peaks at 37% of the epoch, roughly where an N170 sits in a
    -200..800 ms window.
    """
    block = max(1, round(channels / 4))
    start = min(channels // 3, channels - block)
    spatial = np.zeros(channels)
    # raised-cosine taper across the block
    k = np.arange(block)
    spatial[start:start + block] = np.sin(np.pi * (k + 1) / (block + 1))

    tau = np.arange(timepoints, dtype=float)
    center = 0.37 * (timepoints - 1)
    width = max(timepoints / 20.0, 0.5)
    temporal = np.exp(-0.5 * ((tau - center) / width) ** 2)
    temporal[np.abs(tau - center) > 3 * width] = 0.0
    if not temporal.any():
        temporal[int(round(center))] = 1.0
    return np.outer(spatial, temporal)


def generate_erf(channels, timepoints, n_per_class, snr=1.0, pattern=None, seed=0):
    """Evoked-response-like trials: class +1 carries ``pattern``, class -1 is noise.

    Noise is i.i.d. Gaussian with std ``rms(pattern) / snr`` (``1 / snr`` for
    an all-zero pattern). ``snr=inf`` gives noiseless trials.

    With isotropic noise the optimal linear direction is the pattern
    itself, so both ``theta_star`` and ``cerf_reference`` of the returned
    truth equal the flattened, normalized pattern.
    """
    if channels < 1 or timepoints < 1:
        raise ValueError("channels and timepoints must be >= 1")
    if not snr > 0:
        raise ValueError("snr must be positive")
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    if pattern is None:
        pattern = default_erf_pattern(channels, timepoints)
    pattern = np.asarray(pattern, dtype=float)
    if pattern.shape != (channels, timepoints):
        raise PatternShapeMismatch(
            f"pattern has shape {pattern.shape}, expected ({channels}, {timepoints})"
        )
    flat = pattern.reshape(-1)
    rms = float(np.sqrt(np.mean(flat ** 2)))
    noise_std = (rms if rms > 0 else 1.0) / snr

    rng = np.random.default_rng(seed)
    p = channels * timepoints
    noise = rng.standard_normal((2 * n_per_class, p)) * noise_std
    X = noise
    X[:n_per_class] += flat
    Y = np.repeat(np.array([1, -1], dtype=np.int8), n_per_class)

    ref = normalize(flat) if rms > 0 else None
    truth = GroundTruth(theta_star=ref, cerf_reference=ref, layout=(channels, timepoints))
    return Dataset(X, Y, layout=(channels, timepoints), name="erf"), truth


# -- IO ----------------------------------------------------------------------

def save_csv(d, path):
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label"] + [f"f{j}" for j in range(d.p)])
        for y, row in zip(d.Y, d.X):
            writer.writerow([int(y)] + [repr(float(v)) for v in row])


def _parse_label(text, line):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"label {text!r} is not a number", line) from None
    if value not in (1.0, -1.0):
        raise LabelError(f"label {text!r} is not +1 or -1", line)
    return int(value)


def load_csv(path):
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise ParseError("empty file", 1)
        if header[0].strip() != "label":
            raise ParseError("first header column must be 'label'", 1)
        p = len(header) - 1
        if p < 1:
            raise ParseError("no feature columns", 1)
        labels, rows = [], []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != p + 1:
                raise ParseError(f"expected {p + 1} fields, got {len(row)}", line)
            labels.append(_parse_label(row[0].strip(), line))
            try:
                rows.append([float(c) for c in row[1:]])
            except ValueError as exc:
                raise ParseError(str(exc), line) from None
    if not rows:
        raise ParseError("no data rows", 2)
    return Dataset(np.array(rows), np.array(labels), name=path.stem)


def save_binary(d, path):
    c, t = d.layout if d.layout is not None else (0, 0)
    with Path(path).open("wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, d.n, d.p, c, t))
        fh.write(d.Y.astype("<i1").tobytes())
        fh.write(d.X.astype("<f8").tobytes(order="C"))


def load_binary(path):
    path = Path(path)
    buf = path.read_bytes()
    if len(buf) < 4 or buf[:4] != MAGIC:
        raise MagicMismatch(f"{path}: bad magic {buf[:4]!r}")
    if len(buf) < _HEADER.size:
        raise TruncatedFile(f"{path}: header needs {_HEADER.size} bytes, file has {len(buf)}")
    _, version, n, p, c, t = _HEADER.unpack_from(buf)
    if version != VERSION:
        raise ParseError(f"unsupported version {version}")
    need = _HEADER.size + n + 8 * n * p
    if len(buf) < need:
        raise TruncatedFile(f"{path}: expected {need} bytes, got {len(buf)}")
    off = _HEADER.size
    Y = np.frombuffer(buf, dtype="<i1", count=n, offset=off)
    X = np.frombuffer(buf, dtype="<f8", count=n * p, offset=off + n).reshape(n, p)
    layout = (c, t) if c and t else None
    return Dataset(X, Y, layout=layout, name=path.stem)


def load(path):
    """Load a dataset, choosing the format from the file's magic bytes."""
    with Path(path).open("rb") as fh:
        head = fh.read(4)
    return load_binary(path) if head == MAGIC else load_csv(path)


def save(d, path):
    if Path(path).suffix.lower() == ".csv":
        save_csv(d, path)
    else:
        save_binary(d, path)
