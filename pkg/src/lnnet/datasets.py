"""Labeled point sets: generators and CSV persistence.

CSV layout: header ``x1,...,xd,label``, one sample per row, ``\\n`` newlines.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import DEFAULT
from .errors import ParseError, ValidationError
from .linalg import psd_cholesky
from .rng import SplitMix64
from .tensor_core import as_mat


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    points: np.ndarray   # d x m, one column per sample
    labels: np.ndarray   # m integer class ids

    def __post_init__(self):
        X = as_mat(self.points).copy()
        y = np.asarray(self.labels)
        if y.ndim != 1 or y.size != X.shape[1]:
            raise ValidationError(f"{y.size} labels for {X.shape[1]} points")
        if y.size == 0:
            raise ValidationError("dataset is empty")
        if not np.all(np.equal(np.mod(y, 1), 0)) or np.any(y < 0):
            raise ValidationError("labels must be non-negative integers")
        y = y.astype(np.int64)
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "points", X)
        object.__setattr__(self, "labels", y)

    @property
    def dim(self) -> int:
        return self.points.shape[0]

    @property
    def size(self) -> int:
        return self.points.shape[1]

    @property
    def classes(self) -> list[int]:
        return sorted(int(c) for c in np.unique(self.labels))

    def class_points(self, label: int) -> np.ndarray:
        return self.points[:, self.labels == label]

    def __eq__(self, other):
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        return (self.points.shape == other.points.shape
                and np.array_equal(self.points, other.points)
                and np.array_equal(self.labels, other.labels))

    def check_consistent(self, eps_eq: float = DEFAULT.eps_eq) -> None:
        """Reject coincident points that carry different labels."""
        X = self.points
        for k in range(self.size):
            close = np.max(np.abs(X - X[:, k:k + 1]), axis=0) <= eps_eq
            bad = np.nonzero(close & (self.labels != self.labels[k]))[0]
            if bad.size:
                raise ValidationError(
                    f"points {k} and {int(bad[0])} coincide but have labels "
                    f"{int(self.labels[k])} and {int(self.labels[bad[0]])}"
                )


@dataclass(frozen=True, eq=False)
class GaussianSpec:
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mean, dtype=float).ravel()
        S = np.asarray(self.covariance, dtype=float)
        if S.shape != (mu.size, mu.size):
            raise ValidationError(f"covariance {S.shape} does not match mean of size {mu.size}")
        if np.max(np.abs(S - S.T), initial=0.0) > 1e-12:
            raise ValidationError("covariance is not symmetric")
        try:
            L = psd_cholesky(S)
        except ValueError:
            raise ValidationError("covariance is not positive semi-definite") from None
        object.__setattr__(self, "mean", mu)
        object.__setattr__(self, "covariance", S)
        object.__setattr__(self, "_factor", L)

    def sample(self, m: int, rng: SplitMix64) -> np.ndarray:
        d = self.mean.size
        Z = rng.normal(d * m).reshape(m, d).T   # point k uses draws k*d .. k*d+d-1
        return self.mean[:, None] + self._factor @ Z


def gen_xor() -> LabeledDataset:
    pts = np.array([[0.0, 1.0, 0.0, 1.0],
                    [0.0, 1.0, 1.0, 0.0]])
    return LabeledDataset(pts, np.array([0, 0, 1, 1]))


def gen_gaussian_pair(spec1: GaussianSpec, spec2: GaussianSpec, m: int, seed: int = 0) -> LabeledDataset:
    """``m`` samples per class; class 1 is label 0, class 2 label 1."""
    if m < 1:
        raise ValidationError("need at least one sample per class")
    rng = SplitMix64(seed)
    X1 = spec1.sample(m, rng)
    X2 = spec2.sample(m, rng)
    return LabeledDataset(np.hstack([X1, X2]), np.repeat([0, 1], m))


def _diag(a, b):
    return np.array([[a, 0.0], [0.0, b]])


# Benchmark two-class distributions with reference (SSR, LSSR) values at 256 samples/class.
BENCHMARK_PAIRS = {
    "xor": {"kind": "xor", "ssr": 0.9963, "lssr": 0.9929},
    "concentric": {"kind": "gauss", "specs": (GaussianSpec([0, 0], _diag(4, 4)), GaussianSpec([0, 0], _diag(9, 9))),
           "ssr": 0.9929, "lssr": 0.9859},
    "offset": {"kind": "gauss", "specs": (GaussianSpec([-3, -3], _diag(4, 4)), GaussianSpec([3, 3], _diag(1, 1))),
           "ssr": 0.2304, "lssr": 0.1312},
    "elongated": {"kind": "gauss", "specs": (GaussianSpec([-2, 0], _diag(1, 9)), GaussianSpec([2, 0], _diag(1, 9))),
           "ssr": 0.7536, "lssr": 0.2157},
}


def gen_noisy_xor(m: int, seed: int = 0) -> LabeledDataset:
    """Class 1 is ``(X, X)``, class 2 ``(X, 1 - X)`` with ``X`` a fair coin."""
    rng = SplitMix64(seed)
    a = (rng.uniform(m) < 0.5).astype(float)
    b = (rng.uniform(m) < 0.5).astype(float)
    X1 = np.vstack([a, a])
    X2 = np.vstack([b, 1.0 - b])
    return LabeledDataset(np.hstack([X1, X2]), np.repeat([0, 1], m))


def gen_benchmark_pair(row: str, m: int = 256, seed: int = 0) -> LabeledDataset:
    try:
        entry = BENCHMARK_PAIRS[row]
    except KeyError:
        raise ValidationError(f"unknown benchmark {row!r}; choose from {sorted(BENCHMARK_PAIRS)}") from None
    if entry["kind"] == "xor":
        return gen_noisy_xor(m, seed)
    return gen_gaussian_pair(*entry["specs"], m=m, seed=seed)


def gen_random_labels(m: int, d: int, classes: int = 2, seed: int = 0) -> LabeledDataset:
    """Standard-normal points with uniformly random labels, every class present."""
    if classes < 2:
        raise ValidationError("need at least two classes")
    if m < classes:
        raise ValidationError(f"cannot place {classes} classes on {m} points")
    if d < 1:
        raise ValidationError("dimension must be positive")
    rng = SplitMix64(seed)
    X = rng.normal(d * m).reshape(m, d).T
    labels = np.concatenate([np.arange(classes), rng.integers(m - classes, classes)])
    labels = labels[rng.permutation(m)]
    return LabeledDataset(X, labels)


# -- CSV -----------------------------------------------------------------------

def dumps_csv(data: LabeledDataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{k + 1}" for k in range(data.dim)] + ["label"])
    for k in range(data.size):
        w.writerow([repr(float(v)) for v in data.points[:, k]] + [int(data.labels[k])])
    return buf.getvalue()


def save_csv(data: LabeledDataset, path) -> None:
    Path(path).write_text(dumps_csv(data), encoding="utf-8")


def loads_csv(text: str) -> LabeledDataset:
    rows = list(csv.reader(io.StringIO(text)))
    while rows and not any(cell.strip() for cell in rows[-1]):
        rows.pop()
    if not rows:
        raise ParseError("empty file", line=1)
    header = [c.strip() for c in rows[0]]
    d = len(header) - 1
    if d < 1 or header[-1] != "label" or header[:-1] != [f"x{k + 1}" for k in range(d)]:
        raise ParseError("header must be x1,...,xd,label", line=1)
    if len(rows) == 1:
        raise ParseError("no samples after the header", line=2)
    pts = np.empty((d, len(rows) - 1))
    labels = np.empty(len(rows) - 1, dtype=np.int64)
    for k, row in enumerate(rows[1:]):
        line = k + 2
        if len(row) != d + 1:
            raise ParseError(f"expected {d + 1} fields, found {len(row)}", line=line)
        try:
            vals = [float(c) for c in row[:-1]]
        except ValueError:
            raise ParseError("non-numeric coordinate", line=line) from None
        if not all(np.isfinite(vals)):
            raise ParseError("non-finite coordinate", line=line)
        try:
            lab = int(row[-1].strip())
        except ValueError:
            raise ParseError(f"unparsable label {row[-1]!r}", line=line) from None
        if lab < 0:
            raise ParseError(f"negative label {lab}", line=line)
        pts[:, k] = vals
        labels[k] = lab
    return LabeledDataset(pts, labels)


def load_csv(path) -> LabeledDataset:
    return loads_csv(Path(path).read_text(encoding="utf-8"))
