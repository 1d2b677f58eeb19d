"""Synthetic data generators and dataset I/O.

All generators return standardized data (column mean 0, sample sd 1) unless
``standardize=False`` is passed, and record their parameters in the dataset
provenance so experiments are self-describing.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import CsvParseError, DegenerateInputError


@dataclass(frozen=True)
class Dataset:
    """n x p numeric matrix with generator provenance."""

    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError("dataset values must be a 2-D matrix")
        if values.shape[0] < 2:
            raise ValueError("dataset needs at least 2 rows")
        if not np.all(np.isfinite(values)):
            raise ValueError("dataset contains NaN or Inf entries")
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]


def _standardize_values(X):
    mean = X.mean(axis=0)
    sd = X.std(axis=0, ddof=1)
    bad = np.nonzero(sd < 1e-14)[0]
    if bad.size:
        raise DegenerateInputError(f"column {bad[0]} has zero variance")
    return (X - mean) / sd


def standardize(ds):
    """Center and scale each column to mean 0 and sample sd 1."""
    return Dataset(
        _standardize_values(ds.values),
        {**ds.provenance, "standardized": True},
    )


def sphere(ds):
    """ZCA whitening: rotate-and-scale so the sample covariance is identity."""
    X = ds.values - ds.values.mean(axis=0)
    cov = X.T @ X / (ds.n - 1)
    w, V = np.linalg.eigh(cov)
    if np.min(w) < 1e-12:
        raise DegenerateInputError("covariance is singular; cannot sphere")
    W = V @ np.diag(1.0 / np.sqrt(w)) @ V.T
    return Dataset(X @ W, {**ds.provenance, "sphered": True})


def gen_pipe(n, p, rng, noise_sd=0.05, standardize=True):
    """Noisy circle in the first two columns, N(0,1) noise in the rest."""
    if p < 2:
        raise ValueError(f"pipe data needs p >= 2, got p={p}")
    angle = rng.uniform(0.0, 2.0 * np.pi, size=n)
    radius = 1.0 + rng.normal(0.0, noise_sd, size=n)
    X = np.empty((n, p))
    X[:, 0] = radius * np.cos(angle)
    X[:, 1] = radius * np.sin(angle)
    if p > 2:
        X[:, 2:] = rng.standard_normal((n, p - 2))
    if standardize:
        X = _standardize_values(X)
    return Dataset(
        X,
        {"generator": "pipe", "n": n, "p": p, "noise_sd": noise_sd,
         "standardized": standardize},
    )


def gen_sine(n, p, rng, noise_sd=0.1, standardize=True):
    """Sine wave in the first two columns, N(0,1) noise in the rest."""
    if p < 2:
        raise ValueError(f"sine data needs p >= 2, got p={p}")
    x1 = rng.uniform(-np.pi, np.pi, size=n)
    X = np.empty((n, p))
    X[:, 0] = x1
    X[:, 1] = np.sin(x1) + rng.normal(0.0, noise_sd, size=n)
    if p > 2:
        X[:, 2:] = rng.standard_normal((n, p - 2))
    if standardize:
        X = _standardize_values(X)
    return Dataset(
        X,
        {"generator": "sine", "n": n, "p": p, "noise_sd": noise_sd,
         "standardized": standardize},
    )


TRIMODAL_MEANS = ((-3.0, 0.0), (3.0, 0.0), (0.0, 5.0))


def gen_trimodal(n, rng, standardize=True):
    """2-D equal-weight mixture of three unit-covariance Gaussians."""
    if n < 3:
        raise ValueError(f"trimodal data needs n >= 3, got n={n}")
    means = np.asarray(TRIMODAL_MEANS)
    comp = rng.integers(0, 3, size=n)
    X = means[comp] + rng.standard_normal((n, 2))
    if standardize:
        X = _standardize_values(X)
    return Dataset(
        X,
        {"generator": "trimodal", "n": n, "means": TRIMODAL_MEANS,
         "standardized": standardize},
    )


RANDU_MULTIPLIER = 65539
RANDU_MODULUS = 2**31


def randu_states(count, seed=1):
    """Raw states of the RANDU linear congruential generator."""
    states = np.empty(count, dtype=np.int64)
    x = seed
    for i in range(count):
        x = (RANDU_MULTIPLIER * x) % RANDU_MODULUS
        states[i] = x
    return states


def gen_randu(n, seed=1, standardize=True):
    """Consecutive non-overlapping triples from the RANDU generator, p=3."""
    if n < 1:
        raise ValueError(f"randu data needs n >= 1, got n={n}")
    X = randu_states(3 * n, seed=seed).reshape(n, 3) / RANDU_MODULUS
    if standardize:
        X = _standardize_values(X)
    return Dataset(
        X,
        {"generator": "randu", "n": n, "seed": seed,
         "standardized": standardize},
    )


def save_csv(ds, path_or_file, header=None):
    """Write the dataset as CSV with a header row; values round-trip exactly."""
    n, p = ds.values.shape
    if header is None:
        header = ds.provenance.get("header") or [f"x{j + 1}" for j in range(p)]
    own = not hasattr(path_or_file, "write")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in ds.values:
            writer.writerow([repr(v) for v in row])
    finally:
        if own:
            fh.close()


def load_csv(path):
    """Read a rectangular numeric CSV with a header row."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvParseError("empty CSV file", row=0, column=0) from None
        p = len(header)
        rows = []
        for i, record in enumerate(reader, start=1):
            if len(record) != p:
                raise CsvParseError(
                    f"row {i} has {len(record)} fields, expected {p}",
                    row=i, column=len(record),
                )
            parsed = []
            for j, cell in enumerate(record, start=1):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise CsvParseError(
                        f"non-numeric value {cell!r} at row {i}, column {j}",
                        row=i, column=j,
                    ) from None
            rows.append(parsed)
    if not rows:
        raise CsvParseError("CSV has a header but no data rows", row=1, column=0)
    return Dataset(
        np.asarray(rows), {"generator": "csv", "path": str(path), "header": header}
    )
