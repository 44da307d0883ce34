"""Core series/dataset types, file ingestion and timestamp resampling.

A time series is a float64 array of shape (n, d); the implicit time axis is
the 1-based sample index 1..n, and optional explicit timestamps use the same
units.  Dataset files are label-first text records in the UCR style:

    label<sep>v1<sep>v2<sep>...

with the separator auto-detected among comma, tab and whitespace.
Multivariate records flatten samples in sample-major order (the d values of
sample 1, then sample 2, and so on).  The writer emits comma-separated
values with 17 significant digits, which round-trips float64 exactly.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTimeError, InputError, ParseError

__all__ = [
    "TimeSeries",
    "LabeledDataset",
    "Centroid",
    "l2_sq",
    "parse_ucr",
    "parse_multivariate_csv",
    "write_dataset",
    "format_values",
    "resample_uniform",
]


def _as_samples(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    if v.ndim == 1:
        v = v.reshape(-1, 1)
    if v.ndim != 2:
        raise InputError(f"series values must be 1-D or 2-D, got ndim={v.ndim}")
    n, d = v.shape
    if n < 1 or d < 1:
        raise InputError(f"series needs n >= 1 and d >= 1, got shape {(n, d)}")
    if not np.all(np.isfinite(v)):
        raise InputError("series values must all be finite")
    return v


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class TimeSeries:
    """Immutable multivariate series.

    Parameters
    ----------
    values : array-like, shape (n,) or (n, d)
        Sample values; 1-D input is treated as d=1.
    timestamps : array-like of shape (n,), optional
        Explicit sample times in sample-index units.
    """

    values: np.ndarray
    timestamps: np.ndarray | None = None

    def __post_init__(self):
        v = _freeze(_as_samples(self.values))
        object.__setattr__(self, "values", v)
        if self.timestamps is not None:
            t = np.asarray(self.timestamps, dtype=np.float64)
            if t.shape != (v.shape[0],):
                raise InputError(
                    f"timestamps shape {t.shape} does not match n={v.shape[0]}"
                )
            if not np.all(np.isfinite(t)):
                raise InputError("timestamps must be finite")
            object.__setattr__(self, "timestamps", _freeze(t))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class LabeledDataset:
    """A list of series with integer class labels (0-based) and a name."""

    series: tuple[TimeSeries, ...]
    labels: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        series = tuple(self.series)
        labels = tuple(int(l) for l in self.labels)
        if len(series) != len(labels) or len(series) < 1:
            raise InputError(
                f"need equally many series and labels, >= 1 "
                f"(got {len(series)} series, {len(labels)} labels)"
            )
        if any(l < 0 for l in labels):
            raise InputError("labels must be >= 0")
        d = series[0].d
        for i, s in enumerate(series):
            if s.d != d:
                raise InputError(f"series {i} has d={s.d}, expected d={d}")
        object.__setattr__(self, "series", series)
        object.__setattr__(self, "labels", labels)

    @property
    def d(self) -> int:
        return self.series[0].d

    @property
    def n_classes(self) -> int:
        return max(self.labels) + 1

    def __len__(self) -> int:
        return len(self.series)

    def subset(self, indices) -> "LabeledDataset":
        idx = list(indices)
        return LabeledDataset(
            tuple(self.series[i] for i in idx),
            tuple(self.labels[i] for i in idx),
            self.name,
        )

    def class_series(self, label: int) -> list[TimeSeries]:
        return [s for s, l in zip(self.series, self.labels) if l == label]


@dataclass(frozen=True)
class Centroid:
    """An averaging result: sample values paired with expected occurrence times."""

    values: np.ndarray
    times: np.ndarray

    def __post_init__(self):
        v = _freeze(_as_samples(self.values))
        t = np.asarray(self.times, dtype=np.float64)
        if t.shape != (v.shape[0],):
            raise InputError(
                f"times shape {t.shape} does not match L={v.shape[0]}"
            )
        if not np.all(np.isfinite(t)):
            raise InputError("times must be finite")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "times", _freeze(t))

    @property
    def source_length(self) -> int:
        return self.values.shape[0]


def l2_sq(x, y) -> float:
    """Squared Euclidean distance between two sample vectors.

    Accumulated coordinate by coordinate, matching the compiled kernels
    bit for bit so path costs recompose exactly.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
    ya = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if xa.shape != ya.shape:
        raise InputError(f"dimension mismatch: {xa.shape} vs {ya.shape}")
    acc = 0.0
    for a, b in zip(xa, ya):
        diff = float(a) - float(b)
        acc += diff * diff
    return acc


# ---------------------------------------------------------------------------
# Dataset file format


def _detect_split(line: str):
    if "," in line:
        return lambda s: s.split(",")
    if "\t" in line:
        return lambda s: s.split("\t")
    return str.split


def _parse_records(path: str, d: int) -> LabeledDataset:
    if d < 1:
        raise InputError(f"d must be >= 1, got {d}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc

    split = None
    series: list[TimeSeries] = []
    raw_labels: list[float] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if split is None:
            split = _detect_split(line)
        tokens = [t.strip() for t in split(line)]
        while tokens and tokens[-1] == "":
            tokens.pop()
        if len(tokens) < 2:
            raise ParseError("record needs a label and at least one value",
                             path=path, line=lineno)
        try:
            fields = [float(t) for t in tokens]
        except ValueError:
            bad = next(t for t in tokens if not _is_number(t))
            raise ParseError(f"non-numeric field {bad!r}", path=path, line=lineno)
        raw_label, values = fields[0], fields[1:]
        if len(values) % d != 0:
            raise ParseError(
                f"{len(values)} values is not a multiple of d={d}",
                path=path, line=lineno,
            )
        raw_labels.append(raw_label)
        series.append(TimeSeries(np.asarray(values).reshape(-1, d)))

    if not series:
        raise InputError(f"{path}: no records found")
    label_map = {raw: k for k, raw in enumerate(sorted(set(raw_labels)))}
    labels = [label_map[raw] for raw in raw_labels]
    import os
    return LabeledDataset(tuple(series), tuple(labels),
                          name=os.path.basename(path))


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def parse_ucr(path: str) -> LabeledDataset:
    """Parse a UCR-style text file: one scalar series per line, label first.

    Raw labels become 0-based classes in sorted order, so train and test
    files sharing a label alphabet map consistently.
    """
    return _parse_records(path, 1)


def parse_multivariate_csv(path: str, d: int) -> LabeledDataset:
    """Parse label-first records whose n*d values are laid out sample-major."""
    return _parse_records(path, d)


def format_values(values: np.ndarray) -> str:
    """Comma-join sample values (sample-major) with 17 significant digits."""
    flat = np.asarray(values, dtype=np.float64).reshape(-1)
    return ",".join(f"{v:.17g}" for v in flat)


def write_dataset(path: str, ds: LabeledDataset) -> None:
    """Write label-first records, one series per line, comma separated."""
    with open(path, "w", encoding="utf-8") as fh:
        for s, l in zip(ds.series, ds.labels):
            fh.write(f"{l},{format_values(s.values)}\n")


# ---------------------------------------------------------------------------
# Resampling


def resample_uniform(c: Centroid) -> TimeSeries:
    """Resample a centroid onto a uniform time grid of its own length.

    Index pairs (times[t], values[t]) are first sorted by time (stable, so
    ties keep their original order), then each dimension is linearly
    interpolated onto L uniformly spaced abscissae spanning [min t, max t].
    """
    L = c.source_length
    if L < 2:
        raise InputError("resampling needs at least 2 samples")
    order = np.argsort(c.times, kind="stable")
    t = c.times[order]
    v = c.values[order]
    lo, hi = float(t[0]), float(t[-1])
    if lo == hi:
        raise DegenerateTimeError("all timestamps coincide; cannot resample")
    grid = np.linspace(lo, hi, L)
    out = np.empty((L, v.shape[1]))
    for j in range(v.shape[1]):
        out[:, j] = np.interp(grid, t, v[:, j])
    return TimeSeries(out)
