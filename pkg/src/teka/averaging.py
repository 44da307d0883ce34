"""Centroid estimators for sets of time series.

The main estimator iterates kernel alignment expectations: against a
reference r, every series contributes, for each reference index t, the
expected sample value and the expected occurrence time under the
row-conditional alignment distribution.  Averaging both across the set
gives a new candidate (values, times); candidates are kept while the mean
kernel similarity to the set does not degrade, and the winner is
resampled onto a uniform grid.

Baselines: DBA (single optimal DTW paths, value-only averaging), the DTW
and KDTW medoids, and the sample-wise Euclidean mean.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._parallel import map_ordered
from .automata import _emission_matrix
from .core import Centroid, TimeSeries, resample_uniform
from .elastic import KdtwParams, dtw, kdtw
from .errors import (
    DegenerateAlignmentError,
    InputError,
    KernelUnderflowError,
    NumericError,
)

__all__ = [
    "AveragingConfig",
    "METHODS",
    "pair_expectations",
    "teka_update",
    "teka",
    "teka_centroid",
    "dba",
    "medoid",
    "euclidean_centroid",
    "compute_centroid",
    "write_centroid_csv",
    "write_trace_json",
]

METHODS = ("teka", "dba", "medoid_dtw", "medoid_kdtw", "euclidean")


@dataclass(frozen=True)
class AveragingConfig:
    """Method selection plus the kernel stiffness and iteration cap."""

    nu: float
    max_iter: int = 10
    method: str = "teka"

    def __post_init__(self):
        KdtwParams(self.nu)
        if int(self.max_iter) < 1:
            raise InputError(f"max_iter must be >= 1, got {self.max_iter}")
        object.__setattr__(self, "max_iter", int(self.max_iter))
        if self.method not in METHODS:
            raise InputError(
                f"unknown method {self.method!r}, expected one of {METHODS}"
            )

    @property
    def params(self) -> KdtwParams:
        return KdtwParams(self.nu)


def _check_set(O) -> list[TimeSeries]:
    items = list(O)
    if not items:
        raise InputError("averaging needs at least one series")
    d = items[0].d
    for i, s in enumerate(items):
        if s.d != d:
            raise InputError(f"series {i} has d={s.d}, expected d={d}")
    return items


def pair_expectations(
    r: TimeSeries, o: TimeSeries, p: KdtwParams
) -> tuple[np.ndarray, np.ndarray]:
    """Expected values and expected 1-based times of o against each r index.

    Row t of the conditional alignment matrix weights o's samples; the
    expectations are convex combinations, so e_vals stays inside o's
    value range and e_times inside [1, len(o)].  The backward sweep is
    fused with the expectation sums, so no alignment matrix is kept.
    """
    b = _emission_matrix(r, o, p)
    a, _ = _kernels.forward_scaled(b)
    if a[-1, -1] == 0.0:
        raise KernelUnderflowError(
            f"alignment mass underflowed to 0 for nu={p.nu}; use a smaller nu"
        )
    e_vals, e_times, bad = _kernels.backward_expect(b, a, o.values)
    if bad >= 0:
        raise DegenerateAlignmentError(f"posterior row t={bad + 1} has zero mass")
    return e_vals, e_times


def teka_update(
    r: TimeSeries, O, p: KdtwParams, jobs: int | None = None
) -> Centroid:
    """One averaging step: mean alignment expectations of the set against r."""
    items = _check_set(O)

    def one(item):
        k, o = item
        try:
            return pair_expectations(r, o, p)
        except NumericError as exc:
            raise type(exc)(f"series {k}: {exc}") from exc

    results = map_ordered(one, enumerate(items), jobs)
    vals = np.zeros((r.n, r.d))
    times = np.zeros(r.n)
    for e_vals, e_times in results:
        vals += e_vals
        times += e_times
    n = float(len(items))
    return Centroid(vals / n, times / n)


def _mean_similarity(values: np.ndarray, O, p: KdtwParams, jobs) -> float:
    c = TimeSeries(values)
    totals = map_ordered(lambda o: kdtw(c, o, p).total, O, jobs)
    return float(sum(totals) / len(totals))


def teka_centroid(
    O, cfg: AveragingConfig, jobs: int | None = None
) -> tuple[Centroid, list[float]]:
    """Iterated kernel averaging; returns the raw (values, times) centroid.

    Starts from the KDTW medoid and keeps iterating while the mean kernel
    similarity to the set does not drop, up to max_iter updates.  The
    returned candidate is the last non-worsening one; the trace holds the
    retained mean-similarity values and is non-decreasing by construction.
    """
    items = _check_set(O)
    p = cfg.params
    _, init = medoid(items, "kdtw", p, jobs)
    c_vals = init.values
    c_times = np.arange(1.0, init.n + 1.0)
    best = 0.0
    trace: list[float] = []
    for _ in range(cfg.max_iter):
        cand = teka_update(TimeSeries(c_vals), items, p, jobs)
        meank = _mean_similarity(cand.values, items, p, jobs)
        if meank < best:
            break
        c_vals = cand.values
        c_times = cand.times
        trace.append(meank)
        best = meank
    return Centroid(c_vals, c_times), trace


def teka(
    O, cfg: AveragingConfig, jobs: int | None = None
) -> tuple[TimeSeries, list[float]]:
    """Kernel-averaging centroid, resampled onto a uniform grid."""
    cent, trace = teka_centroid(O, cfg, jobs)
    return resample_uniform(cent), trace


def dba(
    O, cfg: AveragingConfig, jobs: int | None = None
) -> tuple[TimeSeries, list[float]]:
    """DTW barycenter averaging baseline.

    Starts from the DTW medoid; each iteration realigns every series to
    the candidate along one optimal path, averages co-aligned samples per
    centroid index within each series, then averages across series.  The
    inertia (sum of DTW costs of the candidate) is evaluated before each
    update and iteration stops as soon as it fails to decrease; the
    best-so-far candidate is returned with the retained, strictly
    decreasing inertia trace.
    """
    items = _check_set(O)
    _, init = medoid(items, "dtw", None, jobs)
    c = init
    best_c = init
    trace: list[float] = []
    for _ in range(cfg.max_iter):
        aligned = map_ordered(
            lambda o: _dba_align(c.values, o.values), items, jobs
        )
        inertia = float(sum(cost for cost, _ in aligned))
        if trace and inertia >= trace[-1]:
            break
        trace.append(inertia)
        best_c = c
        acc = np.zeros((c.n, c.d))
        for (_, u) in aligned:
            acc += u
        c = TimeSeries(acc / len(items))
    return best_c, trace


def _dba_align(c_vals: np.ndarray, o_vals: np.ndarray):
    table = _kernels.dtw_table(c_vals, o_vals)
    path = _kernels.dtw_backtrack(table)
    sums = np.zeros_like(c_vals)
    counts = np.zeros(c_vals.shape[0])
    np.add.at(sums, path[:, 0], o_vals[path[:, 1]])
    np.add.at(counts, path[:, 0], 1.0)
    return float(table[-1, -1]), sums / counts[:, None]


def medoid(
    O, measure: str, p: KdtwParams | None = None, jobs: int | None = None
) -> tuple[int, TimeSeries]:
    """Set element optimizing the total measure to the whole set.

    measure "dtw" minimizes the summed cost, "kdtw" maximizes the summed
    similarity (self-similarity included); ties go to the lowest index.
    """
    items = _check_set(O)
    n = len(items)
    if measure not in ("dtw", "kdtw"):
        raise InputError(f"measure must be 'dtw' or 'kdtw', got {measure!r}")
    if measure == "kdtw" and p is None:
        raise InputError("kdtw medoid needs kernel parameters")
    if measure == "dtw":
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        fn = lambda ij: float(
            _kernels.dtw_cost(items[ij[0]].values, items[ij[1]].values)
        )
    else:
        pairs = [(i, j) for i in range(n) for j in range(i, n)]
        fn = lambda ij: kdtw(items[ij[0]], items[ij[1]], p).total
    vals = map_ordered(fn, pairs, jobs)
    score = np.zeros(n)
    for (i, j), v in zip(pairs, vals):
        score[i] += v
        if j != i:
            score[j] += v
    idx = int(np.argmin(score) if measure == "dtw" else np.argmax(score))
    return idx, items[idx]


def euclidean_centroid(O) -> TimeSeries:
    """Sample-wise arithmetic mean; requires equal lengths."""
    items = _check_set(O)
    n0 = items[0].n
    for i, s in enumerate(items):
        if s.n != n0:
            raise InputError(
                f"series {i} has length {s.n}, expected {n0} for pointwise mean"
            )
    stack = np.stack([s.values for s in items])
    return TimeSeries(stack.mean(axis=0))


def compute_centroid(
    O, cfg: AveragingConfig, jobs: int | None = None
) -> tuple[TimeSeries, list[float]]:
    """Dispatch a centroid method; medoids and the mean have empty traces."""
    if cfg.method == "teka":
        return teka(O, cfg, jobs)
    if cfg.method == "dba":
        return dba(O, cfg, jobs)
    if cfg.method == "medoid_dtw":
        return medoid(O, "dtw", None, jobs)[1], []
    if cfg.method == "medoid_kdtw":
        return medoid(O, "kdtw", cfg.params, jobs)[1], []
    if cfg.method == "euclidean":
        return euclidean_centroid(O), []
    raise InputError(f"unknown method {cfg.method!r}")


def write_centroid_csv(path: str, c: Centroid | TimeSeries) -> None:
    """Write one sample per line: time, then the sample values."""
    if isinstance(c, Centroid):
        times, values = c.times, c.values
    else:
        times, values = np.arange(1.0, c.n + 1.0), c.values
    with open(path, "w", encoding="utf-8") as fh:
        for t, row in zip(times, values):
            cells = [f"{t:.17g}"] + [f"{v:.17g}" for v in row]
            fh.write(",".join(cells) + "\n")


def write_trace_json(path: str, method: str, trace: list[float]) -> None:
    doc = {"method": method, "trace": [float(v) for v in trace]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
