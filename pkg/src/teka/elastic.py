"""Time-elastic measures: DTW with path extraction and the KDTW kernel.

DTW minimizes cumulative squared Euclidean cost over all warping paths.
KDTW replaces the minimum by a (1/3)-weighted sum of local kernels
``exp(-nu * l2_sq)`` over all paths, split into two recursive terms: the
K term sums over the full lattice, the K' corridor term confines off-path
emissions to same-index sample pairs.  The kernel is symmetric and
positive definite; its stiffness ``nu`` trades alignment selectivity
against diffusion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .core import TimeSeries
from .errors import InputError, KernelUnderflowError, NumericError

__all__ = [
    "WarpPath",
    "KdtwParams",
    "KdtwValue",
    "dtw",
    "pairwise_dtw_average",
    "kdtw",
    "gram",
]


@dataclass(frozen=True)
class WarpPath:
    """Monotone alignment path, 1-based index pairs from (1,1) to (n,m)."""

    steps: tuple[tuple[int, int], ...]

    def __post_init__(self):
        steps = tuple((int(i), int(j)) for i, j in self.steps)
        if not steps or steps[0] != (1, 1):
            raise InputError("warp path must start at (1, 1)")
        for (i0, j0), (i1, j1) in zip(steps, steps[1:]):
            if (i1 - i0, j1 - j0) not in ((1, 0), (0, 1), (1, 1)):
                raise InputError(
                    f"illegal step ({i0},{j0}) -> ({i1},{j1})"
                )
        object.__setattr__(self, "steps", steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


@dataclass(frozen=True)
class KdtwParams:
    """Kernel parameters; nu is the stiffness of the local kernel."""

    nu: float

    def __post_init__(self):
        nu = float(self.nu)
        if not (nu > 0.0) or not np.isfinite(nu):
            raise InputError(f"nu must be a positive finite real, got {self.nu}")
        object.__setattr__(self, "nu", nu)


class KdtwValue(NamedTuple):
    total: float
    k_term: float
    kp_term: float


def _check_pair(x: TimeSeries, y: TimeSeries) -> None:
    if x.d != y.d:
        raise InputError(f"dimension mismatch: d={x.d} vs d={y.d}")


def dtw(x: TimeSeries, y: TimeSeries) -> tuple[float, WarpPath]:
    """Optimal warping cost and one optimal path.

    Equal-cost predecessors resolve diagonal first, then (i-1, j), then
    (i, j-1), so the path is deterministic.
    """
    _check_pair(x, y)
    table = _kernels.dtw_table(x.values, y.values)
    raw = _kernels.dtw_backtrack(table)
    path = WarpPath(tuple((int(i) + 1, int(j) + 1) for i, j in raw))
    return float(table[-1, -1]), path


def pairwise_dtw_average(x: TimeSeries, y: TimeSeries) -> TimeSeries:
    """Sample-wise mean of the two series along their optimal path."""
    _check_pair(x, y)
    _, path = dtw(x, y)
    rows = np.array(
        [(x.values[i - 1] + y.values[j - 1]) / 2.0 for i, j in path]
    )
    return TimeSeries(rows)


def kdtw(x: TimeSeries, y: TimeSeries, p: KdtwParams) -> KdtwValue:
    """Regularized elastic kernel value (total, k_term, kp_term)."""
    _check_pair(x, y)
    kt, kpt = _kernels.kdtw_terms(x.values, y.values, p.nu)
    total = kt + kpt
    if total == 0.0:
        raise KernelUnderflowError(
            f"kernel underflowed to 0 for nu={p.nu}; use a smaller nu"
        )
    return KdtwValue(float(total), float(kt), float(kpt))


def gram(ds: list[TimeSeries], p: KdtwParams) -> np.ndarray:
    """KDTW Gram matrix; the upper triangle is computed and mirrored."""
    if not ds:
        raise InputError("gram needs at least one series")
    n = len(ds)
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            try:
                g[i, j] = kdtw(ds[i], ds[j], p).total
            except NumericError as exc:
                raise type(exc)(f"pair ({i}, {j}): {exc}") from exc
            g[j, i] = g[i, j]
    return g
