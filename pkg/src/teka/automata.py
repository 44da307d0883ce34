"""Probabilistic reading of the elastic kernel: forward/backward matrices
over the alignment lattice and per-cell alignment probabilities.

States are sample pairs (t, t'); transitions follow the three-predecessor
lattice with weight 1/3 and emissions are the local kernel values b.  The
forward matrix is exactly the kernel's K-term table, so its terminal cell
equals k_term.  The backward matrix accumulates suffix mass, each cell
multiplying its own emission, with terminal cell 1.  Their cell-wise
product is the unnormalized posterior; normalizing each row turns row t
into the conditional distribution of x's sample t over y's samples.

Long or stiff inputs underflow float64, so both sweeps rescale per row
by exact powers of two.  The posterior is then recombined to a single
common scale recorded in ``scale_log``:

    true posterior = posterior * exp(-scale_log)

``scale_log`` is 0 and all matrices are the plain recursion values
whenever no rescaling was needed.  Row conditionals never depend on the
scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import TimeSeries
from .errors import DegenerateAlignmentError, InputError, KernelUnderflowError
from .elastic import KdtwParams

__all__ = [
    "AlignmentMatrices",
    "forward",
    "backward",
    "posterior",
    "row_conditionals",
    "write_posterior_csv",
    "write_posterior_pgm",
]


@dataclass(frozen=True)
class AlignmentMatrices:
    """Forward, backward and unnormalized posterior matrices for one pair.

    ``forward`` and ``backward`` keep their per-row rescaling (they are
    the plain recursion values unless rescaling occurred); ``posterior``
    sits at the single scale described by ``scale_log``.
    """

    forward: np.ndarray
    backward: np.ndarray
    posterior: np.ndarray
    scale_log: float

    def __post_init__(self):
        for name in ("forward", "backward", "posterior"):
            a = np.asarray(getattr(self, name), dtype=np.float64)
            a.flags.writeable = False
            object.__setattr__(self, name, a)


def _emission_matrix(x: TimeSeries, y: TimeSeries, p: KdtwParams) -> np.ndarray:
    if x.d != y.d:
        raise InputError(f"dimension mismatch: d={x.d} vs d={y.d}")
    return _kernels.emissions(x.values, y.values, p.nu)


def forward(x: TimeSeries, y: TimeSeries, p: KdtwParams) -> np.ndarray:
    """Forward matrix; terminal cell equals the kernel k_term.

    Rescaling during the sweep is undone exactly on return, so cells
    whose true value falls outside float64 range flush to zero.  Use
    posterior() and row_conditionals() on pairs long or stiff enough
    that the whole matrix underflows.
    """
    a, ca = _kernels.forward_scaled(_emission_matrix(x, y, p))
    if ca[-1]:
        a = np.ldexp(a, -_kernels.BOOST_BITS * ca[:, None])
    if a[-1, -1] == 0.0:
        raise KernelUnderflowError(
            f"forward mass underflowed to 0 for nu={p.nu}; use a smaller nu"
        )
    return a


def backward(x: TimeSeries, y: TimeSeries, p: KdtwParams) -> np.ndarray:
    """Backward matrix; terminal cell is 1, cell (1,1) carries total mass.

    Rescaling is undone exactly on return, as in forward().
    """
    bt, cb = _kernels.backward_scaled(_emission_matrix(x, y, p))
    if cb[0]:
        bt = np.ldexp(bt, -_kernels.BOOST_BITS * cb[:, None])
    if bt[0, 0] == 0.0:
        raise KernelUnderflowError(
            f"backward mass underflowed to 0 for nu={p.nu}; use a smaller nu"
        )
    return bt


def _recombine(a, ca, bt, cb):
    """Cell-wise forward*backward product at one common scale.

    In row i the stored factors equal the true ones times 2**(512*ca[i])
    and 2**(512*cb[i]).  The kernel splits every cell into mantissa and
    exponent, making the pairing exact for any magnitude spread; the
    common scale puts the largest cell near one.
    """
    csum = ca + cb
    if csum.max() == 0:
        return a * bt, 0.0

    post, target = _kernels.recombine(a, bt, csum)
    return post, -float(target) * math.log(2.0)


def posterior(x: TimeSeries, y: TimeSeries, p: KdtwParams) -> AlignmentMatrices:
    """Forward/backward matrices and their cell-wise product for one pair."""
    b = _emission_matrix(x, y, p)
    a, ca = _kernels.forward_scaled(b)
    bt, cb = _kernels.backward_scaled(b)
    if a[-1, -1] == 0.0:
        raise KernelUnderflowError(
            f"alignment mass underflowed to 0 for nu={p.nu}; use a smaller nu"
        )
    post, scale_log = _recombine(a, ca, bt, cb)
    return AlignmentMatrices(a, bt, post, scale_log)


def row_conditionals(m: AlignmentMatrices) -> np.ndarray:
    """Row-normalized posterior: row t is a probability distribution.

    Any uniform factor on the posterior matrix, including the rescaling
    recorded in scale_log, cancels row-wise.  A factor applied to the
    emissions does not cancel: it enters each alignment path once per
    visited cell, and paths through a row differ in length.
    """
    sums = m.posterior.sum(axis=1)
    zero = np.flatnonzero(sums == 0.0)
    if zero.size:
        t = int(zero[0]) + 1
        raise DegenerateAlignmentError(f"posterior row t={t} has zero mass")
    return m.posterior / sums[:, None]


def write_posterior_csv(m: AlignmentMatrices, path: str) -> None:
    """Write the unnormalized posterior matrix, one row per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in m.posterior:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def write_posterior_pgm(m: AlignmentMatrices, path: str) -> None:
    """Write an 8-bit grayscale PGM of the log posterior (white = likely)."""
    post = m.posterior
    with np.errstate(divide="ignore"):
        logv = np.log(post)
    finite = logv[np.isfinite(logv)]
    if finite.size == 0:
        pix = np.zeros(post.shape, dtype=np.uint8)
    else:
        lo, hi = float(finite.min()), float(finite.max())
        span = hi - lo if hi > lo else 1.0
        scaled = (logv - lo) / span
        scaled[~np.isfinite(logv)] = 0.0
        pix = np.round(np.clip(scaled, 0.0, 1.0) * 255.0).astype(np.uint8)
    n, mw = pix.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{mw} {n}\n255\n".encode("ascii"))
        fh.write(pix.tobytes())
