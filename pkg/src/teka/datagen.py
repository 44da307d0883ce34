"""Seeded synthetic generators.

Two families: the cylinder/bell/funnel classification benchmark, and a
noisy two-channel periodic "rosette" used for denoising studies.  Every
instance derives its own RNG from (seed, indices), so generation is
deterministic, order-independent and safe to parallelize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import LabeledDataset, TimeSeries
from .errors import InputError

__all__ = [
    "CbfSpec",
    "RosetteSpec",
    "gen_cbf",
    "gen_rosette",
]


@dataclass(frozen=True)
class CbfSpec:
    """Cylinder/bell/funnel generator settings.

    noiseless is a debug flag: the noise draws still happen (the RNG
    stream is unchanged) but their values are zeroed.
    """

    per_class: int
    length: int = 128
    seed: int = 0
    noiseless: bool = False

    def __post_init__(self):
        if self.per_class < 1:
            raise InputError(f"per_class must be >= 1, got {self.per_class}")
        if self.length < 97:
            raise InputError(
                f"length must be >= 97 so the widest support fits, "
                f"got {self.length}"
            )


def _cbf_instance(spec: CbfSpec, label: int, idx: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence((spec.seed, label, idx)))
    eta = float(rng.standard_normal())
    a = int(rng.integers(16, 33))
    span = int(rng.integers(32, 97))
    eps = rng.standard_normal(spec.length)
    if spec.noiseless:
        eta = 0.0
        eps = np.zeros(spec.length)
    b = min(a + span, spec.length)
    t = np.arange(1, spec.length + 1, dtype=np.float64)
    chi = ((t >= a) & (t <= b)).astype(np.float64)
    if label == 0:
        shape = chi
    elif label == 1:
        shape = chi * (t - a) / (b - a)
    else:
        shape = chi * (b - t) / (b - a)
    return (6.0 + eta) * shape + eps


def gen_cbf(spec: CbfSpec) -> LabeledDataset:
    """Cylinder (0), bell (1) and funnel (2) instances, grouped by class.

    Common shape support [a, b] with a ~ U{16..32}, b - a ~ U{32..96}
    (b clamped to the series length); amplitude 6 + eta and additive
    noise are standard normal.
    """
    series = []
    labels = []
    for label in range(3):
        for idx in range(spec.per_class):
            series.append(TimeSeries(_cbf_instance(spec, label, idx)))
            labels.append(label)
    return LabeledDataset(tuple(series), tuple(labels), name="cbf")


@dataclass(frozen=True)
class RosetteSpec:
    """Two-channel periodic signal settings.

    Each instance is an amplitude-modulated cosine/sine pair whose
    modulation is an impulse comb at one sixth of the carrier period,
    with small per-instance perturbations of amplitude, frequency and
    phase.  duration defaults to two carrier periods.  The debug flags
    zero the perturbations or drop the comb after the draws are made.
    """

    n_instances: int = 8
    f0: float = 20.0
    A0: float = 1.0
    sample_rate: float = 1200.0
    duration: float | None = None
    snr_db: float = 0.0
    seed: int = 0
    no_perturbation: bool = False
    no_comb: bool = False

    def __post_init__(self):
        if self.n_instances < 1:
            raise InputError(
                f"n_instances must be >= 1, got {self.n_instances}"
            )
        if not self.sample_rate > 12.0 * self.f0:
            raise InputError(
                f"sample_rate must exceed 12*f0 = {12.0 * self.f0} to "
                f"resolve the comb, got {self.sample_rate}"
            )

    @property
    def span(self) -> float:
        return 2.0 / self.f0 if self.duration is None else self.duration

    @property
    def n_samples(self) -> int:
        n = int(round(self.span * self.sample_rate))
        if n < 4:
            raise InputError(f"duration {self.span} s gives only {n} samples")
        return n


def _rosette_instance(spec: RosetteSpec, idx: int):
    rng = np.random.default_rng(np.random.SeedSequence((spec.seed, idx)))
    omega0 = 2.0 * math.pi * spec.f0
    a_k = float(rng.uniform(0.0, spec.A0 / 10.0))
    b_k = float(rng.uniform(0.0, spec.A0 / 10.0))
    w_k = float(rng.uniform(-omega0 / 6.67, omega0 / 6.67))
    phi_k = float(rng.uniform(-omega0 / 10.0, omega0 / 10.0))
    if spec.no_perturbation:
        a_k = b_k = w_k = phi_k = 0.0

    amp = spec.A0 + a_k
    comb_amp = 0.0 if spec.no_comb else (spec.A0 + 5.0) + b_k
    omega = omega0 + w_k
    n = spec.n_samples
    t = np.arange(n) / spec.sample_rate

    comb = np.zeros(n)
    i = 0
    while True:
        pos = int(round(2.0 * math.pi * i / (6.0 * omega) * spec.sample_rate))
        if pos >= n:
            break
        comb[pos] = 1.0
        i += 1

    factor = amp + comb_amp * comb
    clean = np.stack(
        [factor * np.cos(omega * t + phi_k), factor * np.sin(omega * t + phi_k)],
        axis=1,
    )
    clean -= clean.mean(axis=0)
    clean /= clean.std(axis=0)

    noise = rng.standard_normal((n, 2))
    target = 10.0 ** (-spec.snr_db / 10.0)
    for j in range(2):
        power = float(np.mean(noise[:, j] ** 2))
        noise[:, j] *= math.sqrt(target / power)
    return clean, clean + noise


def gen_rosette(spec: RosetteSpec):
    """(clean, noisy) lists of d=2 series, one pair per instance.

    Clean instances are centered and scaled to unit variance per channel;
    the added white noise is rescaled so its per-channel power is exactly
    10**(-snr_db/10) times the (unit) signal power.
    """
    clean: list[TimeSeries] = []
    noisy: list[TimeSeries] = []
    for idx in range(spec.n_instances):
        c, x = _rosette_instance(spec, idx)
        clean.append(TimeSeries(c))
        noisy.append(TimeSeries(x))
    return clean, noisy
