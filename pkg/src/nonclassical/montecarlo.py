"""Photon-counting simulation of the number-basis witnesses.

Photon numbers are drawn from |C_n|^2 by inverse-CDF lookup with numpy's
PCG64 generator (``numpy.random.default_rng(seed)``), and witnesses are
estimated by plug-in moments with bootstrap standard errors.  Quadrature
(HOS) witnesses are not estimated: photon counting does not measure them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .combinatorics import falling_factorial
from .fock import FockState
from .witnesses import poisson_central_moment

MIN_SHOTS = 100
DEFAULT_RESAMPLES = 200


@dataclass(frozen=True)
class MCEstimate:
    value: float
    std_error: float
    shots: int
    seed: int

    def __post_init__(self):
        if self.shots < 2:
            raise ValueError("an estimate needs at least two shots")
        if not (math.isfinite(self.std_error) and self.std_error >= 0):
            raise ValueError(f"invalid standard error {self.std_error}")


class PhotonSampler:
    """Inverse-CDF sampler over a state's photon-number distribution."""

    def __init__(self, state: FockState):
        p = state.probabilities()
        self.cdf = np.cumsum(p)
        self.cdf /= self.cdf[-1]

    def sample(self, rng: np.random.Generator, size: int | None = None):
        u = rng.random(size)
        n = np.searchsorted(self.cdf, u, side="right")
        return np.minimum(n, self.cdf.size - 1)


def sample_photon_number(state: FockState, rng: np.random.Generator) -> int:
    return int(PhotonSampler(state).sample(rng))


def sample_counts(state: FockState, shots: int, seed: int) -> np.ndarray:
    """Histogram of ``shots`` photon-number samples, indexed by photon number."""
    rng = np.random.default_rng(seed)
    samples = PhotonSampler(state).sample(rng, shots)
    return np.bincount(samples, minlength=state.dim)


def _hoa_from_counts(counts: np.ndarray, l: int) -> float:
    shots = counts.sum()
    n = np.arange(counts.size, dtype=float)
    mean = float(counts @ n) / shots
    fact = float(counts @ falling_factorial(n, l + 1)) / shots
    return fact - mean ** (l + 1)


def _hosps_from_counts(counts: np.ndarray, l: int) -> float:
    shots = counts.sum()
    n = np.arange(counts.size, dtype=float)
    mean = float(counts @ n) / shots
    central = float(counts @ (n - mean) ** (l + 1)) / shots
    return central - poisson_central_moment(mean, l + 1)


def _estimate(state, l, shots, seed, resamples, statistic) -> MCEstimate:
    if shots < MIN_SHOTS:
        raise ValueError(f"need at least {MIN_SHOTS} shots, got {shots}")
    if l < 1:
        raise ValueError(f"witness order must be >= 1, got {l}")
    counts = sample_counts(state, shots, seed)
    value = statistic(counts, l)
    # A bootstrap resample of the shots is a multinomial draw on the histogram.
    rng = np.random.default_rng([seed, 1])
    freq = counts / shots
    boot = [statistic(rng.multinomial(shots, freq), l) for _ in range(resamples)]
    return MCEstimate(value, float(np.std(boot, ddof=1)), shots, seed)


def estimate_hoa(
    state: FockState, l: int, shots: int, seed: int, *, resamples: int = DEFAULT_RESAMPLES
) -> MCEstimate:
    """Plug-in estimate of d(l) = <N^(l+1)> - <N>^(l+1) from photon counts."""
    return _estimate(state, l, shots, seed, resamples, _hoa_from_counts)


def estimate_hosps(
    state: FockState, l: int, shots: int, seed: int, *, resamples: int = DEFAULT_RESAMPLES
) -> MCEstimate:
    """Plug-in estimate of d_h(l): sample central moment minus the Poisson one at the sample mean."""
    return _estimate(state, l, shots, seed, resamples, _hosps_from_counts)
