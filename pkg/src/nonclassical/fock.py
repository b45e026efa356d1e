"""Truncated number-basis states and the moment engine.

A state is a finite vector of amplitudes C_0..C_Nmax.  ``moment`` evaluates
normally ordered expectations <a^dag^k a^l> by the closed-form sum over the
amplitude vector; ``moment_oracle`` and ``central_x_moment_oracle`` get the
same numbers by literally applying ladder operators, and exist to check it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .combinatorics import falling_factorial

MAX_ORDER = 12
NORM_TOLERANCE = 1e-9


class MomentKey(NamedTuple):
    """Powers of the creation (k) and annihilation (l) operators in a^dag^k a^l."""

    k: int
    l: int


@dataclass(frozen=True)
class FockState:
    amplitudes: np.ndarray
    truncation_epsilon: float = 0.0
    label: str = ""
    raw_norm: float = field(default=1.0, compare=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("amplitudes must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"state is not normalized: sum |C_n|^2 = {norm2!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def n_max(self) -> int:
        return self.amplitudes.size - 1

    def probabilities(self) -> np.ndarray:
        """Photon-number distribution |C_n|^2."""
        return np.abs(self.amplitudes) ** 2


def from_amplitudes(
    raw: Sequence[complex], *, truncation_epsilon: float = 0.0, label: str = ""
) -> FockState:
    """Normalize ``raw`` into a FockState; the pre-normalization norm is kept as ``raw_norm``."""
    amps = np.array(raw, dtype=complex).ravel()
    if amps.size == 0:
        raise ValueError("amplitude sequence is empty")
    if not np.all(np.isfinite(amps)):
        raise ValueError("amplitude sequence contains non-finite entries")
    norm = float(np.sqrt(np.sum(np.abs(amps) ** 2)))
    if norm == 0.0:
        raise ValueError("amplitude sequence is identically zero")
    return FockState(amps / norm, truncation_epsilon, label, raw_norm=norm)


def _check_order(order: int, max_order: int, what: str = "order") -> None:
    if order < 0:
        raise ValueError(f"{what} must be non-negative, got {order}")
    if order > max_order:
        raise ValueError(f"{what} {order} exceeds the configured maximum {max_order}")


def _sqrt_ladder_factor(j: np.ndarray, k: int, l: int) -> np.ndarray:
    # sqrt((j+k)! (j+l)!) / j! = sqrt((j+1)...(j+k) * (j+1)...(j+l))
    return np.sqrt(falling_factorial(j + k, k) * falling_factorial(j + l, l))


def moment(state: FockState, key: tuple[int, int], *, max_order: int = MAX_ORDER) -> complex:
    """<psi| a^dag^k a^l |psi> summed directly over the amplitudes."""
    k, l = key
    _check_order(k, max_order, "creation power")
    _check_order(l, max_order, "annihilation power")
    c = state.amplitudes
    top = state.n_max - max(k, l)
    if top < 0:
        return 0j
    j = np.arange(top + 1, dtype=float)
    terms = np.conj(c[k : k + top + 1]) * c[l : l + top + 1] * _sqrt_ladder_factor(j, k, l)
    return complex(np.sum(terms))


def _annihilate(vec: np.ndarray, times: int) -> np.ndarray:
    out = vec
    for _ in range(times):
        if out.size <= 1:
            return np.zeros(1, dtype=complex)
        out = np.sqrt(np.arange(1, out.size)) * out[1:]
    return out


def moment_oracle(
    state: FockState, key: tuple[int, int], *, max_order: int = MAX_ORDER
) -> complex:
    """<a^k psi | a^l psi> by repeated application of the annihilation operator."""
    k, l = key
    _check_order(k, max_order, "creation power")
    _check_order(l, max_order, "annihilation power")
    bra = _annihilate(state.amplitudes, k)
    ket = _annihilate(state.amplitudes, l)
    n = min(bra.size, ket.size)
    return complex(np.vdot(bra[:n], ket[:n]))


def quadrature_mean(state: FockState) -> float:
    """<a + a^dag> = sum_m sqrt(m+1) (C_m C*_{m+1} + C*_m C_{m+1})."""
    c = state.amplitudes
    if c.size < 2:
        return 0.0
    m = np.arange(c.size - 1)
    lo, hi = c[:-1], c[1:]
    return float(np.sum(np.sqrt(m + 1) * (lo * np.conj(hi) + np.conj(lo) * hi)).real)


def factorial_moment(state: FockState, k: int, *, max_order: int = MAX_ORDER) -> float:
    """<a^dag^k a^k> = <N (N-1) ... (N-k+1)>."""
    value = moment(state, (k, k), max_order=max_order)
    if abs(value.imag) > 1e-12 * max(1.0, abs(value.real)):
        raise ArithmeticError(f"factorial moment has imaginary part {value.imag}")
    return value.real


def factorial_moments(state: FockState, kmax: int, *, max_order: int = MAX_ORDER) -> np.ndarray:
    """Array [<N^(0)>, <N^(1)>, ..., <N^(kmax)>]."""
    return np.array([factorial_moment(state, k, max_order=max_order) for k in range(kmax + 1)])


def raw_number_moment(state: FockState, r: int) -> float:
    """<N^r> summed over the photon-number distribution."""
    n = np.arange(state.dim, dtype=float)
    return float(np.sum(n**r * state.probabilities()))


def _apply_x(vec: np.ndarray) -> np.ndarray:
    # X = (a + a^dag)/sqrt(2); the output is one level longer than the input.
    out = np.zeros(vec.size + 1, dtype=complex)
    s = np.sqrt(np.arange(1, vec.size + 1))
    out[:-2] += s[:-1] * vec[1:]
    out[1:] += s * vec
    return out / math.sqrt(2.0)


def x_raw_moments_oracle(state: FockState, n: int) -> np.ndarray:
    """[<X^0>, ..., <X^n>] by repeated application of X to the amplitude vector."""
    psi = state.amplitudes
    # <X^m> = <X^a psi | X^b psi> with a + b = m, a = floor(m/2)
    powers = [psi]
    for _ in range(n - n // 2):
        powers.append(_apply_x(powers[-1]))
    out = np.empty(n + 1)
    for m in range(n + 1):
        a, b = m // 2, m - m // 2
        bra, ket = powers[a], powers[b]
        size = min(bra.size, ket.size)
        out[m] = np.vdot(bra[:size], ket[:size]).real
    return out


def central_x_moment_oracle(state: FockState, n: int, *, max_order: int = MAX_ORDER) -> float:
    """<(X - <X>)^n> from ladder-built raw moments of X = (a + a^dag)/sqrt(2)."""
    if n < 1:
        raise ValueError(f"moment order must be positive, got {n}")
    _check_order(n, max_order)
    raw = x_raw_moments_oracle(state, n)
    mean = raw[1]
    return float(
        math.fsum(math.comb(n, m) * raw[m] * (-mean) ** (n - m) for m in range(n + 1))
    )
