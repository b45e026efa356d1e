"""Combinatorial and special-function primitives.

Everything factorial-heavy is done in log space so that amplitudes built from
ratios like n!/(n-l)! stay finite well past n ~ 170.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

# Largest argument for which the exact integer product is used.
_EXACT_FACTORIAL_MAX = 20
# Above this lower argument, binomials go through log-gamma.
_PRODUCT_MAX_K = 64


@dataclass(frozen=True)
class LogValue:
    """A real number stored as sign * exp(log_abs)."""

    log_abs: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if self.sign != 0 and not math.isfinite(self.log_abs):
            raise ValueError("log_abs must be finite for a non-zero value")

    @classmethod
    def zero(cls) -> LogValue:
        return cls(-math.inf, 0)

    @classmethod
    def from_float(cls, x: float) -> LogValue:
        if x == 0:
            return cls.zero()
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    def __mul__(self, other: LogValue) -> LogValue:
        if self.sign == 0 or other.sign == 0:
            return LogValue.zero()
        return LogValue(self.log_abs + other.log_abs, self.sign * other.sign)

    def __truediv__(self, other: LogValue) -> LogValue:
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero LogValue")
        if self.sign == 0:
            return LogValue.zero()
        return LogValue(self.log_abs - other.log_abs, self.sign * other.sign)

    def sqrt(self) -> LogValue:
        if self.sign < 0:
            raise ValueError("square root of a negative LogValue")
        if self.sign == 0:
            return self
        return LogValue(0.5 * self.log_abs, 1)

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)


def log_factorial(n):
    """ln(n!) = ln Gamma(n + 1) for scalar or array ``n >= 0``.

    Integers up to 20 go through the exact product; everything else through
    log-gamma.
    """
    if np.ndim(n) == 0:
        if isinstance(n, (int, np.integer)):
            if n < 0:
                raise ValueError(f"log_factorial of negative argument {n}")
            if n <= _EXACT_FACTORIAL_MAX:
                return math.log(math.factorial(int(n)))
            return math.lgamma(int(n) + 1)
        x = float(n)
        if not x >= 0:
            raise ValueError(f"log_factorial of negative argument {n}")
        return math.lgamma(x + 1.0)
    arr = np.asarray(n, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("log_factorial of negative argument")
    return special.gammaln(arr + 1.0)


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def _is_nonnegative_integer(x: float) -> bool:
    return x >= 0 and float(x).is_integer()


def log_binomial_real(x: float, k: int) -> LogValue:
    """C(x, k) = Gamma(x+1) / (Gamma(k+1) Gamma(x-k+1)) as a LogValue.

    ``x`` may be any real number that is not a negative integer; the upper
    argument of the hypergeometric-state amplitudes is L*eta, which is
    generally non-integer.
    """
    if k < 0 or int(k) != k:
        raise ValueError(f"lower argument must be a non-negative integer, got {k}")
    k = int(k)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"upper argument must be finite, got {x}")
    if k == 0:
        return LogValue(0.0, 1)
    if _is_nonnegative_integer(x):
        if k > x:
            return LogValue.zero()
        return LogValue(math.log(math.comb(int(x), k)), 1)
    if _is_nonpositive_integer(x + 1):
        raise ValueError(f"C({x}, {k}): Gamma(x+1) has a pole at x = {x}")
    if k <= _PRODUCT_MAX_K:
        # falling-factorial product; no factor vanishes since x is not an integer
        factors = x - np.arange(k)
        sign = -1 if np.count_nonzero(factors < 0) % 2 else 1
        return LogValue(math.fsum(np.log(np.abs(factors))) - math.lgamma(k + 1), sign)
    # x - k + 1 cannot be a non-positive integer here: x is not an integer.
    num = special.gammasgn(x + 1) * special.gammasgn(x - k + 1)
    log_abs = math.lgamma(x + 1) - math.lgamma(k + 1) - math.lgamma(x - k + 1)
    return LogValue(log_abs, int(num))


def binomial_real(x: float, k: int) -> float:
    """Generalized binomial coefficient C(x, k) for real ``x``."""
    if _is_nonnegative_integer(float(x)) and k >= 0 and int(k) == k:
        with contextlib.suppress(OverflowError):
            return float(math.comb(int(x), int(k)))
    return float(log_binomial_real(x, k))


def double_factorial(n: int) -> int:
    """n!! with the conventions (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError(f"double factorial undefined for n = {n}")
    out = 1
    for m in range(n, 0, -2):
        out *= m
    return out


@lru_cache(maxsize=None)
def stirling2(r: int, k: int) -> int:
    """Stirling number of the second kind S2(r, k); zero outside 0 <= k <= r."""
    if r < 0 or k < 0 or k > r:
        return 0
    if r == 0:
        return 1  # k == 0 here
    if k == 0:
        return 0
    return k * stirling2(r - 1, k) + stirling2(r - 1, k - 1)


def falling_factorial(x, k: int):
    """x (x-1) ... (x-k+1); works elementwise on arrays."""
    out = np.ones_like(np.asarray(x, dtype=float)) if np.ndim(x) else 1.0
    for i in range(k):
        out = out * (x - i)
    return out


def rising_factorial(x: float, k: int) -> float:
    """Pochhammer symbol x (x+1) ... (x+k-1)."""
    out = 1.0
    for i in range(k):
        out *= x + i
    return out


def laguerre(m: int, x: float) -> float:
    """Laguerre polynomial L_m(x) from its finite sum."""
    if m < 0:
        raise ValueError(f"Laguerre degree must be non-negative, got {m}")
    return math.fsum(math.comb(m, j) * (-x) ** j / math.factorial(j) for j in range(m + 1))
