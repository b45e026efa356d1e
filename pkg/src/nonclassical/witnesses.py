"""Higher-order nonclassicality witnesses.

Order conventions (chosen so that antibunching and sub-Poissonian witnesses of
the same order probe the same photon-number moment):

* ``hoa_d(state, l)``    = <N^(l+1)> - <N>^(l+1)              (HOA of order l)
* ``hosps_dh(state, l)`` = <(dN)^(l+1)> - <(dN)^(l+1)>_Poisson   (HOSPS of order l)
* ``hos_shm(state, n)``  = <(dX)^n> / ((n-1)!! 2^(-n/2)) - 1     (HOS of even order n)

so l = 1 is ordinary antibunching / sub-Poissonian statistics and n = 2 is
ordinary quadrature squeezing.  A strictly negative value signals
nonclassicality; exact zeros count as classical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, stats

from .combinatorics import double_factorial, stirling2
from .fock import (
    MAX_ORDER,
    FockState,
    factorial_moments,
    moment,
    quadrature_mean,
)
from .states import DEFAULT_TRUNCATION_EPSILON, StateSpec, gbs_factorial_moment

WITNESSES = ("hoa", "hosps", "hos")
POISSON_TAIL = 1e-14


def _check_number_order(l: int, max_order: int) -> None:
    if l < 1:
        raise ValueError(f"witness order must be >= 1, got {l}")
    if l + 1 > max_order:
        raise ValueError(f"witness order {l} needs moments of order {l + 1} > {max_order}")


# -- number-basis witnesses as functions of factorial moments -----------------


def hoa_from_factorial_moments(fm: Sequence[float], l: int) -> float:
    """<N^(l+1)> - <N>^(l+1) given fm[k] = <N^(k)>."""
    return float(fm[l + 1] - fm[1] ** (l + 1))


def number_central_moment_from_factorial(fm: Sequence[float], n: int) -> float:
    """<(N - <N>)^n> = sum_r sum_k S2(r,k) C(n,r) (-<N>)^(n-r) <N^(k)>."""
    mean = fm[1]
    return math.fsum(
        stirling2(r, k) * math.comb(n, r) * (-mean) ** (n - r) * fm[k]
        for r in range(n + 1)
        for k in range(r + 1)
    )


def hosps_from_factorial_moments(fm: Sequence[float], l: int) -> float:
    """Stirling double sum for <(dN)^n> minus its value with <N^(k)> -> <N>^k, n = l+1.

    Replacing the factorial moments by powers of the mean gives exactly the
    Poisson central moment at the same mean.
    """
    n = l + 1
    mean = fm[1]
    return math.fsum(
        stirling2(r, k) * math.comb(n, r) * (-mean) ** (n - r) * (fm[k] - mean**k)
        for r in range(n + 1)
        for k in range(1, r + 1)
    )


# -- state-level witnesses ----------------------------------------------------


def hoa_d(state: FockState, l: int, *, max_order: int = MAX_ORDER) -> float:
    """l-th order antibunching witness d(l) = <N^(l+1)> - <N>^(l+1)."""
    _check_number_order(l, max_order)
    return hoa_from_factorial_moments(factorial_moments(state, l + 1, max_order=max_order), l)


def hosps_dh(state: FockState, l: int, *, max_order: int = MAX_ORDER) -> float:
    """l-th order sub-Poissonian witness d_h(l), via Stirling numbers."""
    _check_number_order(l, max_order)
    return hosps_from_factorial_moments(factorial_moments(state, l + 1, max_order=max_order), l)


def poisson_central_moment(mean: float, n: int, tail: float = POISSON_TAIL) -> float:
    """<(N - mean)^n> for a Poisson law, summed over its mass function."""
    if mean == 0:
        return 0.0
    top = int(stats.poisson.isf(tail, mean)) + 1
    k = np.arange(top + 1)
    return float(np.sum(stats.poisson.pmf(k, mean) * (k - mean) ** n))


def hosps_direct(state: FockState, l: int) -> float:
    """d_h(l) as the state's central moment minus the Poisson one, both by direct sums."""
    n = l + 1
    p = state.probabilities()
    k = np.arange(state.dim)
    mean = float(np.sum(k * p))
    return float(np.sum((k - mean) ** n * p)) - poisson_central_moment(mean, n)


def _check_hos_order(n: int, max_order: int) -> None:
    if n < 2 or n % 2:
        raise ValueError(f"Hong-Mandel squeezing is defined here for even n >= 2, got {n}")
    if n > max_order:
        raise ValueError(f"HOS order {n} exceeds the configured maximum {max_order}")


def hos_central_moment(state: FockState, n: int, *, max_order: int = MAX_ORDER) -> float:
    """<(X - <X>)^n> from normally ordered moments.

    (a + a^dag)^r = sum_i C(r, 2i) (2i-1)!! :(a + a^dag)^(r-2i):, so
    <(dX)^n> = 2^(-n/2) sum_{r,i,k} (-1)^r C(n,r) C(r,2i) (2i-1)!! C(r-2i,k)
               <a + a^dag>^(n-r) <a^dag^k a^(r-2i-k)>.
    """
    _check_hos_order(n, max_order)
    xsum = quadrature_mean(state)
    cache: dict[tuple[int, int], complex] = {}
    total = 0j
    for r in range(n + 1):
        outer = (-1) ** r * math.comb(n, r) * xsum ** (n - r)
        for i in range(r // 2 + 1):
            m = r - 2 * i
            inner = 0j
            for k in range(m + 1):
                key = (k, m - k)
                if key not in cache:
                    cache[key] = moment(state, key, max_order=max_order)
                inner += math.comb(m, k) * cache[key]
            total += outer * math.comb(r, 2 * i) * double_factorial(2 * i - 1) * inner
    return float(total.real) / 2 ** (n / 2)


def hos_threshold(n: int, boundary: str = "gaussian") -> float:
    """Coherent-state value of <(dX)^n>; ``boundary="printed"`` drops the (n-1)!!."""
    if boundary == "gaussian":
        return double_factorial(n - 1) * 0.5 ** (n / 2)
    if boundary == "printed":
        return 0.5 ** (n / 2)
    raise ValueError(f"unknown HOS boundary {boundary!r}")


def hos_shm(
    state: FockState, n: int, *, boundary: str = "gaussian", max_order: int = MAX_ORDER
) -> float:
    """Normalized Hong-Mandel witness S_HM(n); zero for coherent states by default."""
    threshold = hos_threshold(n, boundary)
    return (hos_central_moment(state, n, max_order=max_order) - threshold) / threshold


def evaluate(state: FockState, witness: str, order: int, *, max_order: int = MAX_ORDER) -> float:
    if witness == "hoa":
        return hoa_d(state, order, max_order=max_order)
    if witness == "hosps":
        return hosps_dh(state, order, max_order=max_order)
    if witness == "hos":
        return hos_shm(state, order, max_order=max_order)
    raise ValueError(f"unknown witness {witness!r}; expected one of {WITNESSES}")


def is_nonclassical(value: float) -> bool:
    return value < 0


# -- reports ------------------------------------------------------------------


@dataclass
class WitnessReport:
    label: str
    dim: int
    truncation_epsilon: float
    hoa: dict[int, float] = field(default_factory=dict)
    hosps: dict[int, float] = field(default_factory=dict)
    hos: dict[int, float] = field(default_factory=dict)
    central_x_moments: dict[int, float] = field(default_factory=dict)

    def rows(self) -> list[tuple[str, int, float]]:
        """(witness, order, value) triples in a fixed order."""
        out = [("hoa", l, v) for l, v in sorted(self.hoa.items())]
        out += [("hosps", l, v) for l, v in sorted(self.hosps.items())]
        out += [("hos", n, v) for n, v in sorted(self.hos.items())]
        return out

    def flat(self) -> dict[str, float]:
        """Order-tagged flat mapping, e.g. ``hoa_3``, ``hos_4``, ``dx_4``."""
        out: dict[str, float] = {f"{w}_{o}": v for w, o, v in self.rows()}
        out.update({f"dx_{n}": v for n, v in sorted(self.central_x_moments.items())})
        return out


def witness_report(
    state: FockState,
    *,
    hoa: Sequence[int] = (),
    hosps: Sequence[int] = (),
    hos: Sequence[int] = (),
    max_order: int = MAX_ORDER,
) -> WitnessReport:
    report = WitnessReport(state.label, state.dim, state.truncation_epsilon)
    for l in hoa:
        report.hoa[l] = hoa_d(state, l, max_order=max_order)
    for l in hosps:
        report.hosps[l] = hosps_dh(state, l, max_order=max_order)
    for n in hos:
        cm = hos_central_moment(state, n, max_order=max_order)
        report.central_x_moments[n] = cm
        report.hos[n] = cm / hos_threshold(n) - 1.0
    for value in report.flat().values():
        if not math.isfinite(value):
            raise ArithmeticError(f"non-finite witness value for {state.label}")
    return report


# -- zero crossings -----------------------------------------------------------


def witness_function(
    spec: StateSpec,
    varying: str,
    witness: str,
    order: int,
    *,
    relaxed: bool = False,
    truncation_epsilon: float = DEFAULT_TRUNCATION_EPSILON,
    max_order: int = MAX_ORDER,
) -> Callable[[float], float]:
    """The witness as a function of one state parameter.

    ``relaxed`` evaluates the generalized binomial state's number witnesses
    from its factorial moments, which are polynomial in N and so defined for
    real N.
    """
    name = spec.resolve_param(varying)
    if relaxed:
        if spec.family != "gbs" or name != "N" or witness not in ("hoa", "hosps"):
            raise ValueError("the real relaxation exists only for gbs number witnesses versus N")
        a, b = spec.params["alpha"], spec.params["beta"]
        _check_number_order(order, max_order)
        to_value = hoa_from_factorial_moments if witness == "hoa" else hosps_from_factorial_moments

        def relaxed_f(x: float) -> float:
            fm = [gbs_factorial_moment(a, b, x, k) for k in range(order + 2)]
            return to_value(fm, order)

        return relaxed_f

    def f(x: float) -> float:
        state = spec.with_param(name, x).build(truncation_epsilon)
        return evaluate(state, witness, order, max_order=max_order)

    return f


def _sign(v: float, zero_tol: float) -> int:
    return 0 if abs(v) <= zero_tol else (1 if v > 0 else -1)


def sign_change_brackets(xs: Sequence[float], ys: Sequence[float], zero_tol: float) -> list[tuple[float, float]]:
    """Consecutive grid points (x_i, x_j) where the witness changes strict sign."""
    out = []
    last = None
    for x, y in zip(xs, ys):
        s = _sign(y, zero_tol)
        if s == 0:
            continue
        if last is not None and s != last[1]:
            out.append((last[0], x))
        last = (x, s)
    return out


def find_zero_crossing(
    spec: StateSpec,
    varying: str,
    lo: float,
    hi: float,
    witness: str,
    order: int,
    *,
    relaxed: bool = False,
    resolution: int = 200,
    xtol: float = 1e-4,
    zero_tol: float = 1e-9,
    truncation_epsilon: float = DEFAULT_TRUNCATION_EPSILON,
) -> float | None:
    """First sign change of a witness as ``varying`` runs from ``lo`` to ``hi``.

    Real parameters (and the relaxed GBS N) are scanned on a uniform grid and
    refined by bisection to ``xtol``.  Integer parameters are scanned at every
    integer; the result is the first integer whose sign differs from its
    predecessor.  Returns None when there is no strict sign change.
    """
    if not lo < hi:
        raise ValueError(f"empty range [{lo}, {hi}]")
    f = witness_function(
        spec, varying, witness, order, relaxed=relaxed, truncation_epsilon=truncation_epsilon
    )
    if spec.param_type(varying) is int and not relaxed:
        xs = list(range(math.ceil(lo), math.floor(hi) + 1))
        brackets = sign_change_brackets(xs, [f(x) for x in xs], zero_tol)
        return float(brackets[0][1]) if brackets else None
    xs = np.linspace(lo, hi, resolution + 1)
    brackets = sign_change_brackets(xs, [f(x) for x in xs], zero_tol)
    if not brackets:
        return None
    a, b = brackets[0]
    return float(optimize.bisect(f, a, b, xtol=xtol))
