"""Intermediate-state constructors and per-family closed-form moments.

Families: generalized binomial (``gbs``), negative binomial (``nbs``),
photon-added coherent (``pacs``), hypergeometric (``hs``), plus the limiting
``coherent``, ``fock`` and ``binomial`` states.  Infinite-support states are
cut where the discarded tail carries at most a fraction ``truncation_epsilon``
of the moment sum  sum_n |C_n|^2 (n+1)^MAX_ORDER, and then renormalized.  That
bounds the discarded probability by the same epsilon and keeps every moment the
witnesses use accurate to about epsilon relative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from . import combinatorics as cb
from .fock import MAX_ORDER, FockState, from_amplitudes, moment

DEFAULT_TRUNCATION_EPSILON = 1e-12

# family -> ordered (parameter name, type); "complex" accepts a+bj syntax
FAMILY_PARAMS: dict[str, tuple[tuple[str, type], ...]] = {
    "gbs": (("alpha", float), ("beta", float), ("N", int)),
    "nbs": (("eta", float), ("M", int)),
    "pacs": (("alpha", complex), ("m", int)),
    "hs": (("L", float), ("M", int), ("eta", float)),
    "coherent": (("alpha", complex),),
    "fock": (("n", int),),
    "binomial": (("p", float), ("M", int)),
}

# The figures label the NBS/HS probability parameter p instead of eta.
PARAM_ALIASES = {"nbs": {"p": "eta"}, "hs": {"p": "eta"}}


@dataclass(frozen=True)
class StateSpec:
    """A state family plus its parameters, e.g. ``gbs:alpha=5,beta=5,N=5``."""

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        family = self.family.lower()
        if family not in FAMILY_PARAMS:
            raise ValueError(
                f"unknown state family {self.family!r}; expected one of {sorted(FAMILY_PARAMS)}"
            )
        object.__setattr__(self, "family", family)
        params = {}
        aliases = PARAM_ALIASES.get(family, {})
        for name, value in self.params.items():
            params[aliases.get(name, name)] = value
        expected = dict(FAMILY_PARAMS[family])
        unknown = set(params) - set(expected)
        if unknown:
            raise ValueError(f"{family}: unknown parameter(s) {sorted(unknown)}")
        missing = set(expected) - set(params)
        if missing:
            raise ValueError(f"{family}: missing parameter(s) {sorted(missing)}")
        object.__setattr__(self, "params", {k: _coerce(k, params[k], expected[k]) for k in expected})

    @classmethod
    def parse(cls, text: str) -> StateSpec:
        family, sep, rest = text.strip().partition(":")
        if not sep and family.lower() not in FAMILY_PARAMS:
            raise ValueError(f"cannot parse state {text!r}; expected family:key=value,...")
        params = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, eq, value = item.partition("=")
            if not eq:
                raise ValueError(f"cannot parse parameter {item!r} in {text!r}")
            params[key.strip()] = value.strip()
        return cls(family, params)

    def to_text(self) -> str:
        return f"{self.family}:" + ",".join(
            f"{k}={_format_param(v)}" for k, v in self.params.items()
        )

    def with_param(self, name: str, value) -> StateSpec:
        name = self.resolve_param(name)
        return StateSpec(self.family, {**self.params, name: value})

    def resolve_param(self, name: str) -> str:
        name = PARAM_ALIASES.get(self.family, {}).get(name, name)
        if name not in self.params:
            raise ValueError(
                f"{self.family} has no parameter {name!r}; parameters are {list(self.params)}"
            )
        return name

    def param_type(self, name: str) -> type:
        return dict(FAMILY_PARAMS[self.family])[self.resolve_param(name)]

    def build(self, truncation_epsilon: float = DEFAULT_TRUNCATION_EPSILON) -> FockState:
        return build_state(self, truncation_epsilon)


def _coerce(name: str, value, kind: type):
    if kind is int:
        if isinstance(value, str):
            value = float(value)
        if float(value) != int(float(value)):
            raise ValueError(f"parameter {name} must be an integer, got {value!r}")
        return int(float(value))
    if kind is complex:
        z = complex(value.replace(" ", "")) if isinstance(value, str) else complex(value)
        return z.real if z.imag == 0 else z
    return float(value)


def _format_param(v) -> str:
    if isinstance(v, complex):
        return f"{v.real:g}{v.imag:+g}j"
    return f"{v:g}" if isinstance(v, float) else str(v)


# -- truncation ---------------------------------------------------------------

_BLOCK = 256
_MAX_DIM = 200_000


def _tail_truncated_log_weights(
    log_weight: Callable[[np.ndarray], np.ndarray],
    epsilon: float,
    *,
    offset: int = 0,
    moment_order: int = MAX_ORDER,
) -> np.ndarray:
    """Log-weights w_0, w_1, ... up to the point where the weighted tail is below ``epsilon``.

    Index j sits on photon number j + offset.  The cut is the first K for
    which the tail of u_j = w_j (j+offset+1)^moment_order beyond K is at most
    ``epsilon`` of the sum of u.  The successive ratios u_{j+1}/u_j must be
    non-increasing once below one; the tail is then bounded by u_K r/(1-r)
    with r = u_{K+1}/u_K.
    """
    logs = np.empty(0)
    while logs.size < _MAX_DIM:
        idx = np.arange(logs.size, logs.size + _BLOCK, dtype=float)
        logs = np.concatenate([logs, log_weight(idx)])
        weighted = logs + moment_order * np.log1p(np.arange(logs.size) + offset)
        log_ratio = np.diff(weighted)
        mode = int(np.argmax(weighted))
        K = np.arange(mode, logs.size - 1)
        r = np.exp(log_ratio[K])
        below = r < 1.0
        log_tail = np.full(K.size, np.inf)
        log_tail[below] = weighted[K][below] + log_ratio[K][below] - np.log1p(-r[below])
        ok = log_tail - special.logsumexp(weighted) <= math.log(epsilon)
        if np.any(ok):
            return logs[: K[np.argmax(ok)] + 1]
    raise ValueError(f"state needs more than {_MAX_DIM} levels for tail {epsilon:g}")


def _state_from_log_weights(
    log_prob: np.ndarray, phase: np.ndarray | None, offset: int, epsilon: float, label: str
) -> FockState:
    amps = np.zeros(offset + log_prob.size, dtype=complex)
    mag = np.exp(0.5 * (log_prob - log_prob.max()))
    amps[offset:] = mag if phase is None else mag * phase
    return from_amplitudes(amps, truncation_epsilon=epsilon, label=label)


# -- constructors -------------------------------------------------------------


def gbs_log_probabilities(alpha: float, beta: float, N: int) -> np.ndarray:
    """log |C_n|^2 for the generalized binomial state, n = 0..N.

    |C_n|^2 = C(alpha+n, n) C(beta+N-n, N-n) / C(alpha+beta+N+1, N), a Polya
    (beta-binomial) distribution with shape parameters alpha+1 and beta+1.
    """
    n = np.arange(N + 1, dtype=float)
    a, b = alpha + 1.0, beta + 1.0
    return (
        special.gammaln(N + 1.0)
        - special.gammaln(n + 1.0)
        - special.gammaln(N - n + 1.0)
        + special.betaln(a + n, b + N - n)
        - special.betaln(a, b)
    )


def make_gbs(alpha: float, beta: float, N: int) -> FockState:
    if not alpha > 0 or not beta > 0:
        raise ValueError(f"GBS needs alpha > 0 and beta > 0, got alpha={alpha}, beta={beta}")
    if N < 0 or int(N) != N:
        raise ValueError(f"GBS needs a non-negative integer N, got {N}")
    logp = gbs_log_probabilities(alpha, beta, int(N))
    return _state_from_log_weights(logp, None, 0, 0.0, f"gbs:alpha={alpha:g},beta={beta:g},N={N}")


def gbs_factorial_moment(alpha: float, beta: float, N: float, k: int) -> float:
    """<N^(k)> of the generalized binomial state, analytic in N.

    N (N-1)...(N-k+1) * (a)_k / (a+b)_k with a = alpha+1, b = beta+1.  For
    integer N it coincides with the factorial moments of ``make_gbs``; for
    real N it is the continuation used to locate non-integer sign changes.
    """
    a, b = alpha + 1.0, beta + 1.0
    return float(cb.falling_factorial(N, k) * cb.rising_factorial(a, k) / cb.rising_factorial(a + b, k))


def _nbs_log_weight(eta: float, M: int) -> Callable[[np.ndarray], np.ndarray]:
    def log_weight(j):
        # j counts photons above M
        n = j + M
        return (
            special.gammaln(n + 1) - special.gammaln(M + 1) - special.gammaln(j + 1)
            + (M + 1) * math.log(eta) + j * math.log1p(-eta)
        )

    return log_weight


def make_nbs(eta: float, M: int, truncation_epsilon: float = DEFAULT_TRUNCATION_EPSILON) -> FockState:
    if not 0 < eta <= 1:
        raise ValueError(f"NBS needs 0 < eta <= 1, got {eta}")
    if M < 0:
        raise ValueError(f"NBS needs M >= 0, got {M}")
    label = f"nbs:eta={eta:g},M={M}"
    if eta == 1:
        return make_fock(M, label=label)
    logs = _tail_truncated_log_weights(_nbs_log_weight(eta, M), truncation_epsilon, offset=M)
    return _state_from_log_weights(logs, None, M, truncation_epsilon, label)


def _pacs_log_weight(alpha: complex, m: int) -> Callable[[np.ndarray], np.ndarray]:
    log_abs_alpha = math.log(abs(alpha))

    def log_weight(j):
        # |C_{j+m}|^2 up to normalization: |alpha|^{2j} (m+j)! / (j!)^2
        return 2 * j * log_abs_alpha + special.gammaln(m + j + 1) - 2 * special.gammaln(j + 1)

    return log_weight


def pacs_log_norm(alpha: complex, m: int) -> float:
    """ln of the squared normalization exp(-|a|^2) / (L_m(-|a|^2) m!)."""
    x = abs(alpha) ** 2
    return -x - math.log(cb.laguerre(m, -x)) - cb.log_factorial(m)


def make_pacs(
    alpha: complex, m: int, truncation_epsilon: float = DEFAULT_TRUNCATION_EPSILON
) -> FockState:
    """Photon-added coherent state a^dag^m |alpha> / norm."""
    if m < 0:
        raise ValueError(f"PACS needs m >= 0, got {m}")
    alpha = complex(alpha)
    label = f"pacs:alpha={_format_param(alpha)},m={m}"
    if alpha == 0:
        return make_fock(m, label=label)
    logs = _tail_truncated_log_weights(_pacs_log_weight(alpha, m), truncation_epsilon, offset=m)
    # absolute amplitudes from the Laguerre normalization, so raw_norm reports
    # the mass kept by the truncation
    logs = logs + pacs_log_norm(alpha, m)
    j = np.arange(logs.size)
    phase = np.exp(1j * j * np.angle(alpha))
    amps = np.zeros(m + logs.size, dtype=complex)
    amps[m:] = np.exp(0.5 * logs) * phase
    return from_amplitudes(amps, truncation_epsilon=truncation_epsilon, label=label)


def check_hs_params(L: float, M: int, eta: float) -> None:
    if not 0 < eta < 1:
        raise ValueError(f"HS needs 0 < eta < 1, got {eta}")
    if M < 0:
        raise ValueError(f"HS needs M >= 0, got {M}")
    bound = max(M / eta, M / (1 - eta))
    if L < bound * (1 - 1e-12):
        raise ValueError(
            f"HS needs L >= max(M/eta, M/(1-eta)) = {bound:g}, got L = {L:g}"
        )


def make_hs(L: float, M: int, eta: float) -> FockState:
    check_hs_params(L, M, eta)
    total = cb.log_binomial_real(L, M)
    amps = np.zeros(M + 1)
    for n in range(M + 1):
        w = cb.log_binomial_real(L * eta, n) * cb.log_binomial_real(L * (1 - eta), M - n)
        amps[n] = float((w / total).sqrt())
    return from_amplitudes(amps, label=f"hs:L={L:g},M={M},eta={eta:g}")


def make_coherent(
    alpha: complex, truncation_epsilon: float = DEFAULT_TRUNCATION_EPSILON
) -> FockState:
    alpha = complex(alpha)
    label = f"coherent:alpha={_format_param(alpha)}"
    if alpha == 0:
        return make_fock(0, label=label)
    x = abs(alpha) ** 2
    logs = _tail_truncated_log_weights(
        lambda j: -x + j * math.log(x) - special.gammaln(j + 1), truncation_epsilon
    )
    phase = np.exp(1j * np.arange(logs.size) * np.angle(alpha))
    return from_amplitudes(np.exp(0.5 * logs) * phase, truncation_epsilon=truncation_epsilon, label=label)


def make_fock(n: int, *, label: str | None = None) -> FockState:
    if n < 0:
        raise ValueError(f"Fock state needs n >= 0, got {n}")
    amps = np.zeros(n + 1)
    amps[n] = 1.0
    return from_amplitudes(amps, label=label or f"fock:n={n}")


def make_binomial(p: float, M: int) -> FockState:
    if not 0 <= p <= 1:
        raise ValueError(f"binomial state needs 0 <= p <= 1, got {p}")
    if M < 0:
        raise ValueError(f"binomial state needs M >= 0, got {M}")
    label = f"binomial:p={p:g},M={M}"
    if p in (0, 1):
        return make_fock(M if p == 1 else 0, label=label)
    n = np.arange(M + 1)
    logp = (
        special.gammaln(M + 1) - special.gammaln(n + 1) - special.gammaln(M - n + 1)
        + n * math.log(p) + (M - n) * math.log1p(-p)
    )
    return from_amplitudes(np.exp(0.5 * logp), label=label)


def build_state(spec: StateSpec, truncation_epsilon: float = DEFAULT_TRUNCATION_EPSILON) -> FockState:
    p = spec.params
    f = spec.family
    if f == "gbs":
        return make_gbs(p["alpha"], p["beta"], p["N"])
    if f == "nbs":
        return make_nbs(p["eta"], p["M"], truncation_epsilon)
    if f == "pacs":
        return make_pacs(p["alpha"], p["m"], truncation_epsilon)
    if f == "hs":
        return make_hs(p["L"], p["M"], p["eta"])
    if f == "coherent":
        return make_coherent(p["alpha"], truncation_epsilon)
    if f == "fock":
        return make_fock(p["n"])
    return make_binomial(p["p"], p["M"])


# -- closed-form moments ------------------------------------------------------


def _nbs_closed_form(eta: float, M: int, k: int, l: int, n_top: int) -> float:
    # [eta^{M+1}/(1-eta)^M] sum_n [C(n-l+k, M) C(n, M) (1-eta)^{2n-l+k}
    #                              n! (n-l+k)! / (n-l)!^2]^{1/2}
    lo = max(M, M + l - k, l)
    n = np.arange(lo, min(n_top, n_top + l - k) + 1, dtype=float)
    if n.size == 0:
        return 0.0
    s = n - l + k
    log_terms = 0.5 * (
        _log_comb(s, M) + _log_comb(n, M) + (2 * n - l + k) * math.log1p(-eta)
        + special.gammaln(n + 1) + special.gammaln(s + 1) - 2 * special.gammaln(n - l + 1)
    )
    prefactor = (M + 1) * math.log(eta) - M * math.log1p(-eta)
    return float(np.sum(np.exp(log_terms + prefactor)))


def _log_comb(x: np.ndarray, k: int) -> np.ndarray:
    return special.gammaln(x + 1) - special.gammaln(k + 1) - special.gammaln(x - k + 1)


def _pacs_closed_form(alpha: float, m: int, k: int, l: int, n_top: int) -> float:
    # N^2 sum_n alpha^{2n}/n!^2 (m+n+k-l)! (n+m)! / (n+m-l)!
    lo = max(0, l - m, l - k - m)
    n = np.arange(lo, min(n_top, n_top + l - k) + 1, dtype=float)
    if n.size == 0:
        return 0.0
    log_terms = (
        2 * n * math.log(abs(alpha)) - 2 * special.gammaln(n + 1)
        + special.gammaln(m + n + k - l + 1) + special.gammaln(n + m + 1)
        - special.gammaln(n + m - l + 1)
    )
    return float(np.sum(np.exp(log_terms + pacs_log_norm(alpha, m))))


def _hs_closed_form(L: float, M: int, eta: float, k: int, l: int) -> float:
    if max(k, l) > M:
        return 0.0
    Le, Lr = L * eta, L * (1 - eta)
    lf = cb.log_factorial
    log_pre = (
        lf(M) + lf(Le) - lf(L)
        + 0.5 * (lf(L - k) + lf(L - l) - lf(M - k) - lf(M - l) - lf(Le - k) - lf(Le - l))
    )
    denom = cb.log_binomial_real(L - k, M - k) * cb.log_binomial_real(L - l, M - l)
    total = 0.0
    for n in range(M - max(k, l) + 1):
        num = (
            cb.log_binomial_real(Le - k, n) * cb.log_binomial_real(Lr, M - k - n)
            * cb.log_binomial_real(Le - l, n) * cb.log_binomial_real(Lr, M - l - n)
        )
        total += float((num / denom).sqrt())
    return math.exp(log_pre) * total


def closed_form_moment(
    spec: StateSpec,
    key: tuple[int, int],
    *,
    truncation_epsilon: float = DEFAULT_TRUNCATION_EPSILON,
    max_order: int = MAX_ORDER,
) -> float:
    """<a^dag^k a^l> from the family's own series rather than the generic engine.

    NBS and PACS series are clipped to the levels the constructor keeps.  The
    PACS series assumes real alpha and is only right for k == l.
    """
    k, l = key
    if not (0 <= k <= max_order and 0 <= l <= max_order):
        raise ValueError(f"moment key {key} outside 0..{max_order}")
    p = spec.params
    if spec.family == "nbs":
        if p["eta"] == 1:
            return float(k == l and p["M"] >= k) * math.perm(p["M"], k)
        n_top = make_nbs(p["eta"], p["M"], truncation_epsilon).n_max
        return _nbs_closed_form(p["eta"], p["M"], k, l, n_top)
    if spec.family == "pacs":
        alpha = p["alpha"]
        if isinstance(alpha, complex):
            raise ValueError("the PACS closed form assumes a real alpha")
        if alpha == 0:
            return float(k == l) * math.perm(p["m"], k)
        n_top = make_pacs(alpha, p["m"], truncation_epsilon).n_max - p["m"]
        return _pacs_closed_form(alpha, p["m"], k, l, n_top)
    if spec.family == "hs":
        return _hs_closed_form(p["L"], p["M"], p["eta"], k, l)
    raise ValueError(f"no closed-form moment for family {spec.family!r}")


@dataclass(frozen=True)
class MomentDiscrepancy:
    spec: str
    k: int
    l: int
    closed_form: float
    engine: complex
    rel_error: float


def closed_form_report(
    specs, keys, *, rtol: float = 1e-8, truncation_epsilon: float = DEFAULT_TRUNCATION_EPSILON
) -> list[MomentDiscrepancy]:
    """Every (spec, key) where the closed form and the generic engine disagree beyond ``rtol``."""
    out = []
    for spec in specs:
        state = spec.build(truncation_epsilon)
        for k, l in keys:
            exact = moment(state, (k, l))
            closed = closed_form_moment(spec, (k, l), truncation_epsilon=truncation_epsilon)
            err = abs(closed - exact) / max(abs(exact), 1e-300)
            if err > rtol and abs(closed - exact) > 1e-12:
                out.append(MomentDiscrepancy(spec.to_text(), k, l, closed, exact, err))
    return out
