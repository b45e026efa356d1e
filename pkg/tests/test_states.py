import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from nonclassical.fock import factorial_moment, moment
from nonclassical.states import (
    StateSpec,
    closed_form_moment,
    closed_form_report,
    gbs_factorial_moment,
    make_binomial,
    make_coherent,
    make_fock,
    make_gbs,
    make_hs,
    make_nbs,
    make_pacs,
)
from oracles import polya_probabilities


# -- StateSpec ----------------------------------------------------------------


def test_spec_parse_roundtrip():
    spec = StateSpec.parse("gbs:alpha=5,beta=5,N=5")
    assert spec.family == "gbs"
    assert spec.params == {"alpha": 5.0, "beta": 5.0, "N": 5}
    assert StateSpec.parse(spec.to_text()) == spec


def test_spec_p_alias():
    assert StateSpec.parse("nbs:p=0.3,M=20").params == {"eta": 0.3, "M": 20}
    assert StateSpec.parse("hs:L=40,M=10,eta=0.5").with_param("p", 0.4).params["eta"] == 0.4


def test_spec_complex_alpha():
    spec = StateSpec.parse("pacs:alpha=0.3+0.2j,m=1")
    assert spec.params["alpha"] == 0.3 + 0.2j
    assert StateSpec.parse(spec.to_text()) == spec


@pytest.mark.parametrize(
    "text",
    ["gbs:alpha=5,beta=5", "gbs:alpha=5,beta=5,N=5,x=1", "wigner:x=1", "gbs alpha=5", "nbs:eta=0.5,M=2.5", "fock:n"],
)
def test_spec_parse_errors(text):
    with pytest.raises(ValueError):
        StateSpec.parse(text)


# -- GBS ----------------------------------------------------------------------


def test_gbs_normalized_against_polya_mass():
    state = make_gbs(5, 5, 5)
    exact = [float(p) for p in polya_probabilities(5, 5, 5)]
    assert np.sum(state.probabilities()) == pytest.approx(1, abs=1e-12)
    assert state.probabilities() == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("alpha,beta,N", [(5, 30, 30), (30, 5, 30), (30, 30, 30), (2, 2, 13)])
def test_gbs_distribution_is_exact(alpha, beta, N):
    exact = [float(p) for p in polya_probabilities(alpha, beta, N)]
    state = make_gbs(alpha, beta, N)
    assert state.dim == N + 1  # zero above N
    assert state.probabilities() == pytest.approx(exact, rel=1e-11)


@pytest.mark.parametrize("alpha,beta", [(0, 1), (1, -2)])
def test_gbs_rejects_nonpositive(alpha, beta):
    with pytest.raises(ValueError):
        make_gbs(alpha, beta, 4)


@given(st.floats(0.1, 40), st.floats(0.1, 40), st.integers(0, 40), st.integers(0, 8))
def test_gbs_factorial_moment_continuation_matches_state(alpha, beta, N, k):
    state = make_gbs(alpha, beta, N)
    expected = factorial_moment(state, k)
    assert gbs_factorial_moment(alpha, beta, N, k) == pytest.approx(expected, rel=1e-9, abs=1e-9)


# -- NBS ----------------------------------------------------------------------


def test_nbs_limits():
    assert make_nbs(1, 3).amplitudes.tolist() == make_fock(3).amplitudes.tolist()
    geo = make_nbs(0.5, 0)
    n = np.arange(geo.dim)
    assert geo.probabilities() == pytest.approx(0.5 ** (n + 1), rel=1e-11, abs=1e-14)


def test_nbs_truncation_tail():
    eps = 1e-12
    state = make_nbs(0.6, 20, eps)
    assert abs(np.sum(state.probabilities()) - 1) < 1e-9
    # discarded mass of the untruncated law: photons above n_max
    assert stats.nbinom.sf(state.n_max - 20, 21, 0.6) <= eps
    # the cut is set by the share of sum_n p_n (n+1)^12 beyond n_max
    n = np.arange(20, 2000)
    u = stats.nbinom.pmf(n - 20, 21, 0.6) * (n + 1.0) ** 12
    share = np.cumsum(u[::-1])[::-1] / u.sum()  # share[i]: mass at and above n[i]
    assert share[state.n_max - 20 + 1] <= eps
    assert share[state.n_max - 20] > eps / 100  # not grossly over-long
    assert np.all(state.amplitudes[:20] == 0)


@pytest.mark.parametrize("eta", [0, 1.5, -0.1])
def test_nbs_rejects_eta(eta):
    with pytest.raises(ValueError):
        make_nbs(eta, 3)


# -- PACS ---------------------------------------------------------------------


@pytest.mark.parametrize("alpha", [0.4, 1.0, 0.3 - 0.8j, 2.0])
def test_pacs_m0_is_coherent(alpha):
    pacs, coh = make_pacs(alpha, 0), make_coherent(alpha)
    assert pacs.dim == coh.dim
    assert np.max(np.abs(pacs.amplitudes - coh.amplitudes)) < 1e-10


def test_pacs_alpha0_is_fock():
    assert make_pacs(0, 3).amplitudes.tolist() == make_fock(3).amplitudes.tolist()


def test_pacs_normalization_against_direct_sum():
    # |C_{n+m}|^2 proportional to |alpha|^{2n} (m+n)! / (n!)^2; Laguerre-normalized amplitudes
    # must already sum to one up to the discarded tail
    alpha, m = 0.4, 2
    state = make_pacs(alpha, m)
    direct = math.fsum(alpha ** (2 * n) * math.factorial(m + n) / math.factorial(n) ** 2 for n in range(60))
    norm2 = math.exp(-alpha**2) / (math.factorial(m) * (1 + 2 * alpha**2 + alpha**4 / 2))
    assert norm2 * direct == pytest.approx(1.0, rel=1e-14)
    assert state.raw_norm == pytest.approx(1.0, abs=1e-12)
    assert np.all(state.amplitudes[:m] == 0)


# -- HS -----------------------------------------------------------------------


def test_hs_constraint():
    with pytest.raises(ValueError, match="max"):
        make_hs(10, 8, 0.5)
    with pytest.raises(ValueError):
        make_hs(100, 5, 1.0)
    make_hs(100, 10, 0.9)  # the bound is 100 up to rounding


def test_hs_mean():
    assert factorial_moment(make_hs(40, 10, 0.5), 1) == pytest.approx(5, rel=1e-12)


@given(st.integers(1, 12), st.floats(0.05, 0.95), st.floats(1.0, 5.0))
def test_hs_normalized_and_mean(M, eta, stretch):
    L = stretch * max(M / eta, M / (1 - eta))
    state = make_hs(L, M, eta)
    assert state.dim == M + 1
    assert state.raw_norm == pytest.approx(1, rel=1e-10)
    assert factorial_moment(state, 1) == pytest.approx(M * eta, rel=1e-10)


def test_hs_integer_case_is_hypergeometric():
    state = make_hs(40, 10, 0.25)
    expected = stats.hypergeom.pmf(np.arange(11), 40, 10, 10)
    assert state.probabilities() == pytest.approx(expected, rel=1e-10)


# total variation between HS(L, 10, 0.3) and Binomial(0.3, 10), from exact
# rational arithmetic on the two mass functions
EXACT_TV = {1000: 0.0024491479148139907, 2000: 0.0012217753286369413, 10000: 0.00024390930232261282}


@pytest.mark.parametrize("L", sorted(EXACT_TV))
def test_hs_binomial_limit(L):
    hs = make_hs(L, 10, 0.3).probabilities()
    binom = make_binomial(0.3, 10).probabilities()
    assert 0.5 * np.sum(np.abs(hs - binom)) == pytest.approx(EXACT_TV[L], rel=1e-9)


# -- simple states ------------------------------------------------------------


def test_simple_state_examples():
    assert make_coherent(0).amplitudes.tolist() == [1]
    assert make_binomial(1, 4).amplitudes.tolist() == make_fock(4).amplitudes.tolist()
    assert make_binomial(0, 4).amplitudes.tolist() == [1]
    with pytest.raises(ValueError):
        make_fock(-1)


def test_coherent_is_poisson():
    state = make_coherent(1.5)
    n = np.arange(state.dim)
    assert state.probabilities() == pytest.approx(stats.poisson.pmf(n, 2.25), rel=1e-11, abs=1e-15)


def test_all_families_normalized():
    for text in ["gbs:alpha=2,beta=3,N=9", "nbs:eta=0.2,M=4", "pacs:alpha=1.2,m=3", "hs:L=50,M=9,eta=0.4",
                 "coherent:alpha=2-1j", "fock:n=7", "binomial:p=0.35,M=12"]:
        state = StateSpec.parse(text).build()
        assert abs(np.sum(state.probabilities()) - 1) < 1e-9, text


# -- closed forms -------------------------------------------------------------


def test_closed_form_examples():
    nbs = StateSpec.parse("nbs:eta=0.6,M=20")
    assert closed_form_moment(nbs, (1, 1)) == pytest.approx(moment(make_nbs(0.6, 20), (1, 1)).real, rel=1e-8)
    assert closed_form_moment(StateSpec.parse("pacs:alpha=0.4,m=0"), (2, 2)) == pytest.approx(0.0256, rel=1e-9)
    assert closed_form_moment(StateSpec.parse("hs:L=40,M=10,eta=0.5"), (1, 1)) == pytest.approx(5, rel=1e-12)


def test_closed_form_rejects():
    with pytest.raises(ValueError):
        closed_form_moment(StateSpec.parse("gbs:alpha=1,beta=1,N=3"), (1, 1))
    with pytest.raises(ValueError):
        closed_form_moment(StateSpec.parse("pacs:alpha=0.3+0.1j,m=1"), (1, 1))


NBS_GRID = [f"nbs:eta={e},M={M}" for e in (0.2, 0.5, 0.6, 0.9, 1) for M in (0, 3, 20)]
HS_GRID = [f"hs:L={L},M={M},eta={e}" for L, M, e in [(40, 10, 0.5), (33.3, 7, 0.37), (100, 10, 0.1), (1000, 10, 0.3)]]
PACS_GRID = [f"pacs:alpha={a},m={m}" for a in (0.4, 1.0, 2.0) for m in (0, 1, 4)]
ALL_KEYS = [(k, l) for k in range(7) for l in range(7)]


@pytest.mark.parametrize("text", NBS_GRID + HS_GRID)
def test_closed_forms_agree_with_engine(text):
    assert closed_form_report([StateSpec.parse(text)], ALL_KEYS) == []


@pytest.mark.parametrize("text", PACS_GRID)
def test_pacs_closed_form_diagonal(text):
    assert closed_form_report([StateSpec.parse(text)], [(k, k) for k in range(7)]) == []


def test_pacs_closed_form_off_diagonal_is_reported():
    report = closed_form_report([StateSpec.parse("pacs:alpha=0.4,m=2")], ALL_KEYS)
    assert report and all(d.k != d.l for d in report)
