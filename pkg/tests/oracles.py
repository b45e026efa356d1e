"""Independent reference computations used only by the tests.

Nothing here imports the package's numerics.
"""

from fractions import Fraction
from math import comb, factorial

import numpy as np


def polya_probabilities(alpha: int, beta: int, N: int) -> list[Fraction]:
    """Exact generalized-binomial photon distribution for integer parameters."""
    weights = [Fraction(comb(alpha + n, n) * comb(beta + N - n, N - n)) for n in range(N + 1)]
    total = sum(weights)
    assert total == comb(alpha + beta + N + 1, N)
    return [w / total for w in weights]


def exact_number_witnesses(probs: list[Fraction], l: int) -> tuple[Fraction, float]:
    """(d(l), d_h(l)) from an exact distribution; d_h uses a float Poisson sum."""
    n = l + 1
    mean = sum(k * p for k, p in enumerate(probs))
    falling = sum(p * Fraction(factorial(k), factorial(k - n)) for k, p in enumerate(probs) if k >= n)
    d = falling - mean**n
    central = sum(p * (k - mean) ** n for k, p in enumerate(probs))
    return d, float(central) - brute_poisson_central_moment(float(mean), n)


def brute_poisson_central_moment(mean: float, n: int, tail: float = 1e-16) -> float:
    """Sum (k - mean)^n Poisson(k; mean) by recurrence until the terms vanish."""
    total, pk, k = 0.0, np.exp(-mean), 0
    while True:
        total += pk * (k - mean) ** n
        k += 1
        pk *= mean / k
        if k > mean and pk * (k - mean + 1) ** n < tail * max(1.0, abs(total)):
            return total


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def count_partitions(r: int, k: int) -> int:
    return sum(1 for p in set_partitions(list(range(r))) if len(p) == k)


def dense_quadrature_central_moment(amplitudes, n: int) -> float:
    """<(X - <X>)^n> with explicit padded ladder matrices."""
    c = np.asarray(amplitudes, dtype=complex)
    dim = c.size + n + 1
    psi = np.zeros(dim, dtype=complex)
    psi[: c.size] = c
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    x = (a + a.T) / np.sqrt(2)
    mean = np.vdot(psi, x @ psi).real
    y = x - mean * np.eye(dim)
    v = psi
    for _ in range(n // 2):
        v = y @ v
    w = y @ v if n % 2 else v
    return float(np.vdot(v, w).real)


def chi_square_bins(expected_probs, counts, min_expected=5.0):
    """Merge sparse cells so every bin expects at least ``min_expected`` events."""
    shots = counts.sum()
    exp_bins, obs_bins = [], []
    e_acc = o_acc = 0.0
    for p, c in zip(expected_probs, counts):
        e_acc += p * shots
        o_acc += c
        if e_acc >= min_expected:
            exp_bins.append(e_acc)
            obs_bins.append(o_acc)
            e_acc = o_acc = 0.0
    if e_acc or o_acc:
        if exp_bins:
            exp_bins[-1] += e_acc
            obs_bins[-1] += o_acc
        else:
            exp_bins.append(e_acc)
            obs_bins.append(o_acc)
    exp_bins = np.array(exp_bins)
    return np.array(obs_bins), exp_bins * shots / exp_bins.sum()


