"""Shared brute-force oracles, independent of the library's fast paths."""

import math

import numpy as np


def divisor_conv(f, g):
    """Dirichlet convolution by direct divisor enumeration (1-indexed arrays)."""
    N = min(len(f), len(g)) - 1
    out = np.zeros(N + 1)
    for n in range(1, N + 1):
        s = 0.0
        for d in range(1, n + 1):
            if n % d == 0:
                s += f[d] * g[n // d]
        out[n] = s
    return out


def exp_bruteforce(h, conv=None):
    """exp of a log-series via sum_k H0^{*k}/k! convolution powers.

    Splitting off h(1): exp(H) = e^{h(1)} * exp(H0) where H0 is supported on
    n >= 2, so H0^{*k} vanishes beyond k = log2(N) and the sum terminates.
    """
    conv = conv or divisor_conv
    N = len(h) - 1
    h0 = np.array(h, dtype=float)
    h0[1] = 0.0
    unit = np.zeros(N + 1)
    unit[1] = 1.0
    total = unit.copy()
    power = unit.copy()
    kmax = max(1, int(math.log2(max(N, 2))) + 1)
    fact = 1.0
    for k in range(1, kmax + 1):
        power = conv(power, h0)
        fact *= k
        total += power / fact
        if not np.any(power):
            break
    return math.exp(h[1]) * total


def log_bruteforce(f, conv=None):
    """log of a coefficient series via -sum_k (-1)^k (F/f(1) - 1)^{*k} / k."""
    conv = conv or divisor_conv
    N = len(f) - 1
    g = np.array(f, dtype=float) / f[1]
    g[1] = 0.0  # G = F/f(1) - unit
    total = np.zeros(N + 1)
    power = None
    kmax = max(1, int(math.log2(max(N, 2))) + 1)
    for k in range(1, kmax + 1):
        power = g.copy() if power is None else conv(power, g)
        total += ((-1.0) ** (k + 1) / k) * power
        if not np.any(power):
            break
    total[1] = math.log(f[1])
    return total


def simpson(fvals, xs):
    """Composite Simpson on an odd-length uniform grid."""
    n = len(xs) - 1
    assert n % 2 == 0
    w = (xs[-1] - xs[0]) / n
    weights = np.ones(n + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return (w / 3.0) * np.sum(weights * np.asarray(fvals))
