"""Riemann zeta via Euler-Maclaurin, as jets, with cancellation-safe deltas.

The evaluator splits off the pole: zeta(s) = sum_{n<M} n^{-s} + M^{1-s}/(s-1)
+ M^{-s}/2 + Bernoulli corrections.  Every term is elementary, so the same
decomposition yields (a) derivative jets and (b) a stable difference
zeta(sigma+it) - zeta(sigma) in which each term is differenced analytically.
That difference is what keeps remainder computations alive when zeta(sigma)
is ~1/(sigma-1) huge and the true difference is tiny.

The cutoff M scales with |Im s|; corrections use B_2..B_12.
"""

from __future__ import annotations

import math

import numpy as np

from .jets import Jet, power_jet

# B_{2k} for 2k = 2, 4, ..., 12
_B2K = (1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730)
_FACT = [1.0] * 14
for _i in range(1, 14):
    _FACT[_i] = _FACT[_i - 1] * _i

_T_CAP = 4000.0  # beyond this the Euler-Maclaurin cutoff gets impractical


def _cutoff(t: float) -> int:
    return int(max(24, min(3 * abs(t) + 24, 3 * _T_CAP)))


def zeta_jet(s, M: int | None = None) -> Jet:
    """(zeta, zeta', zeta'', zeta''') at complex s with Re(s) > 0, s != 1."""
    s = complex(s)
    if M is None:
        M = _cutoff(s.imag)
    sj = Jet.variable(s)
    total = Jet.const(0.0)
    for n in range(1, M):
        total = total + power_jet(n, s)
    # M^{1-s}/(s-1) + M^{-s}/2
    mpow = power_jet(M, s)
    total = total + (M * mpow) / (sj - 1.0) + 0.5 * mpow
    # sum_k B_{2k}/(2k)! * s(s+1)...(s+2k-2) * M^{1-s-2k}
    rising = Jet.const(1.0)
    j = 0
    for k, b2k in enumerate(_B2K, start=1):
        while j < 2 * k - 1:
            rising = rising * (sj + j)
            j += 1
        total = total + (b2k / _FACT[2 * k] * float(M) ** (1 - 2 * k)) * (rising * mpow)
    return total


def zeta_delta(sigma: float, t: float, M: int | None = None) -> complex:
    """zeta(sigma+it) - zeta(sigma) for real sigma > 0, computed stably.

    Each Euler-Maclaurin term is differenced in closed form; in particular
    the pole term M^{1-s}/(s-1) is differenced algebraically so the result
    stays accurate when sigma-1 is tiny and |t| << 1.
    """
    if t == 0.0:
        return 0.0 + 0.0j
    if M is None:
        M = _cutoff(t)
    u = sigma - 1.0
    total = 0.0 + 0.0j
    # n-sum: n^{-sigma} (e^{-it log n} - 1)
    n = np.arange(2, M, dtype=float)
    ln = np.log(n)
    theta = -t * ln
    eim1 = -2.0 * np.sin(theta / 2.0) ** 2 + 1j * np.sin(theta)
    total += complex(np.sum(np.exp(-sigma * ln) * eim1))
    # pole term: M^{1-s}/(s-1) - M^{1-sigma}/(sigma-1)
    #   = M^{1-sigma} [u(M^{-it}-1) - it] / (u (u+it))
    LM = np.log(M)
    thM = -t * LM
    eM = -2.0 * np.sin(thM / 2.0) ** 2 + 1j * np.sin(thM)  # M^{-it} - 1
    total += M ** (1.0 - sigma) * (u * eM - 1j * t) / (u * (u + 1j * t))
    # half term: (M^{-sigma}/2)(M^{-it}-1)
    total += 0.5 * M ** (-sigma) * eM
    # corrections: c_k [P_k(s) M^{-it} - P_k(sigma)] M^{1-sigma-2k}
    s = complex(sigma, t)
    for k, b2k in enumerate(_B2K, start=1):
        pk_s = 1.0 + 0.0j
        pk_r = 1.0
        for j in range(2 * k - 1):
            pk_s *= s + j
            pk_r *= sigma + j
        ck = b2k / _FACT[2 * k] * float(M) ** (1.0 - sigma - 2 * k)
        total += ck * (pk_s * (1.0 + eM) - pk_r)
    return total


_BUCKET_EDGES = (50.0, 200.0, 800.0, 3200.0, math.inf)


def zeta_delta_vec(sigma: float, ts) -> np.ndarray:
    """Vectorized :func:`zeta_delta` over a t array, bucketed by height.

    Each bucket shares one Euler-Maclaurin cutoff sized to its tallest node,
    so short nodes stay cheap while tall ones stay (within the evaluator's
    validity cap) accurate.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    out = np.empty(ts.shape, dtype=complex)
    att = np.abs(ts)
    lo = 0.0
    for hi in _BUCKET_EDGES:
        mask = (att >= lo) & (att < hi)
        lo = hi
        if not np.any(mask):
            continue
        tb = ts[mask]
        M = _cutoff(float(np.max(np.abs(tb))))
        out[mask] = _zeta_delta_block(sigma, tb, M)
    return out


def _zeta_delta_block(sigma, tb, M):
    u = sigma - 1.0
    n = np.arange(2, M, dtype=float)
    ln = np.log(n)
    theta = np.multiply.outer(-tb, ln)
    eim1 = -2.0 * np.sin(theta / 2.0) ** 2 + 1j * np.sin(theta)
    total = eim1 @ np.exp(-sigma * ln)
    LM = math.log(M)
    thM = -tb * LM
    eM = -2.0 * np.sin(thM / 2.0) ** 2 + 1j * np.sin(thM)
    total += M ** (1.0 - sigma) * (u * eM - 1j * tb) / (u * (u + 1j * tb))
    total += 0.5 * M ** (-sigma) * eM
    s = sigma + 1j * tb
    for k, b2k in enumerate(_B2K, start=1):
        pk_s = np.ones_like(s)
        pk_r = 1.0
        for j in range(2 * k - 1):
            pk_s = pk_s * (s + j)
            pk_r *= sigma + j
        ck = b2k / _FACT[2 * k] * float(M) ** (1.0 - sigma - 2 * k)
        total += ck * (pk_s * (1.0 + eM) - pk_r)
    return total


def zeta_vec(s_values: np.ndarray) -> np.ndarray:
    """Vectorized zeta over an array of complex s (one shared cutoff per call).

    The cutoff follows the largest |Im s| in the batch; callers integrating
    over tall t-ranges should chunk by height to keep M proportionate.
    """
    s = np.asarray(s_values, dtype=complex)
    M = _cutoff(float(np.max(np.abs(s.imag))) if s.size else 0.0)
    n = np.arange(1, M, dtype=float)
    out = np.exp(np.multiply.outer(-s, np.log(n))).sum(axis=-1)
    mpow = np.exp(-s * np.log(M))
    out += M * mpow / (s - 1.0) + 0.5 * mpow
    rising = np.ones_like(s)
    j = 0
    for k, b2k in enumerate(_B2K, start=1):
        while j < 2 * k - 1:
            rising = rising * (s + j)
            j += 1
        out += (b2k / _FACT[2 * k] * float(M) ** (1 - 2 * k)) * rising * mpow
    return out
