"""Numpy implementations of the coefficient-arithmetic hot kernels.

Arrays are 1-indexed: position 0 is unused and kept at zero, so an array of
length N+1 holds values for n = 1..N.  The compiled backend in
``_ckernels.pyx`` mirrors these routines loop for loop; this module is the
reference implementation and the fallback when no extension is built.

The exp/log transforms use a block-doubling sweep: once f(1..B) are final,
every divisor pair (d, m) with d >= 2 and d*m in (B, 2B] has m <= B, so the
whole next block can be accumulated from finished values.  Total work is
O(N log N).
"""

import numpy as np

BACKEND = "python"

_RESYNC = 256  # phase-recurrence refresh interval for eval_uniform


def conv(f, g, N):
    """Dirichlet convolution out[n] = sum_{d|n} f[d]*g[n/d] for n <= N."""
    out = np.zeros(N + 1)
    for d in range(1, N + 1):
        fd = f[d]
        if fd != 0.0:
            m = N // d
            out[d :: d] += fd * g[1 : m + 1]
    return out


def exp_transform(h, logn, N):
    """Coefficients of exp(H) from coefficients of H.

    Recurrence: f(n) log n = sum_{d|n, d>1} h(d) log d * f(n/d), f(1) = e^h(1).
    """
    f = np.zeros(N + 1)
    f[1] = np.exp(h[1])
    if N == 1:
        return f
    g = h * logn  # g[1] = 0
    B = 1
    while B < N:
        hi = min(2 * B, N)
        acc = np.zeros(hi - B)
        for d in range(2, hi // 2 + 1):
            gd = g[d]
            if gd == 0.0:
                continue
            mlo = B // d + 1
            mhi = hi // d
            if mhi < mlo:
                continue
            acc[d * mlo - (B + 1) : d * mhi - (B + 1) + 1 : d] += gd * f[mlo : mhi + 1]
        acc += g[B + 1 : hi + 1] * f[1]
        f[B + 1 : hi + 1] = acc / logn[B + 1 : hi + 1]
        B = hi
    return f


def log_transform(f, logn, N):
    """Inverse of :func:`exp_transform`; requires f[1] > 0."""
    h = np.zeros(N + 1)
    h[1] = np.log(f[1])
    if N == 1:
        return h
    g = np.zeros(N + 1)  # g[n] = h[n]*log(n)
    f1 = f[1]
    B = 1
    while B < N:
        hi = min(2 * B, N)
        acc = np.zeros(hi - B)
        for d in range(2, hi // 2 + 1):
            gd = g[d]
            if gd == 0.0:
                continue
            mlo = B // d + 1
            mhi = hi // d
            if mhi < mlo:
                continue
            acc[d * mlo - (B + 1) : d * mhi - (B + 1) + 1 : d] += gd * f[mlo : mhi + 1]
        g[B + 1 : hi + 1] = (f[B + 1 : hi + 1] * logn[B + 1 : hi + 1] - acc) / f1
        B = hi
    h[2:] = g[2:] / logn[2:]
    return h


def eval_uniform(coeffs, logn, sigma, t0, dt, J):
    """F(sigma + i t_j) for t_j = t0 + j*dt, j = 0..J-1.

    Uses a per-term phase recurrence along j (one complex multiply per term
    per node) with a periodic resync against accumulated rounding drift.
    """
    w = coeffs[1:] * np.exp(-sigma * logn[1:])
    L = logn[1:]
    out = np.empty(J, dtype=complex)
    phase = np.exp(-1j * t0 * L)
    step = np.exp(-1j * dt * L)
    for j in range(J):
        if j and j % _RESYNC == 0:
            phase = np.exp(-1j * (t0 + j * dt) * L)
        out[j] = np.dot(w, phase)
        phase *= step
    return out


def eval_at(coeffs, logn, sigma, ts, budget=4_000_000):
    """F(sigma + i t) for an arbitrary array of t values.

    Node chunks are sized so the (nodes x terms) phase matrix stays under
    ``budget`` entries.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    w = coeffs[1:] * np.exp(-sigma * logn[1:])
    L = logn[1:]
    out = np.empty(ts.shape, dtype=complex)
    rows = max(1, budget // max(1, L.size))
    for lo in range(0, ts.size, rows):
        hi = min(lo + rows, ts.size)
        out[lo:hi] = np.exp(np.multiply.outer(-1j * ts[lo:hi], L)) @ w
    return out
