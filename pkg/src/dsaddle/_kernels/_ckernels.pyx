# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled coefficient-arithmetic kernels.

Mirrors ``_pykernels`` routine for routine; arrays are 1-indexed with
position 0 unused.  See that module for the algorithm notes.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp as cexp, log as clog, cos, sin

cnp.import_array()

BACKEND = "c"

cdef int _RESYNC = 256


def conv(double[::1] f, double[::1] g, Py_ssize_t N):
    out_arr = np.zeros(N + 1)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t d, m, mmax
    cdef double fd
    for d in range(1, N + 1):
        fd = f[d]
        if fd != 0.0:
            mmax = N // d
            for m in range(1, mmax + 1):
                out[d * m] += fd * g[m]
    return out_arr


def exp_transform(double[::1] h, double[::1] logn, Py_ssize_t N):
    f_arr = np.zeros(N + 1)
    cdef double[::1] f = f_arr
    cdef double[::1] g
    cdef double[::1] acc
    cdef Py_ssize_t B, hi, d, m, mlo, mhi, n
    cdef double gd, f1

    f[1] = cexp(h[1])
    if N == 1:
        return f_arr
    g_arr = np.asarray(h) * np.asarray(logn)
    g = g_arr
    acc_arr = np.zeros(N)
    acc = acc_arr
    f1 = f[1]
    B = 1
    while B < N:
        hi = min(2 * B, N)
        for n in range(hi - B):
            acc[n] = 0.0
        for d in range(2, hi // 2 + 1):
            gd = g[d]
            if gd == 0.0:
                continue
            mlo = B // d + 1
            mhi = hi // d
            for m in range(mlo, mhi + 1):
                acc[d * m - (B + 1)] += gd * f[m]
        for n in range(B + 1, hi + 1):
            f[n] = (acc[n - (B + 1)] + g[n] * f1) / logn[n]
        B = hi
    return f_arr


def log_transform(double[::1] f, double[::1] logn, Py_ssize_t N):
    h_arr = np.zeros(N + 1)
    cdef double[::1] h = h_arr
    cdef Py_ssize_t B, hi, d, m, mlo, mhi, n
    cdef double gd, f1

    h[1] = clog(f[1])
    if N == 1:
        return h_arr
    g_arr = np.zeros(N + 1)
    cdef double[::1] g = g_arr
    acc_arr = np.zeros(N)
    cdef double[::1] acc = acc_arr
    f1 = f[1]
    B = 1
    while B < N:
        hi = min(2 * B, N)
        for n in range(hi - B):
            acc[n] = 0.0
        for d in range(2, hi // 2 + 1):
            gd = g[d]
            if gd == 0.0:
                continue
            mlo = B // d + 1
            mhi = hi // d
            for m in range(mlo, mhi + 1):
                acc[d * m - (B + 1)] += gd * f[m]
        for n in range(B + 1, hi + 1):
            g[n] = (f[n] * logn[n] - acc[n - (B + 1)]) / f1
        B = hi
    for n in range(2, N + 1):
        h[n] = g[n] / logn[n]
    return h_arr


def eval_uniform(double[::1] coeffs, double[::1] logn, double sigma,
                 double t0, double dt, Py_ssize_t J):
    cdef Py_ssize_t N = coeffs.shape[0] - 1
    out_arr = np.empty(J, dtype=complex)
    cdef double complex[::1] out = out_arr
    w_arr = np.empty(N)
    pr_arr = np.empty(N)
    pi_arr = np.empty(N)
    sr_arr = np.empty(N)
    si_arr = np.empty(N)
    cdef double[::1] w = w_arr, pr = pr_arr, pi = pi_arr, sr = sr_arr, si = si_arr
    cdef Py_ssize_t n, j
    cdef double t, accr, acci, tr, L

    for n in range(N):
        L = logn[n + 1]
        w[n] = coeffs[n + 1] * cexp(-sigma * L)
        sr[n] = cos(dt * L)
        si[n] = -sin(dt * L)
    for j in range(J):
        t = t0 + j * dt
        if j % _RESYNC == 0:
            for n in range(N):
                L = logn[n + 1]
                pr[n] = cos(t * L)
                pi[n] = -sin(t * L)
        accr = 0.0
        acci = 0.0
        for n in range(N):
            accr += w[n] * pr[n]
            acci += w[n] * pi[n]
            tr = pr[n] * sr[n] - pi[n] * si[n]
            pi[n] = pr[n] * si[n] + pi[n] * sr[n]
            pr[n] = tr
        out[j] = accr + 1j * acci
    return out_arr


def eval_at(double[::1] coeffs, double[::1] logn, double sigma, ts, budget=0):
    cdef Py_ssize_t N = coeffs.shape[0] - 1
    ts_arr = np.atleast_1d(np.asarray(ts, dtype=float))
    cdef double[::1] tv = ts_arr
    cdef Py_ssize_t J = tv.shape[0]
    out_arr = np.empty(J, dtype=complex)
    cdef double complex[::1] out = out_arr
    w_arr = np.empty(N)
    cdef double[::1] w = w_arr
    cdef Py_ssize_t n, j
    cdef double t, accr, acci, ph, L

    for n in range(N):
        w[n] = coeffs[n + 1] * cexp(-sigma * logn[n + 1])
    for j in range(J):
        t = tv[j]
        accr = 0.0
        acci = 0.0
        for n in range(N):
            if w[n] != 0.0:
                ph = t * logn[n + 1]
                accr += w[n] * cos(ph)
                acci -= w[n] * sin(ph)
        out[j] = accr + 1j * acci
    return out_arr
