"""Compiled inner loops for summing sum_k c_k L_k^a(x) e^{-x/2}.

Every routine advances the unnormalised Laguerre recurrence for all
abscissas together, one chunk of degrees at a time, so that the
coefficient sequence and 1/(k+1) are tabulated once per chunk.  Each
abscissa i stops after its own number of terms.
"""

import math

import numpy as np
from numba import njit

CHUNK = 1 << 16


@njit(cache=True)
def _power_diff_asym(k, sigma, N):
    # Delta^N (k+1)^{-sigma} from the central-difference expansion
    # (2 sinh(D/2))^N = D^N (1 + N D^2/24 + N(5N-2) D^4/5760 + ...)
    c = k + 1.0 + 0.5 * N
    poch = 1.0
    for i in range(N):
        poch *= sigma + i
    s = sigma + N
    t2 = N * s * (s + 1.0) / (24.0 * c * c)
    t4 = N * (5.0 * N - 2.0) / 5760.0 * s * (s + 1.0) * (s + 2.0) * (s + 3.0) / (c * c * c * c)
    return poch * c ** (-s) * (1.0 + t2 + t4)


@njit(cache=True)
def _coefficients(k0, k1, mode, sigma, N, table):
    # mode 0: (k+1)^{-sigma}; mode 1: explicit table (zero past its end);
    # mode 2: Delta^N (k+1)^{-sigma} with table holding the small-k head
    out = np.empty(k1 - k0)
    for k in range(k0, k1):
        if mode == 0:
            out[k - k0] = math.exp(-sigma * math.log(k + 1.0))
        elif mode == 1:
            out[k - k0] = table[k] if k < table.size else 0.0
        else:
            out[k - k0] = table[k] if k < table.size else _power_diff_asym(k, sigma, N)
    return out


@njit(cache=True)
def abel_levels(xs, alpha, eps, kcount, mode, sigma, table):
    """out[i, j] = sum_{k < kcount[i]} c_k e^{-eps[i, j] k} ell_k(x_i)."""
    nx = xs.size
    nl = eps.shape[1]
    out = np.zeros((nx, nl))
    prev = np.zeros(nx)
    cur = np.exp(-0.5 * xs)
    fac = np.ones((nx, nl))
    decay = np.exp(-eps)
    kmax = 0
    for i in range(nx):
        kmax = max(kmax, kcount[i])
    for k0 in range(0, kmax, CHUNK):
        k1 = min(k0 + CHUNK, kmax)
        coef = _coefficients(k0, k1, mode, sigma, 0, table)
        for i in range(nx):
            if kcount[i] <= k0:
                continue
            x = xs[i]
            p = prev[i]
            c = cur[i]
            stop = min(k1, kcount[i])
            for k in range(k0, stop):
                t = coef[k - k0] * c
                for j in range(nl):
                    out[i, j] += t * fac[i, j]
                    fac[i, j] *= decay[i, j]
                nxt = ((2 * k + alpha + 1.0 - x) * c - (k + alpha) * p) / (k + 1.0)
                p = c
                c = nxt
            prev[i] = p
            cur[i] = c
    return out


@njit(cache=True)
def cesaro_levels(xs, alpha, delta, nlev, mode, sigma, table):
    """(C, delta) means, integer delta, at n = nlev[i, j].

    The (C, delta) sum S_n^delta = sum_{k<=n} A_{n-k}^delta u_k is the
    (delta+1)-fold running sum of the terms, so every n comes out of a
    single pass; the mean divides by A_n^delta.
    """
    nx = xs.size
    nl = nlev.shape[1]
    out = np.zeros((nx, nl))
    acc = np.zeros((nx, delta + 1))
    prev = np.zeros(nx)
    cur = np.exp(-0.5 * xs)
    nmax = np.zeros(nx, dtype=np.int64)
    for i in range(nx):
        for j in range(nl):
            nmax[i] = max(nmax[i], nlev[i, j])
    kmax = 0
    for i in range(nx):
        kmax = max(kmax, nmax[i] + 1)
    for k0 in range(0, kmax, CHUNK):
        k1 = min(k0 + CHUNK, kmax)
        coef = _coefficients(k0, k1, mode, sigma, 0, table)
        for i in range(nx):
            if nmax[i] + 1 <= k0:
                continue
            x = xs[i]
            p = prev[i]
            c = cur[i]
            stop = min(k1, nmax[i] + 1)
            # levels are sorted, so only the next target needs checking
            jn = 0
            while jn < nl and nlev[i, jn] < k0:
                jn += 1
            target = nlev[i, jn] if jn < nl else -1
            for k in range(k0, stop):
                t = coef[k - k0] * c
                acc[i, 0] += t
                for d in range(1, delta + 1):
                    acc[i, d] += acc[i, d - 1]
                while k == target:
                    # A_k^delta = C(k+delta, delta)
                    a = 1.0
                    for d in range(1, delta + 1):
                        a *= (k + d) / d
                    out[i, jn] = acc[i, delta] / a
                    jn += 1
                    target = nlev[i, jn] if jn < nl else -1
                nxt = ((2 * k + alpha + 1.0 - x) * c - (k + alpha) * p) / (k + 1.0)
                p = c
                c = nxt
            prev[i] = p
            cur[i] = c
    return out


@njit(cache=True)
def plain_sum(xs, alpha, kcount, mode, sigma, N, table):
    """sum_{k < kcount[i]} c_k L_k^alpha(x_i) e^{-x_i/2}."""
    nx = xs.size
    out = np.zeros(nx)
    prev = np.zeros(nx)
    cur = np.exp(-0.5 * xs)
    kmax = 0
    for i in range(nx):
        kmax = max(kmax, kcount[i])
    for k0 in range(0, kmax, CHUNK):
        k1 = min(k0 + CHUNK, kmax)
        coef = _coefficients(k0, k1, mode, sigma, N, table)
        for i in range(nx):
            if kcount[i] <= k0:
                continue
            x = xs[i]
            p = prev[i]
            c = cur[i]
            acc = out[i]
            stop = min(k1, kcount[i])
            for k in range(k0, stop):
                acc += coef[k - k0] * c
                nxt = ((2 * k + alpha + 1.0 - x) * c - (k + alpha) * p) / (k + 1.0)
                p = c
                c = nxt
            out[i] = acc
            prev[i] = p
            cur[i] = c
    return out
