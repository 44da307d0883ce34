"""Compiled dynamic-programming kernels.

Every recursion here walks the same lattice: cell (i, j) is reachable from
(i-1, j), (i, j-1) and (i-1, j-1).  Sums over the three predecessors are
always grouped as ``(up + left) + diag``; the two single-step terms swap
places when the inputs are transposed, and float addition is commutative,
so mirrored cells come out bitwise equal.  That makes x = y results exactly
symmetric without any post-hoc symmetrization.

The ``*_scaled`` variants keep a rolling two-row working buffer and
multiply it by 2**512 whenever the working maximum falls below 2**-8.
A row spans many alignment-path lengths, hence a huge magnitude range;
the early trigger keeps the working maximum inside [2**-8, 2**504), so
cells up to ~1000 bits below their row maximum stay clear of the
subnormal range.  Power-of-two scaling is exact,
finished rows are written once and never touched again, and the
returned per-row cumulative boost counts let callers recombine any cell
at a common scale afterwards.  When no boost triggers, the scaled sweep
reproduces the plain row-major sweep bitwise.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

BOOST_BITS = 512
_BOOST = 2.0 ** 512
_LOW = 2.0 ** -8


@njit(cache=True, nogil=True)
def emissions(x, y, nu):
    """Local kernel matrix b[i, j] = exp(-nu * ||x_i - y_j||^2)."""
    n = x.shape[0]
    m = y.shape[0]
    d = x.shape[1]
    b = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            s = 0.0
            for k in range(d):
                diff = x[i, k] - y[j, k]
                s += diff * diff
            b[i, j] = math.exp(-nu * s)
    return b


@njit(cache=True, nogil=True)
def diag_emissions(x, y, nu):
    """Same-index local kernel b2[i] = exp(-nu * ||x_i - y_i||^2).

    Indices past the shorter series get 0, which cuts the corridor term's
    off-lattice contributions and keeps the kernel symmetric for unequal
    lengths.
    """
    n = x.shape[0]
    m = y.shape[0]
    d = x.shape[1]
    nmin = min(n, m)
    b2 = np.zeros(max(n, m))
    for i in range(nmin):
        s = 0.0
        for k in range(d):
            diff = x[i, k] - y[i, k]
            s += diff * diff
        b2[i] = math.exp(-nu * s)
    return b2


@njit(cache=True, nogil=True)
def k_forward(b):
    """Full forward table of the kernel's K term, plain row-major sweep."""
    n, m = b.shape
    a = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            up = a[i - 1, j] if i > 0 else 0.0
            left = a[i, j - 1] if j > 0 else 0.0
            if i > 0 and j > 0:
                diag = a[i - 1, j - 1]
            elif i == 0 and j == 0:
                diag = 1.0
            else:
                diag = 0.0
            a[i, j] = (b[i, j] / 3.0) * ((up + left) + diag)
    return a


@njit(cache=True, nogil=True)
def kp_final(b, b2):
    """Final cell of the corridor term K', via a zero-padded table."""
    n, m = b.shape
    kp = np.zeros((n + 1, m + 1))
    kp[0, 0] = 1.0
    for p in range(1, n + 1):
        for q in range(1, m + 1):
            up = kp[p - 1, q] * b2[p - 1]
            left = kp[p, q - 1] * b2[q - 1]
            if p == q:
                diag = kp[p - 1, q - 1] * b[p - 1, q - 1]
            else:
                diag = 0.0
            kp[p, q] = ((up + left) + diag) / 3.0
    return kp[n, m]


@njit(cache=True, nogil=True)
def kdtw_terms(x, y, nu):
    """(k_term, kp_term) of the regularized kernel for one pair."""
    b = emissions(x, y, nu)
    b2 = diag_emissions(x, y, nu)
    a = k_forward(b)
    return a[b.shape[0] - 1, b.shape[1] - 1], kp_final(b, b2)


@njit(cache=True, nogil=True)
def forward_scaled(b):
    """Row-major forward sweep with underflow boosts.

    Returns (a, ca) with true[i, j] = a[i, j] * 2**(-512 * ca[i]).
    Bitwise equal to k_forward(b) whenever ca stays all zero.
    """
    n, m = b.shape
    a = np.empty((n, m))
    ca = np.zeros(n, dtype=np.int64)
    w = np.zeros((2, m))
    nboost = 0
    for i in range(n):
        cur = i % 2
        prev = 1 - cur
        if i >= 1:
            wm = 0.0
            for j in range(m):
                v = w[prev, j]
                if v > wm:
                    wm = v
            while wm > 0.0 and wm < _LOW:
                for j in range(m):
                    w[prev, j] *= _BOOST
                wm *= _BOOST
                nboost += 1
        for j in range(m):
            up = w[prev, j] if i > 0 else 0.0
            left = w[cur, j - 1] if j > 0 else 0.0
            if i > 0 and j > 0:
                diag = w[prev, j - 1]
            elif i == 0 and j == 0:
                diag = 1.0
            else:
                diag = 0.0
            v = (b[i, j] / 3.0) * ((up + left) + diag)
            w[cur, j] = v
            a[i, j] = v
        ca[i] = nboost
    return a, ca


@njit(cache=True, nogil=True)
def recombine(a, bt, csum):
    """Cell-wise product of the scaled sweeps at one common scale.

    csum[i] is the combined boost count of row i.  Each cell is split
    into mantissa and exponent, so the pairing never over- or
    underflows an intermediate: mantissa products stay in (0.25, 1) and
    the integer exponents absorb the boosts.  Returns (post, target)
    with post[i, j] = true_product[i, j] * 2**(-target); the largest
    cell lands near one and cells deeper below it than float64 spans
    flush, exactly as the format itself would.
    """
    n, m = a.shape
    post = np.empty((n, m))
    target = 0
    found = False
    for i in range(n):
        base = -BOOST_BITS * csum[i]
        for j in range(m):
            ma, ea = math.frexp(a[i, j])
            mb, eb = math.frexp(bt[i, j])
            if ma != 0.0 and mb != 0.0:
                e = ea + eb + base
                if not found or e > target:
                    target = e
                    found = True
    for i in range(n):
        base = -BOOST_BITS * csum[i]
        for j in range(m):
            ma, ea = math.frexp(a[i, j])
            mb, eb = math.frexp(bt[i, j])
            post[i, j] = math.ldexp(ma * mb, ea + eb + base - target)
    return post, target


@njit(cache=True, nogil=True)
def backward_scaled(b):
    """Row-major backward sweep, same scaling scheme as forward_scaled.

    The terminal cell is 1; every other cell multiplies its own emission
    into the successor sum.  true[i, j] = bt[i, j] * 2**(-512 * cb[i]).
    """
    n, m = b.shape
    bt = np.empty((n, m))
    cb = np.zeros(n, dtype=np.int64)
    w = np.zeros((2, m))
    nboost = 0
    for i in range(n - 1, -1, -1):
        cur = i % 2
        nxt = 1 - cur
        if i <= n - 2:
            wm = 0.0
            for j in range(m):
                v = w[nxt, j]
                if v > wm:
                    wm = v
            while wm > 0.0 and wm < _LOW:
                for j in range(m):
                    w[nxt, j] *= _BOOST
                wm *= _BOOST
                nboost += 1
        for j in range(m - 1, -1, -1):
            if i == n - 1 and j == m - 1:
                v = 1.0
            else:
                down = w[nxt, j] if i < n - 1 else 0.0
                right = w[cur, j + 1] if j < m - 1 else 0.0
                if i < n - 1 and j < m - 1:
                    dd = w[nxt, j + 1]
                else:
                    dd = 0.0
                v = (b[i, j] / 3.0) * ((down + right) + dd)
            w[cur, j] = v
            bt[i, j] = v
        cb[i] = nboost
    return bt, cb


@njit(cache=True, nogil=True)
def backward_expect(b, a, y):
    """Backward sweep fused with row-conditional expectations.

    Pairs each backward working row with the matching stored forward
    row, normalizes within the row (the per-row boost factors cancel),
    and accumulates the expected sample value and expected 1-based time
    of y under each row's conditional distribution.  The backward
    matrix is never materialized.  Returns (e_vals, e_times, bad) with
    bad the lowest zero-mass row index, or -1 when every row has mass.
    """
    n, m = b.shape
    d = y.shape[1]
    e_vals = np.zeros((n, d))
    e_times = np.zeros(n)
    w = np.zeros((2, m))
    vrow = np.empty(m)
    bad = -1
    for i in range(n - 1, -1, -1):
        cur = i % 2
        nxt = 1 - cur
        if i <= n - 2:
            wm = 0.0
            for j in range(m):
                v = w[nxt, j]
                if v > wm:
                    wm = v
            while wm > 0.0 and wm < _LOW:
                for j in range(m):
                    w[nxt, j] *= _BOOST
                wm *= _BOOST
        for j in range(m - 1, -1, -1):
            if i == n - 1 and j == m - 1:
                v = 1.0
            else:
                down = w[nxt, j] if i < n - 1 else 0.0
                right = w[cur, j + 1] if j < m - 1 else 0.0
                if i < n - 1 and j < m - 1:
                    dd = w[nxt, j + 1]
                else:
                    dd = 0.0
                v = (b[i, j] / 3.0) * ((down + right) + dd)
            w[cur, j] = v
        emax = 0
        found = False
        for j in range(m):
            ma, ea = math.frexp(a[i, j])
            mb, eb = math.frexp(w[cur, j])
            if ma != 0.0 and mb != 0.0:
                e = ea + eb
                if not found or e > emax:
                    emax = e
                    found = True
        if not found:
            bad = i
            continue
        s = 0.0
        for j in range(m):
            ma, ea = math.frexp(a[i, j])
            mb, eb = math.frexp(w[cur, j])
            v = math.ldexp(ma * mb, ea + eb - emax)
            vrow[j] = v
            s += v
        for j in range(m):
            c = vrow[j] / s
            for k in range(d):
                e_vals[i, k] += c * y[j, k]
            e_times[i] += c * (j + 1.0)
    return e_vals, e_times, bad


@njit(cache=True, nogil=True)
def dtw_table(x, y):
    """Cumulative squared-Euclidean cost table."""
    n = x.shape[0]
    m = y.shape[0]
    d = x.shape[1]
    t = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            c = 0.0
            for k in range(d):
                diff = x[i, k] - y[j, k]
                c += diff * diff
            if i == 0 and j == 0:
                t[i, j] = c
            elif i == 0:
                t[i, j] = c + t[0, j - 1]
            elif j == 0:
                t[i, j] = c + t[i - 1, 0]
            else:
                best = t[i - 1, j - 1]
                if t[i - 1, j] < best:
                    best = t[i - 1, j]
                if t[i, j - 1] < best:
                    best = t[i, j - 1]
                t[i, j] = c + best
    return t


@njit(cache=True, nogil=True)
def dtw_cost(x, y):
    t = dtw_table(x, y)
    return t[t.shape[0] - 1, t.shape[1] - 1]


@njit(cache=True, nogil=True)
def dtw_backtrack(t):
    """Optimal path through a cost table, 0-based (L, 2) index array.

    Ties prefer the diagonal predecessor, then (i-1, j), then (i, j-1).
    """
    n, m = t.shape
    path = np.empty((n + m - 1, 2), dtype=np.int64)
    i = n - 1
    j = m - 1
    pos = n + m - 2
    path[pos, 0] = i
    path[pos, 1] = j
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            pd = t[i - 1, j - 1]
            pu = t[i - 1, j]
            pl = t[i, j - 1]
            best = pd
            if pu < best:
                best = pu
            if pl < best:
                best = pl
            if pd == best:
                i -= 1
                j -= 1
            elif pu == best:
                i -= 1
            else:
                j -= 1
        pos -= 1
        path[pos, 0] = i
        path[pos, 1] = j
    return path[pos:].copy()
