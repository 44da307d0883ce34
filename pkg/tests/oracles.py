"""Independent brute-force references the fast implementations are tested against.

Everything here trades speed for obviousness: explicit path enumeration
for the warping measures, log-domain recursions for the alignment
probabilities.  Nothing imports from the package internals beyond the
public array conventions.
"""

from __future__ import annotations

import math

import numpy as np

_STEPS = ((1, 0), (0, 1), (1, 1))


def enumerate_paths(n: int, m: int):
    """All monotone index paths from (1,1) to (n,m), 1-based."""
    paths = []

    def walk(i, j, acc):
        if i == n and j == m:
            paths.append(list(acc))
            return
        for di, dj in _STEPS:
            ni, nj = i + di, j + dj
            if ni <= n and nj <= m:
                acc.append((ni, nj))
                walk(ni, nj, acc)
                acc.pop()

    walk(1, 1, [(1, 1)])
    return paths


def _sq(a, b) -> float:
    diff = np.asarray(a, dtype=float).ravel() - np.asarray(b, dtype=float).ravel()
    acc = 0.0
    for v in diff:
        acc += float(v) * float(v)
    return acc


def dtw_oracle(x: np.ndarray, y: np.ndarray) -> float:
    """Exhaustive minimum alignment cost over all enumerated paths."""
    x = np.atleast_2d(np.asarray(x, dtype=float).T).T
    y = np.atleast_2d(np.asarray(y, dtype=float).T).T
    best = math.inf
    for path in enumerate_paths(len(x), len(y)):
        cost = sum(_sq(x[i - 1], y[j - 1]) for i, j in path)
        best = min(best, cost)
    return best


def kdtw_k_oracle(x: np.ndarray, y: np.ndarray, nu: float) -> float:
    """Path-sum form of the kernel's first term.

    Each path contributes (1/3)^#cells times the product of local
    emissions exp(-nu * squared distance) over its cells.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float).T).T
    y = np.atleast_2d(np.asarray(y, dtype=float).T).T
    total = 0.0
    for path in enumerate_paths(len(x), len(y)):
        term = (1.0 / 3.0) ** len(path)
        for i, j in path:
            term *= math.exp(-nu * _sq(x[i - 1], y[j - 1]))
        total += term
    return total


# ---------------------------------------------------------------------------
# Log-domain forward/backward, immune to underflow by construction


def _logsumexp(values) -> float:
    vals = [v for v in values if v != -math.inf]
    if not vals:
        return -math.inf
    top = max(vals)
    return top + math.log(sum(math.exp(v - top) for v in vals))


def log_emissions(x: np.ndarray, y: np.ndarray, nu: float) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float).T).T
    y = np.atleast_2d(np.asarray(y, dtype=float).T).T
    n, m = len(x), len(y)
    lb = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            lb[i, j] = -nu * _sq(x[i], y[j])
    return lb


def log_forward(lb: np.ndarray) -> np.ndarray:
    n, m = lb.shape
    la = np.full((n, m), -math.inf)
    log3 = math.log(3.0)
    for i in range(n):
        for j in range(m):
            if i == 0 and j == 0:
                prev = 0.0
            else:
                terms = []
                if i > 0:
                    terms.append(la[i - 1, j])
                if j > 0:
                    terms.append(la[i, j - 1])
                if i > 0 and j > 0:
                    terms.append(la[i - 1, j - 1])
                prev = _logsumexp(terms)
            la[i, j] = lb[i, j] - log3 + prev
    return la


def log_backward(lb: np.ndarray) -> np.ndarray:
    n, m = lb.shape
    lbt = np.full((n, m), -math.inf)
    log3 = math.log(3.0)
    lbt[n - 1, m - 1] = 0.0
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if i == n - 1 and j == m - 1:
                continue
            terms = []
            if i + 1 < n:
                terms.append(lbt[i + 1, j])
            if j + 1 < m:
                terms.append(lbt[i, j + 1])
            if i + 1 < n and j + 1 < m:
                terms.append(lbt[i + 1, j + 1])
            lbt[i, j] = lb[i, j] - log3 + _logsumexp(terms)
    return lbt


def log_row_conditionals(x: np.ndarray, y: np.ndarray, nu: float) -> np.ndarray:
    """Row-normalized alignment posterior computed wholly in log space."""
    lb = log_emissions(x, y, nu)
    lp = log_forward(lb) + log_backward(lb)
    out = np.zeros_like(lp)
    for i in range(lp.shape[0]):
        row = lp[i]
        z = _logsumexp(list(row))
        for j in range(lp.shape[1]):
            out[i, j] = 0.0 if row[j] == -math.inf else math.exp(row[j] - z)
    return out


def rand_series(rng: np.random.Generator, n: int, d: int = 1) -> np.ndarray:
    return rng.normal(size=(n, d))
