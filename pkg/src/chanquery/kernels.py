"""Type-class kernels for exact i.i.d. classical computations.

A type table lists every composition ``c`` of ``n`` into ``k`` parts (the
empirical counts of a length-``n`` sequence over a ``k``-letter alphabet)
together with the log multinomial coefficient. Exact error probabilities
of ``n``-fold product distributions are sums over this table.

Each kernel has a numba implementation and a pure-numpy one. The public
functions pick one according to :data:`chanquery._accel.USE_NUMBA`.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np
from scipy.special import gammaln, logsumexp

from . import _accel
from ._accel import njit
from .errors import CapacityError

DEFAULT_TYPE_BUDGET = 5_000_000


def n_compositions(n: int, k: int) -> int:
    return math.comb(n + k - 1, k - 1)


# ---------------------------------------------------------------------------
# composition enumeration


@njit
def _type_table_numba(n, k, total):
    counts = np.zeros((total, k), dtype=np.int64)
    lgam = np.empty(n + 1)
    for i in range(n + 1):
        lgam[i] = math.lgamma(i + 1.0)
    logc = np.empty(total)
    c = np.zeros(k, dtype=np.int64)
    c[0] = n
    row = 0
    while True:
        acc = lgam[n]
        for j in range(k):
            counts[row, j] = c[j]
            acc -= lgam[c[j]]
        logc[row] = acc
        row += 1
        # rightmost position before the last one holding a positive count
        j = k - 2
        while j >= 0 and c[j] == 0:
            j -= 1
        if j < 0:
            break
        c[j] -= 1
        last = c[k - 1]
        c[k - 1] = 0
        c[j + 1] = last + 1
    return counts, logc


def _type_table_numpy(n, k, total):
    if k == 1:
        counts = np.array([[n]], dtype=np.int64)
    elif k == 2:
        first = np.arange(n, -1, -1, dtype=np.int64)
        counts = np.stack([first, n - first], axis=1)
    else:
        # stars and bars: choose k-1 bar positions among n+k-1 slots
        bars = np.array(list(combinations(range(n + k - 1), k - 1)), dtype=np.int64).reshape(-1, k - 1)
        edges = np.concatenate(
            [np.full((len(bars), 1), -1), bars, np.full((len(bars), 1), n + k - 1)], axis=1
        )
        counts = np.diff(edges, axis=1) - 1
        counts = counts[::-1]
    logc = gammaln(n + 1) - gammaln(counts + 1).sum(axis=1)
    return counts, logc


def type_table(n: int, k: int, budget: int = DEFAULT_TYPE_BUDGET):
    """All compositions of ``n`` into ``k`` parts and their log multinomial weights."""
    if n < 0 or k < 1:
        raise ValueError(f"need n >= 0 and k >= 1, got n={n}, k={k}")
    total = n_compositions(n, k)
    if total > budget:
        raise CapacityError(f"{total} type classes for n={n}, alphabet {k} exceeds budget {budget}")
    if _accel.USE_NUMBA:
        return _type_table_numba(n, k, total)
    return _type_table_numpy(n, k, total)


# ---------------------------------------------------------------------------
# log likelihoods of types


@njit
def _type_loglik_numba(counts, logp):
    rows, k = counts.shape
    out = np.empty(rows)
    for r in range(rows):
        acc = 0.0
        for j in range(k):
            c = counts[r, j]
            if c > 0:
                acc += c * logp[j]
        out[r] = acc
    return out


def _type_loglik_numpy(counts, logp):
    finite = np.isfinite(logp)
    out = counts[:, finite] @ logp[finite]
    if not finite.all():
        bad = (counts[:, ~finite] > 0).any(axis=1)
        out = np.where(bad, -np.inf, out)
    return out


def type_loglik(counts: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Log probability of one sequence of each type under i.i.d. ``probs``."""
    with np.errstate(divide="ignore"):
        logp = np.log(np.asarray(probs, dtype=float))
    if _accel.USE_NUMBA:
        return _type_loglik_numba(counts, logp)
    return _type_loglik_numpy(counts, logp)


# ---------------------------------------------------------------------------
# error sums


@njit
def _min_error_numba(logc, la, lb):
    # streaming log-sum-exp of logc + min(la, lb)
    top = -np.inf
    acc = 0.0
    for i in range(logc.shape[0]):
        v = min(la[i], lb[i])
        if v == -np.inf:
            continue
        v += logc[i]
        if v > top:
            acc = acc * math.exp(top - v) + 1.0
            top = v
        else:
            acc += math.exp(v - top)
    if top == -np.inf:
        return 0.0
    return math.exp(top) * acc


def _min_error_numpy(logc, la, lb):
    terms = logc + np.minimum(la, lb)
    if not np.isfinite(terms).any():
        return 0.0
    return float(np.exp(logsumexp(terms)))


def min_error_sum(logc: np.ndarray, la: np.ndarray, lb: np.ndarray) -> float:
    """``sum_i exp(logc_i) * min(exp(la_i), exp(lb_i))`` computed in log domain."""
    if _accel.USE_NUMBA:
        return float(_min_error_numba(logc, la, lb))
    return _min_error_numpy(logc, la, lb)


@njit
def _pgm_error_numba(logc, weighted):
    rows, m = weighted.shape
    top = -np.inf
    acc = 0.0
    for r in range(rows):
        # log of the total mass and of sum_{a<b} 2 w_a w_b
        smax = -np.inf
        for a in range(m):
            if weighted[r, a] > smax:
                smax = weighted[r, a]
        if smax == -np.inf:
            continue
        tot = 0.0
        for a in range(m):
            tot += math.exp(weighted[r, a] - smax)
        log_s = smax + math.log(tot)
        pmax = -np.inf
        for a in range(m):
            for b in range(a + 1, m):
                v = weighted[r, a] + weighted[r, b]
                if v > pmax:
                    pmax = v
        if pmax == -np.inf:
            continue
        ptot = 0.0
        for a in range(m):
            for b in range(a + 1, m):
                ptot += math.exp(weighted[r, a] + weighted[r, b] - pmax)
        v = logc[r] + math.log(2.0) + pmax + math.log(ptot) - log_s
        if v > top:
            acc = acc * math.exp(top - v) + 1.0
            top = v
        else:
            acc += math.exp(v - top)
    if top == -np.inf:
        return 0.0
    return math.exp(top) * acc


def _pgm_error_numpy(logc, weighted):
    m = weighted.shape[1]
    log_s = logsumexp(weighted, axis=1)
    ia, ib = np.triu_indices(m, k=1)
    pairs = weighted[:, ia] + weighted[:, ib]
    log_pairs = logsumexp(pairs, axis=1) + math.log(2.0)
    with np.errstate(invalid="ignore"):
        terms = logc + log_pairs - log_s
    terms = np.where(np.isfinite(log_pairs) & np.isfinite(log_s), terms, -np.inf)
    if not np.isfinite(terms).any():
        return 0.0
    return float(np.exp(logsumexp(terms)))


def pgm_error_sum(logc: np.ndarray, weighted: np.ndarray) -> float:
    """Pretty-good-measurement error summed over types.

    ``weighted[i, m]`` is ``log(p_m) + log P_m(x)`` for one sequence ``x`` of
    type ``i``. Per sequence the PGM error is ``sum_{a != b} w_a w_b / sum_a w_a``,
    which avoids the cancellation in ``1 - success``.
    """
    weighted = np.ascontiguousarray(weighted, dtype=float)
    if _accel.USE_NUMBA:
        return float(_pgm_error_numba(logc, weighted))
    return _pgm_error_numpy(logc, weighted)
