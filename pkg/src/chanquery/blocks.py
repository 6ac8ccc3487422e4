"""Block-diagonal representations of tensor powers ``rho^n`` and ``sigma^n``.

Both Helstrom errors and Neyman-Pearson tests of i.i.d. pairs only need
``p rho^n - q sigma^n`` up to unitary equivalence. For qubits, Schur-Weyl
duality splits ``(C^2)^{⊗n}`` into spin-``j`` irreps, each repeated
``mult_j`` times. Both tensor powers act on an irrep as the spin-``j``
representation of the single-copy operator. That turns a ``2^n`` problem into
``O(n)`` blocks of size at most ``n + 1``.

A block stores scaled matrices ``a, b`` and a log weight ``w`` such that the
full operators are ``⊕ exp(w) (a, b)``. The weight absorbs both the
multiplicity and a common scale, so nothing underflows at large ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import logm
from scipy.special import gammaln

from .channels import DEFAULT_DIM_BUDGET, tensor_power
from .linalg import TIE_TOL


@dataclass(frozen=True)
class Block:
    log_weight: float
    a: np.ndarray
    b: np.ndarray


def brute_force_blocks(rho, sigma, n: int, budget: int = DEFAULT_DIM_BUDGET) -> list[Block]:
    return [Block(0.0, tensor_power(rho, n, budget), tensor_power(sigma, n, budget))]


def spin_operators(j2: int):
    """Spin matrices ``(Jx, Jy, Jz)`` for spin ``j2 / 2`` in the basis ``m = j, ..., -j``."""
    j = j2 / 2
    m = j - np.arange(j2 + 1)
    jz = np.diag(m).astype(complex)
    # <m+1| J+ |m> sits just above the diagonal in descending-m ordering
    up = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    jp = np.diag(up, k=1).astype(complex)
    jm = jp.conj().T
    return (jp + jm) / 2, (jp - jm) / 2j, jz


_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _su2_generator(g: np.ndarray) -> np.ndarray:
    """Coefficients ``c`` with ``g ∝ exp(i sum_a c_a sigma_a / 2)``."""
    k = -1j * logm(g)
    k = (k + k.conj().T) / 2
    return np.array([float(np.real(np.trace(k @ s))) for s in _PAULI])


def _log_diag(w1: float, w2: float, n: int, j2: int) -> np.ndarray:
    """``log(w1^(n/2+m) w2^(n/2-m))`` for ``m = j, ..., -j``, with ``0^0 = 1``."""
    m2 = j2 - 2 * np.arange(j2 + 1)  # 2m
    e1 = (n + m2) / 2
    e2 = (n - m2) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        l1, l2 = np.log(w1), np.log(w2)
        t1 = np.where(e1 > 0, e1 * l1, 0.0)
        t2 = np.where(e2 > 0, e2 * l2, 0.0)
    return t1 + t2


def log_irrep_multiplicity(n: int, j2: int) -> float:
    """Log multiplicity of spin ``j2/2`` in ``(C^2)^{⊗n}``."""
    k = (n - j2) // 2
    return float(
        gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1) + np.log((n - 2 * k + 1) / (n - k + 1))
    )


def qubit_blocks(rho: np.ndarray, sigma: np.ndarray, n: int) -> list[Block]:
    """Schur-Weyl blocks of ``rho^n`` and ``sigma^n`` for qubit states."""
    lr, ur = np.linalg.eigh(rho)
    ls, us = np.linalg.eigh(sigma)
    lr, ls = np.clip(lr[::-1], 0, None), np.clip(ls[::-1], 0, None)
    ur, us = ur[:, ::-1], us[:, ::-1]
    coeff = _su2_generator(ur.conj().T @ us)
    blocks = []
    for j2 in range(n, -1, -2):
        log_a = _log_diag(lr[0], lr[1], n, j2)
        log_b = _log_diag(ls[0], ls[1], n, j2)
        scale = max(np.max(log_a), np.max(log_b))
        if scale == -np.inf:
            continue
        jx, jy, jz = spin_operators(j2)
        gen = coeff[0] * jx + coeff[1] * jy + coeff[2] * jz
        w, v = np.linalg.eigh(gen)
        rot = (v * np.exp(1j * w)) @ v.conj().T
        a = np.diag(np.exp(log_a - scale)).astype(complex)
        b = (rot * np.exp(log_b - scale)) @ rot.conj().T
        blocks.append(Block(log_irrep_multiplicity(n, j2) + scale, a, (b + b.conj().T) / 2))
    return blocks


# ---------------------------------------------------------------------------
# quantities on block representations


def helstrom_error_blocks(p: float, blocks: list[Block]) -> float:
    """``(1 - ||p rho^n - q sigma^n||_1) / 2`` summed over blocks."""
    q = 1 - p
    norm = 0.0
    for blk in blocks:
        ev = np.linalg.eigvalsh(p * blk.a - q * blk.b)
        norm += np.exp(blk.log_weight) * float(np.sum(np.abs(ev)))
    return max(0.5 * (1.0 - norm), 0.0)


def _test_masses(blocks: list[Block], t: float):
    """Masses of ``rho^n`` and ``sigma^n`` on the projector ``{rho^n - t sigma^n > 0}``."""
    alpha = beta = 0.0
    for blk in blocks:
        w, v = np.linalg.eigh(blk.a - t * blk.b)
        # the tie tolerance is relative to the block scale
        tol = TIE_TOL * max(1.0, t) * max(1.0, float(np.max(np.abs(w), initial=0.0)))
        vs = v[:, w > tol]
        if vs.shape[1] == 0:
            continue
        wt = np.exp(blk.log_weight)
        alpha += wt * float(np.real(np.einsum("ij,ik,kj->", vs.conj(), blk.a, vs)))
        beta += wt * float(np.real(np.einsum("ij,ik,kj->", vs.conj(), blk.b, vs)))
    return alpha, beta


def np_beta_blocks(blocks: list[Block], eps: float, rel_tol: float = 1e-13, max_iter: int = 200) -> float:
    """Minimal type-II error subject to type-I error at most ``eps``.

    The optimal test is ``{rho - t sigma > 0}`` plus part of the tie space at
    the critical ``t``. ``t`` is bracketed by bisection on ``log t`` and the
    optimal randomized test is the convex combination of the two bracketing
    projective tests that meets the type-I constraint with equality.
    """
    if eps >= 1:
        return 0.0
    target = 1.0 - eps
    lo, (a_lo, b_lo) = 0.0, _test_masses(blocks, 0.0)
    if eps <= 0 or a_lo < target:
        # the support projector of rho is the smallest test accepting all of rho
        return min(b_lo, 1.0)
    hi = 1.0
    a_hi, b_hi = _test_masses(blocks, hi)
    while a_hi >= target:
        lo, a_lo, b_lo = hi, a_hi, b_hi
        hi *= 16.0
        if hi > 1e300:
            return max(b_lo, 0.0)
        a_hi, b_hi = _test_masses(blocks, hi)
    if lo == 0.0:
        cand = hi
        while cand > 1e-300:
            cand /= 16.0
            a_c, b_c = _test_masses(blocks, cand)
            if a_c >= target:
                lo, a_lo, b_lo = cand, a_c, b_c
                break
            hi, a_hi, b_hi = cand, a_c, b_c
    for _ in range(max_iter):
        if lo > 0 and hi / lo - 1 < rel_tol:
            break
        mid = np.sqrt(lo * hi) if lo > 0 else hi / 2
        a_m, b_m = _test_masses(blocks, mid)
        if a_m >= target:
            lo, a_lo, b_lo = mid, a_m, b_m
        else:
            hi, a_hi, b_hi = mid, a_m, b_m
    if a_lo - a_hi <= 0:
        return min(max(b_lo, 0.0), 1.0)
    w = (target - a_hi) / (a_lo - a_hi)
    return min(max(w * b_lo + (1 - w) * b_hi, 0.0), 1.0)
