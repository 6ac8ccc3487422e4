"""Exact ground truth for desk-scale instances.

* Helstrom errors and Neyman-Pearson type-II errors of state pairs.
* Exact minimal copy numbers ``n*`` for i.i.d. state pairs, routed to the
  cheapest exact method: type classes for commuting pairs, Schur-Weyl
  blocks for qubits and explicit tensor powers otherwise.
* Exact product-strategy ``n*`` for channel pairs over an input family.
* Pretty-good-measurement errors for M-ary ensembles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .blocks import Block, brute_force_blocks, helstrom_error_blocks, np_beta_blocks, qubit_blocks
from .channels import (
    DEFAULT_DIM_BUDGET,
    ClassicalChannel,
    CQChannel,
    as_density_matrix,
    make_rng,
    max_entangled,
    random_pure_vector,
    tensor_power,
)
from .errors import CapacityError, DomainError, ValidationError
from .linalg import _herm_power, _trace_norm, positive_part_threshold

CLASSICAL_N_MAX = 1_000_000
QUBIT_N_MAX = 400
LINEAR_PREFIX = 32
COMMUTE_TOL = 1e-12
# per-input budget when a channel oracle sweeps an input family
CHANNEL_DIM_BUDGET = 1024


@dataclass
class OracleResult:
    """Exact ``n*`` (or ``math.inf``) with the evaluations that produced it."""

    n_star: float
    n_max: int
    n_max_reached: bool
    per_n_trace: list[tuple[int, float]] = field(default_factory=list)
    method: str = ""
    witness: object = None
    error_at_n_star: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.n_star)

    def to_dict(self) -> dict:
        return {
            "n_star": self.n_star,
            "n_max": self.n_max,
            "n_max_reached": self.n_max_reached,
            "method": self.method,
            "witness": self.witness,
            "error_at_n_star": self.error_at_n_star,
            "per_n_trace": [[n, e] for n, e in self.per_n_trace],
        }


def _check_prior(p: float):
    if not 0 < p < 1:
        raise DomainError(f"prior p must lie in (0, 1), got {p}")


def _check_unit(name: str, x: float, closed: bool = True):
    ok = 0 <= x <= 1 if closed else 0 < x < 1
    if not ok:
        raise DomainError(f"{name} must lie in {'[0, 1]' if closed else '(0, 1)'}, got {x}")


# ---------------------------------------------------------------------------
# single-shot quantities


def helstrom_error(p: float, rho, sigma) -> float:
    """Minimum error probability for discriminating ``rho`` (prior ``p``) from ``sigma``."""
    _check_prior(p)
    rho = as_density_matrix(rho, "rho")
    sigma = as_density_matrix(sigma, "sigma")
    if rho.shape != sigma.shape:
        raise ValidationError("equal dimensions", f"{rho.shape} vs {sigma.shape}")
    return max(0.5 * (1.0 - _trace_norm(p * rho - (1 - p) * sigma)), 0.0)


def helstrom_povm(p: float, rho, sigma) -> tuple[np.ndarray, np.ndarray]:
    """Optimal two-outcome measurement: projector onto ``{p rho - q sigma > 0}`` and its complement."""
    proj, _ = positive_part_threshold(p * np.asarray(rho) - (1 - p) * np.asarray(sigma), 0.0)
    return proj, np.eye(proj.shape[0]) - proj


def neyman_pearson_beta(rho, sigma, eps: float) -> float:
    """``min Tr[Q sigma]`` over tests ``0 <= Q <= I`` with ``Tr[Q rho] >= 1 - eps``."""
    _check_unit("eps", eps)
    rho = as_density_matrix(rho, "rho")
    sigma = as_density_matrix(sigma, "sigma")
    pair = _commuting_distributions(rho, sigma)
    if pair is not None:
        return classical_beta_exact(pair[0], pair[1], 1, eps)
    return np_beta_blocks([Block(0.0, rho, sigma)], eps)


# ---------------------------------------------------------------------------
# classical type-class computations


def _joint_support(t: np.ndarray, r: np.ndarray):
    keep = (t > 0) | (r > 0)
    return t[keep], r[keep]


def classical_error_exact(p: float, t, r, n: int, budget: int = kernels.DEFAULT_TYPE_BUDGET) -> float:
    """Exact ``sum_x min(p t^n(x), q r^n(x))`` via type classes."""
    _check_prior(p)
    t, r = _joint_support(np.asarray(t, dtype=float), np.asarray(r, dtype=float))
    counts, logc = kernels.type_table(n, len(t), budget)
    la = kernels.type_loglik(counts, t) + math.log(p)
    lb = kernels.type_loglik(counts, r) + math.log(1 - p)
    return min(kernels.min_error_sum(logc, la, lb), min(p, 1 - p))


def classical_beta_exact(t, r, n: int, eps: float, budget: int = kernels.DEFAULT_TYPE_BUDGET) -> float:
    """Exact Neyman-Pearson type-II error for ``t^n`` against ``r^n``.

    Types are sorted by likelihood ratio. The least likely ones under ``t``
    are rejected until the rejected ``t``-mass would exceed ``eps``. The
    boundary type is rejected fractionally.
    """
    if eps >= 1:
        return 0.0
    t, r = _joint_support(np.asarray(t, dtype=float), np.asarray(r, dtype=float))
    counts, logc = kernels.type_table(n, len(t), budget)
    la = kernels.type_loglik(counts, t) + logc
    lb = kernels.type_loglik(counts, r) + logc
    with np.errstate(invalid="ignore"):
        llr = la - lb
    llr = np.where(np.isneginf(la), -np.inf, np.where(np.isneginf(lb), np.inf, llr))
    order = np.argsort(llr, kind="stable")  # ascending: reject from the front
    a = np.exp(la[order])
    b = np.exp(lb[order])
    cum = np.cumsum(a)
    # number of types rejected outright
    k = int(np.searchsorted(cum, eps, side="right"))
    if k >= len(a):
        return 0.0
    rejected_a = cum[k - 1] if k > 0 else 0.0
    frac = min(max((eps - rejected_a) / a[k], 0.0), 1.0) if a[k] > 0 else 1.0
    beta = float(np.sum(b[k + 1 :])) + (1.0 - frac) * b[k]
    return min(max(beta, 0.0), 1.0)


def classical_mary_pgm_error(priors, dists, n: int, budget: int = kernels.DEFAULT_TYPE_BUDGET) -> float:
    """Exact PGM error for ``M`` i.i.d. classical hypotheses with ``n`` samples."""
    priors = np.asarray(priors, dtype=float)
    dists = np.asarray(dists, dtype=float)
    keep = (dists > 0).any(axis=0)
    dists = dists[:, keep]
    counts, logc = kernels.type_table(n, dists.shape[1], budget)
    with np.errstate(divide="ignore"):
        weighted = np.stack(
            [kernels.type_loglik(counts, d) + math.log(pm) for pm, d in zip(priors, dists)], axis=1
        )
    return kernels.pgm_error_sum(logc, weighted)


# ---------------------------------------------------------------------------
# n* search


def _search_first(
    err: Callable[[int], float], target: float, n_max: int, linear: bool
) -> tuple[float, list[tuple[int, float]]]:
    """First ``n`` in ``[1, n_max]`` with ``err(n) <= target``.

    The linear scan matches the definition literally. Otherwise a linear
    prefix is followed by doubling and bisection, which is exact because
    errors of i.i.d. tensor powers never increase with ``n``: discarding a
    copy is a valid strategy.
    """
    trace: list[tuple[int, float]] = []

    def ev(n):
        e = err(n)
        trace.append((n, e))
        return e

    stop = n_max if linear else min(LINEAR_PREFIX, n_max)
    for n in range(1, stop + 1):
        if ev(n) <= target:
            return n, trace
    if stop == n_max:
        return math.inf, trace
    bad = stop
    good = None
    n = stop
    while good is None:
        n = min(2 * n, n_max)
        if ev(n) <= target:
            good = n
        elif n == n_max:
            return math.inf, trace
        else:
            bad = n
    while good - bad > 1:
        mid = (good + bad) // 2
        if ev(mid) <= target:
            good = mid
        else:
            bad = mid
    return good, trace


def _commuting_distributions(rho: np.ndarray, sigma: np.ndarray):
    """Joint eigenvalue distributions when ``rho`` and ``sigma`` commute."""
    comm = rho @ sigma - sigma @ rho
    if np.max(np.abs(comm)) > COMMUTE_TOL:
        return None
    # a generic combination separates degenerate eigenspaces of either state
    _, v = np.linalg.eigh(rho + (math.sqrt(5) - 1) / 2 * sigma)
    rd = v.conj().T @ rho @ v
    sd = v.conj().T @ sigma @ v
    if max(np.max(np.abs(rd - np.diag(np.diag(rd)))), np.max(np.abs(sd - np.diag(np.diag(sd))))) > 1e-10:
        return None
    t = np.clip(np.real(np.diag(rd)), 0, None)
    r = np.clip(np.real(np.diag(sd)), 0, None)
    return t / t.sum(), r / r.sum()


def _route(rho, sigma, path: str, budget: int):
    """Pick an exact evaluation method for i.i.d. powers of ``(rho, sigma)``."""
    if path in ("auto", "classical"):
        pair = _commuting_distributions(rho, sigma)
        if pair is not None:
            return "type-class", pair
        if path == "classical":
            raise ValidationError("commuting states", "classical path requested for non-commuting pair")
    d = rho.shape[0]
    if path in ("auto", "schur-weyl") and d == 2:
        return "schur-weyl", None
    if path == "schur-weyl":
        raise ValidationError("qubit states", "Schur-Weyl path needs dimension 2")
    return "tensor-power", None


def _default_n_max(method: str, d: int, budget: int) -> int:
    if method == "type-class":
        return CLASSICAL_N_MAX
    if method == "schur-weyl":
        return QUBIT_N_MAX
    return max(1, int(math.floor(math.log(budget) / math.log(d) + 1e-12))) if d > 1 else 1


def _state_pair(rho, sigma):
    rho = as_density_matrix(rho, "rho")
    sigma = as_density_matrix(sigma, "sigma")
    if rho.shape != sigma.shape:
        raise ValidationError("equal dimensions", f"{rho.shape} vs {sigma.shape}")
    return rho, sigma


def _blocks_factory(method, rho, sigma, budget):
    if method == "schur-weyl":
        return lambda n: qubit_blocks(rho, sigma, n)
    return lambda n: brute_force_blocks(rho, sigma, n, budget)


def _check_capacity(method: str, d: int, n_max: int, budget: int):
    if method == "tensor-power" and d**n_max > budget:
        raise CapacityError(f"tensor power dimension {d}^{n_max} exceeds budget {budget}")


def exact_nstar_states(
    p: float,
    rho,
    sigma,
    eps: float,
    n_max: int | None = None,
    path: str = "auto",
    search: str = "auto",
    budget: int = DEFAULT_DIM_BUDGET,
) -> OracleResult:
    """Smallest ``n`` with Helstrom error of ``(rho^n, sigma^n)`` at most ``eps``."""
    _check_prior(p)
    _check_unit("eps", eps)
    rho, sigma = _state_pair(rho, sigma)
    method, pair = _route(rho, sigma, path, budget)
    d = rho.shape[0]
    n_max = _default_n_max(method, d, budget) if n_max is None else n_max
    _check_capacity(method, d, n_max, budget)
    if method == "type-class":
        t, r = pair

        def err(n):
            return classical_error_exact(p, t, r, n)

    else:
        make = _blocks_factory(method, rho, sigma, budget)

        def err(n):
            return helstrom_error_blocks(p, make(n))

    if eps < min(p, 1 - p) and np.max(np.abs(rho - sigma)) == 0:
        # identical states: the error is min(p, q) for every n
        return OracleResult(math.inf, n_max, True, [(1, min(p, 1 - p))], method)
    n_star, trace = _search_first(err, eps, n_max, linear=(search == "linear"))
    return _result(n_star, n_max, trace, method)


def exact_nstar_asymmetric(
    rho,
    sigma,
    eps: float,
    delta: float,
    n_max: int | None = None,
    path: str = "auto",
    search: str = "auto",
    budget: int = DEFAULT_DIM_BUDGET,
) -> OracleResult:
    """Smallest ``n`` with ``beta_eps(rho^n || sigma^n) <= delta``."""
    _check_unit("eps", eps)
    _check_unit("delta", delta)
    rho, sigma = _state_pair(rho, sigma)
    method, pair = _route(rho, sigma, path, budget)
    d = rho.shape[0]
    n_max = _default_n_max(method, d, budget) if n_max is None else n_max
    _check_capacity(method, d, n_max, budget)
    if method == "type-class":
        t, r = pair

        def beta(n):
            return classical_beta_exact(t, r, n, eps)

    else:
        make = _blocks_factory(method, rho, sigma, budget)

        def beta(n):
            return np_beta_blocks(make(n), eps)

    n_star, trace = _search_first(beta, delta, n_max, linear=(search == "linear"))
    return _result(n_star, n_max, trace, method)


def _result(n_star, n_max, trace, method, witness=None) -> OracleResult:
    at = dict(trace).get(n_star) if math.isfinite(n_star) else None
    return OracleResult(n_star, n_max, not math.isfinite(n_star), trace, method, witness, at)


# ---------------------------------------------------------------------------
# channels under product strategies


def default_input_family(dim_in: int, seed=0, n_random: int = 8) -> list[tuple[str, np.ndarray]]:
    """Basis inputs, the maximally entangled input and seeded random pure inputs.

    Basis inputs are states on ``A`` alone; the others live on ``R ⊗ A`` with
    ``dim R = dim A``.
    """
    fam = []
    for i in range(dim_in):
        e = np.zeros((dim_in, dim_in), dtype=complex)
        e[i, i] = 1
        fam.append((f"basis:{i}", e))
    fam.append(("max-entangled", max_entangled(dim_in)))
    rng = make_rng(seed)
    for k in range(n_random):
        v = random_pure_vector(dim_in * dim_in, rng)
        fam.append((f"random:{k}", np.outer(v, v.conj())))
    return fam


def _pairs_for_channels(N, M, input_family, seed):
    """Candidate output pairs ``(label, N(rho), M(rho))`` for a channel pair."""
    if isinstance(N, ClassicalChannel) and isinstance(M, ClassicalChannel):
        if N.matrix.shape != M.matrix.shape:
            raise ValidationError("equal alphabets", f"{N.matrix.shape} vs {M.matrix.shape}")
        return [
            (f"basis:{x}", np.diag(N.matrix[x]).astype(complex), np.diag(M.matrix[x]).astype(complex))
            for x in range(N.n_in)
        ]
    if isinstance(N, (ClassicalChannel, CQChannel)) and isinstance(M, (ClassicalChannel, CQChannel)):
        a, b = N.to_cq(), M.to_cq()
        if a.n_in != b.n_in or a.dim_out != b.dim_out:
            raise ValidationError("equal alphabets", "CQ channels differ in input or output size")
        return [(f"basis:{x}", a.outputs[x], b.outputs[x]) for x in range(a.n_in)]
    qn, qm = N.to_quantum(), M.to_quantum()
    if (qn.dim_in, qn.dim_out) != (qm.dim_in, qm.dim_out):
        raise ValidationError("equal dimensions", "channels differ in input or output dimension")
    fam = default_input_family(qn.dim_in, seed) if input_family is None else input_family
    out = []
    for label, rho in fam:
        rho = np.asarray(rho, dtype=complex)
        ref = rho.shape[0] // qn.dim_in
        out.append((label, qn.apply(rho, ref), qm.apply(rho, ref)))
    return out


def exact_nstar_product_channel(
    p: float,
    N,
    M,
    eps: float,
    input_family: Sequence[tuple[str, np.ndarray]] | None = None,
    n_max: int | None = None,
    seed=0,
    budget: int = CHANNEL_DIM_BUDGET,
) -> OracleResult:
    """Exact ``n*`` of the best product strategy within an input family.

    For classical and CQ channels the family is the set of basis inputs,
    which is optimal, so the result is the exact product-strategy query
    complexity. For general channels the result is an upper bound on it.
    Inputs whose tensor powers exceed the budget are searched only up to
    the largest feasible ``n`` and flagged in ``details["truncated"]``.
    """
    _check_prior(p)
    _check_unit("eps", eps)
    pairs = _pairs_for_channels(N, M, input_family, seed)
    best: OracleResult | None = None
    truncated = []
    per_input = {}
    for label, rho, sigma in pairs:
        method, _ = _route(rho, sigma, "auto", budget)
        cap = _default_n_max(method, rho.shape[0], budget)
        limit = cap if n_max is None else min(n_max, cap)
        if n_max is not None and limit < n_max:
            truncated.append(label)
        if best is not None and best.finite:
            # monotonicity: this input can only win if it succeeds strictly earlier
            if best.n_star - 1 < 1:
                continue
            probe = min(int(best.n_star) - 1, limit)
            e = _state_error(p, rho, sigma, probe, method, budget)
            if e > eps:
                per_input[label] = f"> {probe}"
                continue
            limit = probe
        res = exact_nstar_states(p, rho, sigma, eps, n_max=limit, budget=budget)
        per_input[label] = res.n_star
        if best is None or res.n_star < best.n_star:
            best = res
            best.witness = label
    best.details = {"per_input": per_input, "truncated": truncated}
    if n_max is not None:
        best.n_max = n_max
    return best


def _state_error(p, rho, sigma, n, method, budget):
    if method == "type-class":
        t, r = _commuting_distributions(rho, sigma)
        return classical_error_exact(p, t, r, n)
    return helstrom_error_blocks(p, _blocks_factory(method, rho, sigma, budget)(n))


def exact_nstar_asymmetric_channel(
    N,
    M,
    eps: float,
    delta: float,
    input_family: Sequence[tuple[str, np.ndarray]] | None = None,
    n_max: int | None = None,
    seed=0,
    budget: int = CHANNEL_DIM_BUDGET,
) -> OracleResult:
    """Asymmetric analogue of :func:`exact_nstar_product_channel`."""
    pairs = _pairs_for_channels(N, M, input_family, seed)
    best = None
    per_input = {}
    for label, rho, sigma in pairs:
        method, _ = _route(rho, sigma, "auto", budget)
        cap = _default_n_max(method, rho.shape[0], budget)
        limit = cap if n_max is None else min(n_max, cap)
        res = exact_nstar_asymmetric(rho, sigma, eps, delta, n_max=limit, budget=budget)
        per_input[label] = res.n_star
        if best is None or res.n_star < best.n_star:
            best = res
            best.witness = label
    best.details = {"per_input": per_input}
    return best


# ---------------------------------------------------------------------------
# M-ary


def _ensemble(priors, states):
    priors = np.asarray(priors, dtype=float)
    if len(priors) < 2 or len(priors) != len(states):
        raise ValidationError("ensemble size", "need M >= 2 priors matching the states")
    if np.any(priors <= 0) or abs(priors.sum() - 1) > 1e-12:
        raise ValidationError("priors form a distribution", str(priors.tolist()))
    states = [as_density_matrix(s, f"state {m}") for m, s in enumerate(states)]
    if len({s.shape for s in states}) != 1:
        raise ValidationError("equal dimensions", "ensemble states differ in dimension")
    return priors, states


def mary_error_with_povm(priors, states, povm) -> float:
    """``1 - sum_m p_m Tr[Q_m rho_m]`` for a given POVM."""
    return 1.0 - sum(pm * float(np.real(np.trace(qm @ s))) for pm, qm, s in zip(priors, povm, states))


def pgm_povm(priors, states) -> list[np.ndarray]:
    total = sum(pm * s for pm, s in zip(priors, states))
    root = _herm_power(total, -0.5)
    return [root @ (pm * s) @ root for pm, s in zip(priors, states)]


def mary_pgm_error(priors, states, n: int = 1, budget: int = DEFAULT_DIM_BUDGET) -> float:
    """Error of the pretty good measurement on ``n`` copies of each state."""
    priors, states = _ensemble(priors, states)
    if all(np.max(np.abs(s - np.diag(np.diag(s)))) == 0 for s in states):
        dists = np.array([np.clip(np.real(np.diag(s)), 0, None) for s in states])
        return classical_mary_pgm_error(priors, dists, n)
    powers = [tensor_power(s, n, budget) for s in states]
    return max(mary_error_with_povm(priors, powers, pgm_povm(priors, powers)), 0.0)


def mary_pairwise_bound(priors, states, n: int = 1) -> float:
    """``M(M-1)/2 * max_{a != b} sqrt(p_a p_b) F(rho_a, rho_b)^(n/2)``."""
    from .divergences import _uhlmann

    priors, states = _ensemble(priors, states)
    m = len(priors)
    best = 0.0
    for a in range(m):
        for b in range(a + 1, m):
            f = _uhlmann(states[a], states[b])
            best = max(best, math.sqrt(priors[a] * priors[b]) * f ** (n / 2))
    return 0.5 * m * (m - 1) * best


def classical_mary_pairwise_bound(priors, dists, n: int = 1) -> float:
    """Pairwise bound for classical distributions, using Bhattacharyya coefficients."""
    priors = np.asarray(priors, dtype=float)
    dists = np.asarray(dists, dtype=float)
    m = len(priors)
    best = 0.0
    for a in range(m):
        for b in range(a + 1, m):
            bc = float(np.sum(np.sqrt(dists[a] * dists[b])))
            best = max(best, math.sqrt(priors[a] * priors[b]) * bc**n)
    return 0.5 * m * (m - 1) * best
