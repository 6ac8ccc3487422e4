"""Channel-level fidelities and divergences.

Each quantity is a worst case over inputs ``rho_RA``: a sup for divergences
and an inf for fidelities and ``Q``-type overlaps. How it is computed
depends on what is known about the channels.

* Classical and classical-quantum pairs use closed forms over input symbols.
* Geometric quantities of general channels have closed forms in terms of
  Choi operators. For the fidelity the semidefinite program is also solved.
* Everything else is estimated by local optimization over pure inputs.
  The result carries the direction of the estimate so callers can use it
  only where that direction is safe.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .channels import ClassicalChannel, CQChannel, QuantumChannel, make_rng, random_pure_vector
from .divergences import (
    FidelityKind,
    RenyiKind,
    _fidelity_unchecked,
    _q_geometric,
    _q_s,
    _renyi_from_q,
    _renyi_unchecked,
)
from .errors import CapacityError, DomainError, SolverError, ValidationError
from .linalg import _kubo_ando_mean, partial_trace

SDP_CHOI_DIM_CAP = 16
SDP_RESIDUAL_TOL = 1e-7
SDP_GAP_TOL = 1e-6
# inputs for objectives that jump at the support boundary (geometric fidelity,
# Renyi orders above 1) keep their Schmidt coefficients at least this large
SCHMIDT_FLOOR = 1e-3


class Method(str, Enum):
    CLASSICAL_CLOSED_FORM = "classical-closed-form"
    CQ_CLOSED_FORM = "cq-closed-form"
    CHOI_CLOSED_FORM = "choi-closed-form"
    INPUT_OPTIMIZATION = "input-optimization"
    SDP = "sdp"


class Direction(str, Enum):
    """How a reported value relates to the true channel quantity."""

    EXACT = "exact"
    UPPER = "upper"  # reported value >= true value
    LOWER = "lower"  # reported value <= true value


@dataclass
class ChannelDivergenceResult:
    value: float
    method: Method
    direction: Direction
    optimizer_input: object = None
    certified_gap: float | None = None
    converged: bool = True
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        inp = self.optimizer_input
        if isinstance(inp, np.ndarray):
            inp = "state"
        return {
            "value": self.value,
            "method": self.method.value,
            "direction": self.direction.value,
            "optimizer_input": inp,
            "certified_gap": self.certified_gap,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class InputOptConfig:
    restarts: int = 32
    max_iters: int = 200
    step_tol: float = 1e-8
    value_tol: float = 1e-9
    fd_step: float = 1e-5
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError("restarts >= 1", str(self.restarts))


# ---------------------------------------------------------------------------
# channel-pair classification


def _kind_of_pair(N, M) -> str:
    if isinstance(N, ClassicalChannel) and isinstance(M, ClassicalChannel):
        if N.matrix.shape != M.matrix.shape:
            raise ValidationError("equal alphabets", f"{N.matrix.shape} vs {M.matrix.shape}")
        return "classical"
    if isinstance(N, (ClassicalChannel, CQChannel)) and isinstance(M, (ClassicalChannel, CQChannel)):
        a, b = N.to_cq(), M.to_cq()
        if a.n_in != b.n_in or a.dim_out != b.dim_out:
            raise ValidationError("equal alphabets", "CQ channels differ in input or output size")
        return "cq"
    qn, qm = N.to_quantum(), M.to_quantum()
    if (qn.dim_in, qn.dim_out) != (qm.dim_in, qm.dim_out):
        raise ValidationError("equal dimensions", "channels differ in input or output dimension")
    return "quantum"


def _symbol_pairs(N, M):
    """Per-symbol output pairs for classical or CQ channels."""
    a, b = N.to_cq(), M.to_cq()
    return list(zip(a.outputs, b.outputs))


def _extremum_over_symbols(values, sense: str):
    values = list(values)
    idx = int(np.argmin(values)) if sense == "min" else int(np.argmax(values))
    return values[idx], idx


def _bhattacharyya(t, r) -> float:
    return float(np.sum(np.sqrt(t * r)))


def _classical_q(t, r, s) -> float:
    mask = (t > 0) & (r > 0)
    if s == 0:
        return float(np.sum(r[t > 0]))
    if s == 1:
        return float(np.sum(t[r > 0]))
    return float(np.sum(t[mask] ** s * r[mask] ** (1 - s)))


def _symbol_closed_form(N, M, per_symbol: Callable, sense: str) -> ChannelDivergenceResult:
    kind = _kind_of_pair(N, M)
    if kind == "classical":
        vals = [per_symbol(t, r, True) for t, r in zip(N.matrix, M.matrix)]
        method = Method.CLASSICAL_CLOSED_FORM
    else:
        vals = [per_symbol(w, v, False) for w, v in _symbol_pairs(N, M)]
        method = Method.CQ_CLOSED_FORM
    value, idx = _extremum_over_symbols(vals, sense)
    return ChannelDivergenceResult(value, method, Direction.EXACT, idx, details={"per_input": vals})


# ---------------------------------------------------------------------------
# input optimization over pure states on R ⊗ A


def _unpack(x: np.ndarray, d: int, schmidt_floor: float = 0.0) -> np.ndarray:
    psi = (x[: d * d] + 1j * x[d * d :]).reshape(d, d)
    psi = psi / np.linalg.norm(psi)
    if schmidt_floor > 0:
        u, sv, vh = np.linalg.svd(psi)
        sv = np.maximum(sv, schmidt_floor)
        psi = (u * (sv / np.linalg.norm(sv))) @ vh
    return psi


def _start_points(d: int, rng: np.random.Generator, count: int) -> list[np.ndarray]:
    starts = []
    ent = np.eye(d, dtype=complex).ravel()
    starts.append(ent)
    for i in range(d):
        prod = np.zeros((d, d), dtype=complex)
        prod[0, i] = 1
        starts.append(prod.ravel())
    while len(starts) < count:
        starts.append(random_pure_vector(d * d, rng))
    return [np.concatenate([s.real, s.imag]) for s in starts[:count]]


def optimize_input(
    N: QuantumChannel,
    M: QuantumChannel,
    objective: Callable[[np.ndarray, np.ndarray], float],
    sense: str,
    cfg: InputOptConfig | None = None,
    schmidt_floor: float = 0.0,
):
    """Best value of ``objective(N(psi), M(psi))`` over pure ``psi`` on ``R ⊗ A``.

    Uses multi-start L-BFGS-B with central-difference gradients. Returns
    ``(value, state, converged)``; the value can only be worse than the
    true optimum. ``schmidt_floor`` keeps the Schmidt coefficients of the
    input away from zero, for objectives that are ill-conditioned on
    near-singular outputs.
    """
    cfg = cfg or InputOptConfig()
    d = N.dim_in
    sign = 1.0 if sense == "min" else -1.0

    def f(x):
        psi = _unpack(x, d, schmidt_floor)
        return sign * objective(N.apply_pure(psi), M.apply_pure(psi))

    h = cfg.fd_step

    def grad(x):
        g = np.empty_like(x)
        for i in range(len(x)):
            e = np.zeros_like(x)
            e[i] = h
            g[i] = (f(x + e) - f(x - e)) / (2 * h)
        return g

    rng = make_rng(cfg.seed)
    best_val, best_x, best_ok = math.inf, None, False
    for x0 in _start_points(d, rng, cfg.restarts):
        res = minimize(
            f,
            x0,
            jac=grad,
            method="L-BFGS-B",
            options={"maxiter": cfg.max_iters, "ftol": cfg.value_tol, "gtol": cfg.step_tol},
        )
        val = f(res.x)
        if val < best_val:
            best_val, best_x, best_ok = val, res.x, bool(res.success)
    psi = _unpack(best_x, d, schmidt_floor).ravel()
    return sign * best_val, np.outer(psi, psi.conj()), best_ok


# ---------------------------------------------------------------------------
# fidelities


def channel_fidelity_cq(N, M, kind: FidelityKind | str = FidelityKind.UHLMANN) -> ChannelDivergenceResult:
    """``min_x F(omega_x, nu_x)`` for classical or CQ channel pairs."""
    kind = FidelityKind(kind)
    if _kind_of_pair(N, M) == "quantum":
        raise ValidationError("classical or CQ channels", "use channel_fidelity for general channels")

    def per(a, b, classical):
        if classical:
            return min(_bhattacharyya(a, b) ** 2, 1.0)
        return _fidelity_unchecked(a, b, kind)

    return _symbol_closed_form(N, M, per, "min")


def channel_fidelity(
    N,
    M,
    kind: FidelityKind | str = FidelityKind.UHLMANN,
    cfg: InputOptConfig | None = None,
    method: str = "auto",
) -> ChannelDivergenceResult:
    """Channel fidelity ``inf_rho F(N(rho), M(rho))``.

    ``method`` is ``"auto"``, ``"sdp"``, ``"choi"`` or ``"optimize"``. For
    general channels ``"auto"`` uses the SDP for the geometric kind and input
    optimization (an upper estimate) for the other two.
    """
    kind = FidelityKind(kind)
    pair = _kind_of_pair(N, M)
    if pair != "quantum" and method == "auto":
        return channel_fidelity_cq(N, M, kind)
    qn, qm = N.to_quantum(), M.to_quantum()
    if kind is FidelityKind.GEOMETRIC and method in ("auto", "sdp"):
        return geometric_channel_fidelity_sdp(qn, qm)
    if kind is FidelityKind.GEOMETRIC and method == "choi":
        return geometric_channel_fidelity_choi(qn, qm)
    floor = SCHMIDT_FLOOR if kind is FidelityKind.GEOMETRIC else 0.0
    value, state, ok = optimize_input(qn, qm, lambda a, b: _fidelity_unchecked(a, b, kind), "min", cfg, floor)
    return ChannelDivergenceResult(value, Method.INPUT_OPTIMIZATION, Direction.UPPER, state, converged=ok)


def _choi_pair(N: QuantumChannel, M: QuantumChannel):
    return np.asarray(N.choi), np.asarray(M.choi)


def geometric_channel_fidelity_choi(N: QuantumChannel, M: QuantumChannel) -> ChannelDivergenceResult:
    """Closed form ``lambda_min(Tr_B[Choi_N # Choi_M])^2``.

    For an input with coefficient matrix ``Psi`` the outputs are
    ``(Psi ⊗ I) Choi (Psi ⊗ I)^dag``. The geometric mean commutes with such
    congruences, so the output root fidelity is linear in ``Psi^dag Psi``
    and minimized by an eigenvector.
    """
    gn, gm = _choi_pair(N, M)
    mean = _kubo_ando_mean(gn, gm, 0.5)
    red = partial_trace(mean, (N.dim_in, N.dim_out), keep=0)
    w, v = np.linalg.eigh((red + red.conj().T) / 2)
    root = max(float(w[0]), 0.0)
    vec = v[:, 0].conj()
    return ChannelDivergenceResult(
        min(root**2, 1.0), Method.CHOI_CLOSED_FORM, Direction.EXACT, np.outer(vec, vec.conj())
    )


def _solve_sdp(gn: np.ndarray, gm: np.ndarray, dims: tuple[int, int]):
    import cvxpy as cp

    d = gn.shape[0]
    w = cp.Variable((d, d), hermitian=True)
    lam = cp.Variable()
    cons = [
        cp.bmat([[gn, w], [w, gm]]) >> 0,
        cp.partial_trace(w, list(dims), axis=1) - lam * np.eye(dims[0]) >> 0,
    ]
    prob = cp.Problem(cp.Maximize(lam), cons)
    last = None
    for solver in ("CVXOPT", "CLARABEL", "SCS"):
        if solver not in cp.installed_solvers():
            continue
        try:
            prob.solve(solver=solver)
        except cp.error.SolverError as exc:
            last = exc
            continue
        if prob.status in ("optimal", "optimal_inaccurate") and w.value is not None:
            return float(lam.value), np.asarray(w.value), solver, prob.status
    raise SolverError(f"geometric fidelity SDP failed: {last or prob.status}")


def geometric_channel_fidelity_sdp(
    N: QuantumChannel, M: QuantumChannel, choi_dim_cap: int = SDP_CHOI_DIM_CAP
) -> ChannelDivergenceResult:
    """Solve ``max lambda`` s.t. ``lambda I_R <= Tr_B W`` and ``[[G_N, W], [W, G_M]] >= 0``.

    The optimal value is the square root of the geometric channel fidelity.
    The returned value is made certified from below: ``lambda`` is replaced
    by the smallest eigenvalue of ``Tr_B W`` for the returned ``W``, and
    ``details`` records the residual of the block constraint. The Choi closed
    form is evaluated alongside and the gap between the two is reported.
    """
    N, M = N.to_quantum(), M.to_quantum()
    dims = (N.dim_in, N.dim_out)
    if N.dim_in * N.dim_out > choi_dim_cap:
        raise CapacityError(f"Choi dimension {N.dim_in * N.dim_out} exceeds SDP cap {choi_dim_cap}")
    gn, gm = _choi_pair(N, M)
    lam, w, solver, status = _solve_sdp(gn, gm, dims)
    block = np.block([[gn, w], [w.conj().T, gm]])
    block_res = max(-float(np.linalg.eigvalsh((block + block.conj().T) / 2)[0]), 0.0)
    red = partial_trace(w, dims, keep=0)
    trace_floor = float(np.linalg.eigvalsh((red + red.conj().T) / 2)[0])
    root = max(min(lam, trace_floor), 0.0)
    closed = geometric_channel_fidelity_choi(N, M)
    value = min(root**2, 1.0)
    gap = abs(value - closed.value)
    ok = block_res < SDP_RESIDUAL_TOL and gap < SDP_GAP_TOL
    return ChannelDivergenceResult(
        value,
        Method.SDP,
        Direction.EXACT if ok else Direction.LOWER,
        closed.optimizer_input,
        certified_gap=gap,
        converged=ok,
        details={"solver": solver, "status": status, "block_residual": block_res, "closed_form": closed.value},
    )


def export_sdp_json(N, M) -> str:
    """Serialize the geometric-fidelity SDP for an external solver."""
    N, M = N.to_quantum(), M.to_quantum()
    gn, gm = _choi_pair(N, M)

    def enc(a):
        return [[[float(z.real), float(z.imag)] for z in row] for row in a]

    d = gn.shape[0]
    doc = {
        "format": "chanquery-geometric-fidelity-sdp/1",
        "blocks": [
            {"name": "W", "type": "hermitian", "shape": [d, d]},
            {"name": "lambda", "type": "real", "shape": []},
        ],
        "objective": {"sense": "maximize", "expression": "lambda"},
        "constraints": [
            {"type": "psd", "expression": [["Gamma_N", "W"], ["W", "Gamma_M"]]},
            {"type": "psd", "expression": "partial_trace_out(W) - lambda * I_in"},
        ],
        "data": {
            "dim_in": N.dim_in,
            "dim_out": N.dim_out,
            "layout": "input system first",
            "Gamma_N": enc(gn),
            "Gamma_M": enc(gm),
        },
        "value_map": "geometric channel fidelity = lambda**2",
    }
    return json.dumps(doc)


# ---------------------------------------------------------------------------
# Q-type overlaps and Renyi divergences


def _check_s(s: float, closed: bool = True):
    ok = 0 <= s <= 1 if closed else 0 < s < 1
    if not ok:
        raise DomainError(f"s must lie in {'[0, 1]' if closed else '(0, 1)'}, got {s}")


def _geometric_choi_overlap(N: QuantumChannel, M: QuantumChannel, alpha: float, sense: str):
    """Extremal ``Tr[M(psi) #_alpha N(psi)]`` from the reduced Choi mean."""
    gn, gm = _choi_pair(N, M)
    mean = _kubo_ando_mean(gm, gn, alpha)
    if mean is None:
        return math.inf, None
    red = partial_trace(mean, (N.dim_in, N.dim_out), keep=0)
    w, v = np.linalg.eigh((red + red.conj().T) / 2)
    idx = 0 if sense == "min" else -1
    vec = v[:, idx].conj()
    return max(float(w[idx]), 0.0), np.outer(vec, vec.conj())


def q_s_channel(
    N, M, s: float, kind: RenyiKind | str = RenyiKind.PETZ, cfg: InputOptConfig | None = None
) -> ChannelDivergenceResult:
    """``inf_rho Q_s(N(rho) || M(rho))`` for the Petz or geometric overlap."""
    kind = RenyiKind(kind)
    if kind is RenyiKind.SANDWICHED:
        raise DomainError("q_s_channel supports the Petz and geometric overlaps")
    pair = _kind_of_pair(N, M)
    if pair != "quantum":
        _check_s(s, closed=kind is RenyiKind.PETZ)

        def per(a, b, classical):
            if classical:
                return _classical_q(a, b, s)
            return _q_s(s, a, b) if kind is RenyiKind.PETZ else min(_q_geometric(a, b, s), 1.0)

        return _symbol_closed_form(N, M, per, "min")
    qn, qm = N.to_quantum(), M.to_quantum()
    if kind is RenyiKind.GEOMETRIC:
        _check_s(s, closed=False)
        val, state = _geometric_choi_overlap(qn, qm, s, "min")
        return ChannelDivergenceResult(min(val, 1.0), Method.CHOI_CLOSED_FORM, Direction.EXACT, state)
    _check_s(s)
    value, state, ok = optimize_input(qn, qm, lambda a, b: _q_s(s, a, b), "min", cfg)
    return ChannelDivergenceResult(value, Method.INPUT_OPTIMIZATION, Direction.UPPER, state, converged=ok)


def _neg_log(x: float) -> float:
    return math.inf if x <= 0 else max(-math.log(x), 0.0)


def _flip(direction: Direction) -> Direction:
    return {Direction.UPPER: Direction.LOWER, Direction.LOWER: Direction.UPPER}.get(direction, direction)


def c_s_channel(N, M, s: float, cfg: InputOptConfig | None = None) -> ChannelDivergenceResult:
    """``C_s = -ln inf_rho Tr[N(rho)^s M(rho)^(1-s)]``."""
    _check_s(s)
    q = q_s_channel(N, M, s, RenyiKind.PETZ, cfg)
    return ChannelDivergenceResult(
        _neg_log(q.value),
        q.method,
        _flip(q.direction),
        q.optimizer_input,
        converged=q.converged,
        details={"q_s": q.value},
    )


def channel_renyi(
    N, M, alpha: float, kind: RenyiKind | str = RenyiKind.PETZ, cfg: InputOptConfig | None = None
) -> ChannelDivergenceResult:
    """``sup_rho D_alpha(N(rho) || M(rho))`` for the chosen Renyi family."""
    kind = RenyiKind(kind)
    if not (alpha > 0) or alpha == 1:
        raise DomainError(f"Renyi order must lie in (0, 1) or (1, inf), got {alpha}")
    pair = _kind_of_pair(N, M)
    if pair != "quantum":

        def per(a, b, classical):
            if classical:
                return _renyi_from_q(_classical_q_any(a, b, alpha), alpha)
            return _renyi_unchecked(a, b, alpha, kind)

        return _symbol_closed_form(N, M, per, "max")
    qn, qm = N.to_quantum(), M.to_quantum()
    if kind is RenyiKind.GEOMETRIC:
        sense = "min" if alpha < 1 else "max"
        val, state = _geometric_choi_overlap(qn, qm, alpha, sense)
        return ChannelDivergenceResult(
            _renyi_from_q(val, alpha), Method.CHOI_CLOSED_FORM, Direction.EXACT, state
        )
    if kind is RenyiKind.PETZ and alpha < 1:
        q = q_s_channel(qn, qm, alpha, RenyiKind.PETZ, cfg)
        return ChannelDivergenceResult(
            _renyi_from_q(q.value, alpha), q.method, Direction.LOWER, q.optimizer_input, converged=q.converged
        )

    def objective(a, b):
        v = _renyi_unchecked(a, b, alpha, kind)
        return 1e300 if math.isinf(v) else v

    value, state, ok = optimize_input(qn, qm, objective, "max", cfg, SCHMIDT_FLOOR if alpha > 1 else 0.0)
    if value >= 1e300:
        value = math.inf
    return ChannelDivergenceResult(value, Method.INPUT_OPTIMIZATION, Direction.LOWER, state, converged=ok)


def _classical_q_any(t, r, alpha: float) -> float:
    if alpha > 1 and np.any((t > 0) & (r == 0)):
        return math.inf
    mask = (t > 0) & (r > 0)
    return float(np.sum(t[mask] ** alpha * r[mask] ** (1 - alpha)))


def amortized_note(N, M):
    """Amortized Holevo fidelity, available in closed form only for CQ pairs.

    Returns the :class:`ChannelDivergenceResult` for classical or CQ
    channels and the string ``"not computed"`` for general channels.
    """
    if _kind_of_pair(N, M) == "quantum":
        return "not computed"
    return channel_fidelity_cq(N, M, FidelityKind.HOLEVO)
