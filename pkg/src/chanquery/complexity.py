"""Sample- and query-complexity bounds.

Each bound function returns a :class:`BoundReport` listing every named
lower and upper bound together with the divergence values behind it. The
bounds follow a few conventions.

* ``x / inf = 0`` and ``x / 0 = inf``.
* An upper bound whose ceiling is below 1 is reported as 1, since ``n``
  counts uses starting at 1.
* A bound whose hypotheses fail is kept in the report with
  ``applicable=False`` and a reason, and is ignored by ``best_lower`` and
  ``best_upper``.

For general channels only safe estimates enter a bound. Lower bounds use
fidelities and overlaps that are exact or underestimated. Upper bounds use
fidelities and overlaps that are overestimated, which input optimization
over a restricted family provides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from .channel_divergences import (
    SDP_CHOI_DIM_CAP,
    ChannelDivergenceResult,
    Direction,
    InputOptConfig,
    Method,
    _kind_of_pair,
    channel_fidelity,
    channel_fidelity_cq,
    channel_renyi,
    geometric_channel_fidelity_choi,
    geometric_channel_fidelity_sdp,
    optimize_input,
    q_s_channel,
)
from .channels import ClassicalChannel, as_density_matrix
from .divergences import (
    FidelityKind,
    RenyiKind,
    _holevo,
    _q_s,
    _uhlmann,
)
from .errors import DomainError, ValidationError
from .oracle import default_input_family

S_GRID_POINTS = 99
ALPHA_LOWER_GRID = tuple(round(1.05 + 0.05 * i, 2) for i in range(20))  # 1.05 .. 2.00
ALPHA_UPPER_GRID = tuple(round(0.05 * i, 2) for i in range(1, 20))  # 0.05 .. 0.95
ABSCISSA_TOL = 1e-6
CHANNEL_EQUAL_TOL = 1e-12
ORTHOGONAL_TOL = 1e-12
POOL_S_VALUES = (0.25, 0.5, 0.75)


# ---------------------------------------------------------------------------
# report types


@dataclass
class Bound:
    name: str
    side: str  # "lower" or "upper"
    value: float
    pre_ceiling: float | None = None
    applicable: bool = True
    reason: str = ""
    method: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "side": self.side,
            "value": self.value,
            "pre_ceiling": self.pre_ceiling,
            "applicable": self.applicable,
            "reason": self.reason,
            "method": self.method,
        }


class Verdict(str, Enum):
    ONE = "one"
    INFINITE = "infinite"
    NON_TRIVIAL = "non-trivial"


@dataclass
class TrivialVerdict:
    kind: Verdict
    reason: str = ""


@dataclass
class BoundReport:
    lower: list[Bound] = field(default_factory=list)
    upper: list[Bound] = field(default_factory=list)
    inputs_echo: dict = field(default_factory=dict)
    divergence_values: dict = field(default_factory=dict)
    verdict: TrivialVerdict | None = None

    @property
    def best_lower(self) -> float:
        vals = [b.value for b in self.lower if b.applicable]
        return max(vals) if vals else 0.0

    @property
    def best_upper(self) -> float:
        vals = [b.value for b in self.upper if b.applicable]
        return min(vals) if vals else math.inf

    def bound(self, name: str) -> Bound:
        for b in self.lower + self.upper:
            if b.name == name:
                return b
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "inputs": self.inputs_echo,
            "verdict": None
            if self.verdict is None
            else {"kind": self.verdict.kind.value, "reason": self.verdict.reason},
            "lower": [b.to_dict() for b in self.lower],
            "upper": [b.to_dict() for b in self.upper],
            "best_lower": self.best_lower,
            "best_upper": self.best_upper,
            "divergences": self.divergence_values,
        }


# ---------------------------------------------------------------------------
# arithmetic conventions


def _ratio(num: float, den: float) -> float:
    if math.isinf(den):
        return 0.0
    if den <= 0:
        return math.inf if num > 0 else 0.0
    return num / den


def _neg_log(x: float) -> float:
    if x <= 0:
        return math.inf
    return max(-math.log(x), 0.0)


def _upper(pre: float) -> float:
    if math.isinf(pre):
        return math.inf
    return float(max(math.ceil(pre), 1))


def _check_prior(p: float):
    if not 0 < p < 1:
        raise ValidationError("prior in (0, 1)", f"p = {p}")


def _check_unit(name: str, x: float):
    if not 0 < x < 1:
        raise ValidationError(f"{name} in (0, 1)", f"{name} = {x}")


def _div_entry(res: ChannelDivergenceResult | float, **extra) -> dict:
    if isinstance(res, ChannelDivergenceResult):
        out = res.to_dict()
    else:
        out = {"value": float(res), "method": "closed-form", "direction": "exact"}
    out.update(extra)
    return out


# ---------------------------------------------------------------------------
# lambda* and trivial cases


def lambda_star(p: float, eps: float) -> float:
    """``ln(q/eps) / (ln(q/eps) + ln(p/eps))`` for ``p <= 1/2`` and ``eps < p``."""
    if not 0 < p <= 0.5:
        raise DomainError(f"lambda* needs p in (0, 1/2], got {p}")
    if not 0 < eps < p:
        raise DomainError(f"lambda* needs eps in (0, p), got eps={eps}, p={p}")
    a = math.log((1 - p) / eps)
    b = math.log(p / eps)
    return a / (a + b)


def _channels_equal(N, M) -> bool:
    if isinstance(N, ClassicalChannel) and isinstance(M, ClassicalChannel):
        return N.matrix.shape == M.matrix.shape and bool(
            np.max(np.abs(N.matrix - M.matrix)) <= CHANNEL_EQUAL_TOL
        )
    if N is M:
        return True
    try:
        _kind_of_pair(N, M)
    except ValidationError:
        return False
    qn, qm = N.to_quantum(), M.to_quantum()
    if qn.kraus.shape == qm.kraus.shape and np.max(np.abs(qn.kraus - qm.kraus)) <= CHANNEL_EQUAL_TOL:
        return True
    return bool(np.max(np.abs(np.asarray(qn.choi) - np.asarray(qm.choi))) <= CHANNEL_EQUAL_TOL)


def _orthogonal(a: np.ndarray, b: np.ndarray) -> bool:
    return float(np.real(np.trace(a @ b))) <= ORTHOGONAL_TOL


def _probe_pairs(N, M, probe_inputs=None, seed=0):
    """Output pairs on which disjoint supports are looked for."""
    kind = _kind_of_pair(N, M)
    if kind != "quantum":
        a, b = N.to_cq(), M.to_cq()
        return [(f"basis:{x}", a.outputs[x], b.outputs[x]) for x in range(a.n_in)]
    qn, qm = N.to_quantum(), M.to_quantum()
    fam = default_input_family(qn.dim_in, seed) if probe_inputs is None else probe_inputs
    out = []
    for label, rho in fam:
        ref = rho.shape[0] // qn.dim_in
        out.append((label, qn.apply(rho, ref), qm.apply(rho, ref)))
    return out


def trivial_case(p: float, eps: float, N, M, probe_inputs=None) -> TrivialVerdict:
    """Classify an instance whose query complexity is 1 or infinite.

    Disjoint output supports are detected as orthogonal outputs
    (``Tr[N(psi) M(psi)] = 0``) on the probe inputs.
    """
    _check_prior(p)
    q = 1 - p
    if eps >= 0.5:
        return TrivialVerdict(Verdict.ONE, "eps >= 1/2")
    s_grid = np.linspace(0, 1, S_GRID_POINTS + 2)
    if eps >= min(p, q) or np.any(eps >= p**s_grid * q ** (1 - s_grid)):
        return TrivialVerdict(Verdict.ONE, "eps >= p^s q^(1-s) for some s")
    for label, a, b in _probe_pairs(N, M, probe_inputs):
        if _orthogonal(a, b):
            return TrivialVerdict(Verdict.ONE, f"orthogonal outputs on input {label}")
    if _channels_equal(N, M) and min(p, q) > eps:
        return TrivialVerdict(Verdict.INFINITE, "identical channels")
    return TrivialVerdict(Verdict.NON_TRIVIAL)


def _trivial_state_verdict(p, eps, rho, sigma) -> TrivialVerdict:
    q = 1 - p
    if eps >= 0.5:
        return TrivialVerdict(Verdict.ONE, "eps >= 1/2")
    if eps >= min(p, q):
        return TrivialVerdict(Verdict.ONE, "eps >= p^s q^(1-s) for some s")
    if _orthogonal(rho, sigma):
        return TrivialVerdict(Verdict.ONE, "orthogonal states")
    if np.max(np.abs(rho - sigma)) <= CHANNEL_EQUAL_TOL:
        return TrivialVerdict(Verdict.INFINITE, "identical states")
    return TrivialVerdict(Verdict.NON_TRIVIAL)


def _trivial_report(report: BoundReport, verdict: TrivialVerdict) -> BoundReport:
    value = 1.0 if verdict.kind is Verdict.ONE else math.inf
    report.verdict = verdict
    report.lower.append(Bound("trivial", "lower", value, method="trivial-case", reason=verdict.reason))
    report.upper.append(Bound("trivial", "upper", value, method="trivial-case", reason=verdict.reason))
    return report


# ---------------------------------------------------------------------------
# one-dimensional optimization: grid then bounded refinement


def _grid_then_refine(fun, grid, lo: float, hi: float, sense: str = "min"):
    """Best value of ``fun`` over a grid, refined near the best grid point.

    Every evaluated point is a valid candidate, so the returned value is the
    best over all evaluations.
    """
    sign = 1.0 if sense == "min" else -1.0
    grid = list(grid)
    vals = [sign * fun(x) for x in grid]
    i = int(np.argmin(vals))
    best_x, best_v = grid[i], vals[i]
    if not math.isfinite(best_v):
        return best_x, sign * best_v
    a = grid[i - 1] if i > 0 else lo
    b = grid[i + 1] if i + 1 < len(grid) else hi
    if b - a > ABSCISSA_TOL:
        res = minimize_scalar(
            lambda x: sign * fun(x), bounds=(a, b), method="bounded", options={"xatol": ABSCISSA_TOL}
        )
        v = float(res.fun)
        if v < best_v:
            best_x, best_v = float(res.x), v
    return best_x, sign * best_v


# ---------------------------------------------------------------------------
# state-level bounds


def sc_state_bounds(p: float, rho, sigma, eps: float) -> BoundReport:
    """Sample-complexity bounds for discriminating ``rho^n`` from ``sigma^n``."""
    _check_prior(p)
    _check_unit("eps", eps)
    rho = as_density_matrix(rho, "rho")
    sigma = as_density_matrix(sigma, "sigma")
    q = 1 - p
    report = BoundReport(inputs_echo={"p": p, "eps": eps, "dim": rho.shape[0]})
    verdict = _trivial_state_verdict(p, eps, rho, sigma)
    report.verdict = verdict
    if verdict.kind is Verdict.ONE:
        return _trivial_report(report, verdict)

    f_uhl = _uhlmann(rho, sigma)
    f_hol = _holevo(rho, sigma)
    report.divergence_values.update(uhlmann_fidelity=_div_entry(f_uhl), holevo_fidelity=_div_entry(f_hol))

    # improved lower bound with the Uhlmann fidelity
    num = math.log(p * q / (eps * (1 - eps)))
    ok = eps * (1 - eps) < p * q
    report.lower.append(
        Bound(
            "fidelity-lower",
            "lower",
            max(_ratio(num, _neg_log(f_uhl)), 0.0) if ok else 0.0,
            applicable=ok,
            reason="" if ok else "eps(1-eps) >= pq",
            method="uhlmann",
        )
    )

    pre = _ratio(2 * math.log(math.sqrt(p * q) / eps), _neg_log(f_hol))
    report.upper.append(Bound("holevo-upper", "upper", _upper(pre), pre, method="holevo"))

    def chernoff(s):
        return _ratio(math.log(p**s * q ** (1 - s) / eps), _neg_log(_q_s(s, rho, sigma)))

    s_best, pre = _grid_then_refine(chernoff, np.linspace(0, 1, S_GRID_POINTS + 2), 0.0, 1.0)
    report.upper.append(Bound("chernoff-upper", "upper", _upper(pre), pre, method=f"petz s={s_best:.6g}"))

    _lambda_state_bounds(report, p, eps, lambda lam: _q_s(lam, rho, sigma))
    return report


def _lambda_state_bounds(report: BoundReport, p: float, eps: float, q_at):
    if p > 0.5:
        reason = "needs p <= 1/2"
        report.lower.append(Bound("lambda-lower", "lower", 0.0, applicable=False, reason=reason))
        report.upper.append(Bound("lambda-upper", "upper", math.inf, applicable=False, reason=reason))
        return
    lam = lambda_star(p, eps)
    den = _neg_log(q_at(lam))
    report.divergence_values["lambda_star"] = lam
    report.divergence_values["neg_log_q_lambda"] = den
    core = _ratio(lam * math.log(p / eps), den)
    lower_ok = eps < p / 64
    report.lower.append(
        Bound(
            "lambda-lower",
            "lower",
            float(math.ceil(0.5 * core)) if lower_ok else 0.0,
            0.5 * core,
            applicable=lower_ok,
            reason="" if lower_ok else "needs eps < p/64",
            method="petz",
        )
    )
    report.upper.append(Bound("lambda-upper", "upper", _upper(2 * core), 2 * core, method="petz"))


# ---------------------------------------------------------------------------
# channel ingredients with safe directions


class _Ingredients:
    """Channel quantities for one pair, each computed once in a safe direction."""

    def __init__(self, N, M, cfg: InputOptConfig | None):
        self.N, self.M = N, M
        self.kind = _kind_of_pair(N, M)
        self.cfg = cfg or InputOptConfig()
        self._cache: dict = {}
        self._pool: list[np.ndarray] | None = None

    # exact or underestimated quantities for lower bounds

    def geometric_fidelity(self) -> ChannelDivergenceResult:
        if "fhat" not in self._cache:
            if self.kind != "quantum":
                res = channel_fidelity_cq(self.N, self.M, FidelityKind.GEOMETRIC)
            else:
                qn, qm = self.N.to_quantum(), self.M.to_quantum()
                closed = geometric_channel_fidelity_choi(qn, qm)
                res = closed
                if qn.dim_in * qn.dim_out <= SDP_CHOI_DIM_CAP:
                    sdp = geometric_channel_fidelity_sdp(qn, qm)
                    # both are exact up to solver accuracy; keep the smaller one
                    if sdp.value <= closed.value:
                        res = sdp
                    res.certified_gap = sdp.certified_gap
            self._cache["fhat"] = res
        return self._cache["fhat"]

    def q_hat(self, s: float) -> ChannelDivergenceResult:
        return q_s_channel(self.N, self.M, s, RenyiKind.GEOMETRIC)

    def renyi_hat(self, alpha: float) -> float:
        key = ("dhat", alpha)
        if key not in self._cache:
            self._cache[key] = channel_renyi(self.N, self.M, alpha, RenyiKind.GEOMETRIC).value
        return self._cache[key]

    # exact or overestimated quantities for upper bounds

    def fidelity(self, kind: FidelityKind) -> ChannelDivergenceResult:
        key = ("f", kind)
        if key not in self._cache:
            self._cache[key] = channel_fidelity(self.N, self.M, kind, self.cfg)
        return self._cache[key]

    def _input_pool(self) -> list[np.ndarray]:
        """Optimizer inputs from a few full Q_s minimizations plus the default family."""
        if self._pool is None:
            qn, qm = self.N.to_quantum(), self.M.to_quantum()
            pool = [rho for _, rho in default_input_family(qn.dim_in, self.cfg.seed)]
            for s in POOL_S_VALUES:
                _, state, _ = optimize_input(qn, qm, lambda a, b, s=s: _q_s(s, a, b), "min", self.cfg)
                pool.append(state)
            self._pool = pool
            self._pool_outputs = [
                (qn.apply(rho, rho.shape[0] // qn.dim_in), qm.apply(rho, rho.shape[0] // qn.dim_in))
                for rho in pool
            ]
        return self._pool

    def q_petz(self, s: float) -> tuple[float, str, str]:
        """``inf_rho Q_s`` as ``(value, method, direction)``; never below the truth."""
        key = ("q", s)
        if key not in self._cache:
            if self.kind != "quantum":
                res = q_s_channel(self.N, self.M, s, RenyiKind.PETZ)
                self._cache[key] = (res.value, res.method.value, res.direction.value)
            else:
                self._input_pool()
                val = min(_q_s(s, a, b) for a, b in self._pool_outputs)
                self._cache[key] = (val, Method.INPUT_OPTIMIZATION.value, Direction.UPPER.value)
        return self._cache[key]


# ---------------------------------------------------------------------------
# binary symmetric


def _echo(p, eps, N, M, **more) -> dict:
    return {"p": p, "eps": eps, "channel_kind": _kind_of_pair(N, M), **more}


def qc_symmetric_bounds(p: float, N, M, eps: float, div_cfg: InputOptConfig | None = None) -> BoundReport:
    """Query-complexity bounds for symmetric binary channel discrimination."""
    _check_prior(p)
    _check_unit("eps", eps)
    q = 1 - p
    report = BoundReport(inputs_echo=_echo(p, eps, N, M))
    verdict = trivial_case(p, eps, N, M)
    report.verdict = verdict
    if verdict.kind is not Verdict.NON_TRIVIAL:
        return _trivial_report(report, verdict)
    ing = _Ingredients(N, M, div_cfg)

    fhat = ing.geometric_fidelity()
    report.divergence_values["geometric_fidelity"] = _div_entry(fhat)
    ok = eps * (1 - eps) < p * q
    num = math.log(p * q / (eps * (1 - eps)))
    report.lower.append(
        Bound(
            "geometric-fidelity-lower",
            "lower",
            max(_ratio(num, _neg_log(fhat.value)), 0.0) if ok else 0.0,
            applicable=ok,
            reason="" if ok else "eps(1-eps) >= pq",
            method=fhat.method.value,
        )
    )
    d_sq = 2 * (1 - math.sqrt(fhat.value))
    bures_num = 1 - eps * (1 - eps) / (p * q)
    report.lower.append(
        Bound(
            "geometric-distance-lower",
            "lower",
            max(_ratio(bures_num, d_sq), 0.0),
            applicable=True,
            reason="" if bures_num > 0 else "numerator <= 0, replaced by 0",
            method=fhat.method.value,
        )
    )
    if ing.kind == "cq":
        # amortized Holevo fidelity equals the best-symbol Holevo fidelity for CQ channels
        fh = ing.fidelity(FidelityKind.HOLEVO)
        report.lower.append(
            Bound(
                "holevo-fidelity-lower",
                "lower",
                max(_ratio(num, _neg_log(fh.value)), 0.0) if ok else 0.0,
                applicable=ok,
                reason="" if ok else "eps(1-eps) >= pq",
                method=fh.method.value,
            )
        )

    fh = ing.fidelity(FidelityKind.HOLEVO)
    report.divergence_values["holevo_fidelity"] = _div_entry(fh)
    pre = _ratio(2 * math.log(math.sqrt(p * q) / eps), _neg_log(fh.value))
    report.upper.append(Bound("holevo-upper", "upper", _upper(pre), pre, method=fh.method.value))

    def chernoff(s):
        return _ratio(math.log(p**s * q ** (1 - s) / eps), _neg_log(ing.q_petz(s)[0]))

    s_best, pre = _grid_then_refine(chernoff, np.linspace(0, 1, S_GRID_POINTS + 2), 0.0, 1.0)
    _, method, direction = ing.q_petz(s_best)
    report.divergence_values["c_s"] = {
        "s": s_best,
        "value": _neg_log(ing.q_petz(s_best)[0]),
        "method": method,
        "direction": "exact" if direction == "exact" else "lower",
    }
    report.upper.append(Bound("chernoff-upper", "upper", _upper(pre), pre, method=method))
    return report


def qc_precise_bounds(p: float, N, M, eps: float, div_cfg: InputOptConfig | None = None) -> BoundReport:
    """Bounds within a factor of four, valid for ``p <= 1/2`` and ``eps < p/64``."""
    _check_prior(p)
    if p > 0.5:
        raise DomainError(f"precise bounds need p <= 1/2, got {p}")
    if not 0 < eps < p / 64:
        raise DomainError(f"precise bounds need eps in (0, p/64), got eps={eps}, p/64={p / 64}")
    report = BoundReport(inputs_echo=_echo(p, eps, N, M))
    verdict = trivial_case(p, eps, N, M)
    report.verdict = verdict
    if verdict.kind is not Verdict.NON_TRIVIAL:
        return _trivial_report(report, verdict)
    ing = _Ingredients(N, M, div_cfg)
    lam = lambda_star(p, eps)
    scale = lam * math.log(p / eps)
    q_up, method_up, _ = ing.q_petz(lam)
    if ing.kind != "quantum":
        # both sides use the same best-symbol Petz overlap
        q_low, method_low = q_up, method_up
    else:
        res = ing.q_hat(lam)
        q_low, method_low = res.value, res.method.value
    report.divergence_values.update(
        lambda_star=lam,
        q_lambda_lower_side=_div_entry(q_low, method=method_low),
        q_lambda_upper_side=_div_entry(q_up, method=method_up),
    )
    pre_low = 0.5 * _ratio(scale, _neg_log(q_low))
    pre_up = 2 * _ratio(scale, _neg_log(q_up))
    report.lower.append(
        Bound("lambda-lower", "lower", float(math.ceil(pre_low)), pre_low, method=method_low)
    )
    report.upper.append(Bound("lambda-upper", "upper", _upper(pre_up), pre_up, method=method_up))
    return report


# ---------------------------------------------------------------------------
# binary asymmetric


def qc_asymmetric_bounds(N, M, eps: float, delta: float, div_cfg: InputOptConfig | None = None) -> BoundReport:
    """Bounds for type-I error at most ``eps`` and type-II error at most ``delta``."""
    _check_unit("eps", eps)
    _check_unit("delta", delta)
    report = BoundReport(inputs_echo={"eps": eps, "delta": delta, "channel_kind": _kind_of_pair(N, M)})
    fwd = _Ingredients(N, M, div_cfg)
    rev = _Ingredients(M, N, div_cfg)

    def lower_term(ing, keep, reject):
        # ln((1 - keep)^a' / reject) / Dhat_alpha
        def f(alpha):
            ap = alpha / (alpha - 1)
            return _ratio(ap * math.log(1 - keep) - math.log(reject), ing.renyi_hat(alpha))

        return _grid_then_refine(f, ALPHA_LOWER_GRID, 1.0 + 1e-9, 2.0, sense="max")

    def upper_term(ing, keep, reject):
        # ln(keep^a' / reject) / D_alpha with D_alpha = -ln Q_alpha / (1 - alpha)
        def f(alpha):
            ap = alpha / (alpha - 1)
            d_alpha = _neg_log(ing.q_petz(alpha)[0]) / (1 - alpha)
            return _ratio(ap * math.log(keep) - math.log(reject), d_alpha)

        return _grid_then_refine(f, ALPHA_UPPER_GRID, 1e-6, 1 - 1e-6, sense="min")

    a1, l1 = lower_term(fwd, eps, delta)
    a2, l2 = lower_term(rev, delta, eps)
    for name, alpha, val in (("renyi-lower-forward", a1, l1), ("renyi-lower-reverse", a2, l2)):
        report.lower.append(
            Bound(
                name,
                "lower",
                max(val, 0.0),
                applicable=True,
                reason="" if val > 0 else "numerator <= 0, replaced by 0",
                method=f"geometric alpha={alpha:.6g}",
            )
        )
    b1, u1 = upper_term(fwd, eps, delta)
    b2, u2 = upper_term(rev, delta, eps)
    report.upper.append(Bound("renyi-upper-forward", "upper", _upper(u1), u1, method=f"petz alpha={b1:.6g}"))
    report.upper.append(Bound("renyi-upper-reverse", "upper", _upper(u2), u2, method=f"petz alpha={b2:.6g}"))
    report.divergence_values.update(
        geometric_renyi_forward={"alpha": a1, "value": fwd.renyi_hat(a1)},
        geometric_renyi_reverse={"alpha": a2, "value": rev.renyi_hat(a2)},
    )
    if math.isinf(u1) and math.isinf(u2) and l1 <= 0 and l2 <= 0:
        report.divergence_values["diagnostic"] = "both channel divergence estimates vanish"

    # fidelity-based pair obtained through the symmetric relation
    fhat = fwd.geometric_fidelity()
    fh = fwd.fidelity(FidelityKind.HOLEVO)
    hi, lo = max(eps, delta), min(eps, delta)
    cond_s = hi < 0.5 or (lo < hi <= 0.5)
    cond_sum = eps * delta / (eps + delta) < 0.25
    orth = any(_orthogonal(a, b) for _, a, b in _probe_pairs(N, M))
    ok = cond_s and cond_sum and not orth
    reason = "" if ok else "needs max(eps, delta) < 1/2 and non-orthogonal outputs"
    pre_low = _ratio(math.log(1 / (2 * (eps + delta))), _neg_log(fhat.value))
    report.lower.append(
        Bound(
            "geometric-fidelity-lower",
            "lower",
            max(pre_low, 0.0),
            applicable=ok,
            reason=reason,
            method=fhat.method.value,
        )
    )
    pre_up = _ratio(math.log(1 / (eps * delta)), _neg_log(fh.value))
    report.upper.append(
        Bound("holevo-upper", "upper", _upper(pre_up), pre_up, applicable=ok, reason=reason, method=fh.method.value)
    )
    report.divergence_values.update(geometric_fidelity=_div_entry(fhat), holevo_fidelity=_div_entry(fh))
    return report


# ---------------------------------------------------------------------------
# symmetric <-> asymmetric conversion


def sym_asym_convert(direction: str, **args) -> dict:
    """Parameters of the instances that sandwich a converted query complexity.

    ``direction="asym-to-sym"`` takes ``eps, delta`` and returns the prior and
    the two symmetric error levels ``lower_eps`` (``2 eps delta / (eps + delta)``)
    and ``upper_eps`` (``eps delta / (eps + delta)``). ``direction="sym-to-asym"``
    takes ``p, eps`` and returns ``lower=(eps/p, eps/q)`` and
    ``upper=(eps/(2p), eps/(2q))``.
    """
    if direction == "asym-to-sym":
        eps, delta = float(args["eps"]), float(args["delta"])
        _check_unit("eps", eps)
        _check_unit("delta", delta)
        tot = eps + delta
        out = {
            "p": delta / tot,
            "q": eps / tot,
            "lower_eps": 2 * eps * delta / tot,
            "upper_eps": eps * delta / tot,
        }
        for key in ("lower_eps", "upper_eps"):
            if not 0 < out[key] < 1:
                raise DomainError(f"converted {key} = {out[key]} outside (0, 1)")
        return out
    if direction == "sym-to-asym":
        p, eps = float(args["p"]), float(args["eps"])
        _check_prior(p)
        _check_unit("eps", eps)
        q = 1 - p
        out = {"lower": (eps / p, eps / q), "upper": (eps / (2 * p), eps / (2 * q))}
        for key, pair in out.items():
            for v in pair:
                if not 0 < v < 1:
                    raise DomainError(f"converted {key} error {v} outside (0, 1)")
        return out
    raise ValidationError("conversion direction", f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# M-ary


def qc_mary_bounds(ensemble, eps: float, div_cfg: InputOptConfig | None = None) -> BoundReport:
    """Pairwise-fidelity bounds for ``M``-ary channel discrimination.

    ``ensemble`` is a list of ``(prior, channel)`` pairs.
    """
    _check_unit("eps", eps)
    if len(ensemble) < 2:
        raise ValidationError("M >= 2", f"got {len(ensemble)} channels")
    priors = np.array([float(pm) for pm, _ in ensemble])
    chans = [ch for _, ch in ensemble]
    if np.any(priors <= 0) or abs(priors.sum() - 1) > 1e-12:
        raise ValidationError("priors positive and summing to 1", str(priors.tolist()))
    m = len(ensemble)
    report = BoundReport(inputs_echo={"eps": eps, "priors": priors.tolist(), "M": m})
    lower_terms, upper_terms, pairs = [], [], {}
    for a in range(m):
        for b in range(a + 1, m):
            ing = _Ingredients(chans[a], chans[b], div_cfg)
            fhat = ing.geometric_fidelity()
            fu = ing.fidelity(FidelityKind.UHLMANN)
            pairs[f"{a},{b}"] = {"geometric": _div_entry(fhat), "uhlmann": _div_entry(fu)}
            pa, pb = priors[a], priors[b]
            arg = pa * pb / ((pa + pb) * eps)
            lower_terms.append((math.log(arg) if arg > 1 else 0.0, _neg_log(fhat.value), arg > 1))
            num = 2 * math.log(m * (m - 1) * math.sqrt(pa * pb) / (2 * eps))
            upper_terms.append(_ratio(num, _neg_log(fu.value)))
    report.divergence_values["pairs"] = pairs
    low = max(_ratio(n, d) for n, d, _ in lower_terms)
    flagged = not all(ok for _, _, ok in lower_terms)
    report.lower.append(
        Bound(
            "pairwise-geometric-lower",
            "lower",
            max(low, 0.0),
            reason="some log arguments <= 1 contribute 0" if flagged else "",
            method="pairwise",
        )
    )
    pre = max(upper_terms)
    report.upper.append(Bound("pairwise-uhlmann-upper", "upper", _upper(pre), pre, method="pairwise"))
    return report


__all__ = [
    "Bound",
    "BoundReport",
    "TrivialVerdict",
    "Verdict",
    "lambda_star",
    "trivial_case",
    "sc_state_bounds",
    "qc_symmetric_bounds",
    "qc_precise_bounds",
    "qc_asymmetric_bounds",
    "sym_asym_convert",
    "qc_mary_bounds",
]
