"""State-level divergences and fidelities.

All functions take density matrices as ``numpy`` arrays. Support limits
follow a single convention: eigenvalues at most ``SUPPORT_TOL`` times the
largest eigenvalue count as zero. Divergences that blow up are returned as
``math.inf``.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .errors import DomainError, NumericalLimitError, ValidationError
from .linalg import (
    SUPPORT_TOL,
    _herm_power,
    _kubo_ando_mean,
    _support_mask,
    _trace_norm,
    _weighted_mean_pd,
)
from .channels import as_density_matrix

NEG_CLIP = 1e-9


class FidelityKind(str, Enum):
    UHLMANN = "uhlmann"
    HOLEVO = "holevo"
    GEOMETRIC = "geometric"


class RenyiKind(str, Enum):
    PETZ = "petz"
    SANDWICHED = "sandwiched"
    GEOMETRIC = "geometric"


def _pair(rho, sigma):
    rho = as_density_matrix(rho, "rho")
    sigma = as_density_matrix(sigma, "sigma")
    if rho.shape != sigma.shape:
        raise ValidationError("equal dimensions", f"{rho.shape} vs {sigma.shape}")
    return rho, sigma


def _clip_value(x: float) -> float:
    if -NEG_CLIP <= x < 0:
        return 0.0
    return x


def _eig(a):
    w, v = np.linalg.eigh(a)
    return np.clip(w, 0.0, None), v


def _outside_support(rho: np.ndarray, sigma: np.ndarray) -> bool:
    """True when ``supp rho`` is not contained in ``supp sigma``."""
    w, v = _eig(sigma)
    ker = v[:, ~_support_mask(w)]
    if ker.shape[1] == 0:
        return False
    leak = ker.conj().T @ rho @ ker
    return float(np.max(np.linalg.eigvalsh((leak + leak.conj().T) / 2))) > SUPPORT_TOL * max(
        float(np.max(np.linalg.eigvalsh(rho))), 1e-300
    )


def trace_distance(rho, sigma) -> float:
    rho, sigma = _pair(rho, sigma)
    return 0.5 * _trace_norm(rho - sigma)


# ---------------------------------------------------------------------------
# fidelities


def _uhlmann(rho, sigma) -> float:
    s = np.linalg.svd(_herm_power(rho, 0.5) @ _herm_power(sigma, 0.5), compute_uv=False)
    return min(float(np.sum(s)) ** 2, 1.0)


def _holevo(rho, sigma) -> float:
    val = float(np.real(np.trace(_herm_power(rho, 0.5) @ _herm_power(sigma, 0.5))))
    return min(max(val, 0.0) ** 2, 1.0)


def _geometric_root(rho, sigma) -> float:
    """``Tr[rho # sigma]``, the square root of the geometric fidelity."""
    mean = _kubo_ando_mean(rho, sigma, 0.5)
    return max(float(np.real(np.trace(mean))), 0.0)


def _geometric(rho, sigma) -> float:
    return min(_geometric_root(rho, sigma) ** 2, 1.0)


GEOMETRIC_EPS_SCHEDULE = (1e-4, 1e-5, 1e-6, 1e-7)


def geometric_fidelity_extrapolated(rho, sigma, tol: float = 1e-7) -> float:
    """Geometric fidelity from the regularized means on a decreasing eps schedule.

    Raises :class:`NumericalLimitError` when successive values still differ
    by more than ``tol`` at the end of the schedule, which happens for
    singular states where convergence is only of order ``sqrt(eps)``.
    :func:`fidelity` uses the exact support-restricted limit instead.
    """
    rho, sigma = _pair(rho, sigma)
    eye = np.eye(rho.shape[0])
    vals = []
    for eps in GEOMETRIC_EPS_SCHEDULE:
        m = _weighted_mean_pd(rho + eps * eye, sigma + eps * eye, 0.5)
        vals.append(float(np.real(np.trace(m))) ** 2)
        if len(vals) > 1 and abs(vals[-1] - vals[-2]) < tol:
            return min(vals[-1], 1.0)
    raise NumericalLimitError(
        f"geometric fidelity limit not converged: values {vals} at eps {GEOMETRIC_EPS_SCHEDULE}"
    )


_FIDELITY = {
    FidelityKind.UHLMANN: _uhlmann,
    FidelityKind.HOLEVO: _holevo,
    FidelityKind.GEOMETRIC: _geometric,
}


def fidelity(rho, sigma, kind: FidelityKind | str = FidelityKind.UHLMANN) -> float:
    """Uhlmann, Holevo or geometric fidelity of two density matrices."""
    rho, sigma = _pair(rho, sigma)
    return _FIDELITY[FidelityKind(kind)](rho, sigma)


def _fidelity_unchecked(rho, sigma, kind: FidelityKind) -> float:
    return _FIDELITY[kind](rho, sigma)


def _distance_from_fidelity(f: float) -> float:
    return math.sqrt(max(2.0 * (1.0 - math.sqrt(max(f, 0.0))), 0.0))


def bures_and_dfhat(rho, sigma) -> tuple[float, float]:
    """Bures distance and its geometric-fidelity analogue."""
    rho, sigma = _pair(rho, sigma)
    return _distance_from_fidelity(_uhlmann(rho, sigma)), _distance_from_fidelity(_geometric(rho, sigma))


# ---------------------------------------------------------------------------
# Renyi family


def _check_alpha(alpha: float):
    if not (alpha > 0) or alpha == 1 or not math.isfinite(alpha):
        raise DomainError(f"Renyi order must lie in (0, 1) or (1, inf), got {alpha}")


def _q_petz(rho, sigma, alpha: float) -> float:
    if alpha > 1 and _outside_support(rho, sigma):
        return math.inf
    return float(np.real(np.trace(_herm_power(rho, alpha) @ _herm_power(sigma, 1 - alpha))))


def _q_sandwiched(rho, sigma, alpha: float) -> float:
    if alpha > 1 and _outside_support(rho, sigma):
        return math.inf
    root = _herm_power(rho, 0.5)
    inner = root @ _herm_power(sigma, (1 - alpha) / alpha) @ root
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    w = np.where(_support_mask(w), w, 0.0)
    return float(np.sum(w**alpha))


def _q_geometric(rho, sigma, alpha: float) -> float:
    mean = _kubo_ando_mean(sigma, rho, alpha)
    if mean is None:
        return math.inf
    return float(np.real(np.trace(mean)))


_RENYI_Q = {
    RenyiKind.PETZ: _q_petz,
    RenyiKind.SANDWICHED: _q_sandwiched,
    RenyiKind.GEOMETRIC: _q_geometric,
}


def _renyi_from_q(q: float, alpha: float) -> float:
    if math.isinf(q):
        return math.inf
    if q <= 0:
        # only possible for alpha < 1 with orthogonal supports
        return math.inf
    return _clip_value(math.log(q) / (alpha - 1))


def renyi_q(rho, sigma, alpha: float, kind: RenyiKind | str = RenyiKind.PETZ) -> float:
    """The trace functional whose logarithm gives the Renyi divergence."""
    _check_alpha(alpha)
    rho, sigma = _pair(rho, sigma)
    return _RENYI_Q[RenyiKind(kind)](rho, sigma, alpha)


def renyi(rho, sigma, alpha: float, kind: RenyiKind | str = RenyiKind.PETZ) -> float:
    """Petz, sandwiched or geometric Renyi divergence of order ``alpha``."""
    _check_alpha(alpha)
    rho, sigma = _pair(rho, sigma)
    return _renyi_from_q(_RENYI_Q[RenyiKind(kind)](rho, sigma, alpha), alpha)


def _renyi_unchecked(rho, sigma, alpha: float, kind: RenyiKind) -> float:
    return _renyi_from_q(_RENYI_Q[kind](rho, sigma, alpha), alpha)


def _log_on_support(a) -> np.ndarray:
    w, v = _eig(a)
    mask = _support_mask(w)
    vs = v[:, mask]
    return (vs * np.log(w[mask])) @ vs.conj().T


def relative_entropy(rho, sigma) -> float:
    """Umegaki relative entropy in nats."""
    rho, sigma = _pair(rho, sigma)
    if _outside_support(rho, sigma):
        return math.inf
    val = float(np.real(np.trace(rho @ (_log_on_support(rho) - _log_on_support(sigma)))))
    return _clip_value(val)


def q_s(s: float, rho, sigma) -> float:
    """``Tr[rho^s sigma^(1-s)]`` with powers taken on the supports."""
    if not 0 <= s <= 1:
        raise DomainError(f"s must lie in [0, 1], got {s}")
    rho, sigma = _pair(rho, sigma)
    return _q_s(s, rho, sigma)


def _q_s(s: float, rho, sigma) -> float:
    val = float(np.real(np.trace(_herm_power(rho, s) @ _herm_power(sigma, 1 - s))))
    return min(max(val, 0.0), 1.0)


def q_hat_s(s: float, rho, sigma) -> float:
    """``Tr[sigma (sigma^-1/2 rho sigma^-1/2)^s]``, i.e. ``Tr[sigma #_s rho]``."""
    if not 0 < s < 1:
        raise DomainError(f"s must lie in (0, 1), got {s}")
    rho, sigma = _pair(rho, sigma)
    return min(max(_q_geometric(rho, sigma, s), 0.0), 1.0)
