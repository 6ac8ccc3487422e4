"""Dense Hermitian matrix utilities.

Everything here works on plain ``numpy`` arrays. Public helpers validate
their inputs; the underscore-prefixed variants assume already validated
Hermitian input and are used in inner loops.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularSupportError, ValidationError

HERMITIAN_TOL = 1e-12
CLIP_TOL = 1e-10
SUPPORT_TOL = 1e-10
TIE_TOL = 1e-10
PD_FLOOR = 1e-12


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in descending order with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_hermitian(a, name: str = "matrix") -> np.ndarray:
    """Validate ``a`` as a square Hermitian matrix and return it symmetrized."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError("square matrix", f"{name} has shape {a.shape}")
    a = a.astype(complex, copy=False)
    if not np.all(np.isfinite(a)):
        raise ValidationError("finite entries", name)
    scale = np.max(np.abs(a)) if a.size else 0.0
    if np.max(np.abs(a - a.conj().T)) > HERMITIAN_TOL * max(scale, 1.0):
        raise ValidationError("not Hermitian", name)
    return (a + a.conj().T) / 2


def eigh(a) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending."""
    w, v = np.linalg.eigh(as_hermitian(a))
    return SpectralDecomposition(w[::-1].copy(), v[:, ::-1].copy())


def _psd_eigh(a: np.ndarray, name: str = "matrix"):
    w, v = np.linalg.eigh(a)
    tr = float(np.sum(w))
    floor = -CLIP_TOL * max(abs(tr), np.max(np.abs(w), initial=0.0))
    if w.size and w[0] < floor:
        raise ValidationError("not positive semidefinite", f"{name} has eigenvalue {w[0]:.3e}")
    return np.clip(w, 0.0, None), v


def psd_eigh(a, name: str = "matrix") -> SpectralDecomposition:
    """Eigendecomposition of a PSD matrix with tiny negative eigenvalues clipped."""
    w, v = _psd_eigh(as_hermitian(a, name), name)
    return SpectralDecomposition(w[::-1].copy(), v[:, ::-1].copy())


def trace_norm(a) -> float:
    """Schatten 1-norm of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(as_hermitian(a)))))


def _trace_norm(a: np.ndarray) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(a))))


def _support_mask(w: np.ndarray) -> np.ndarray:
    top = np.max(w, initial=0.0)
    return w > SUPPORT_TOL * top if top > 0 else np.zeros_like(w, dtype=bool)


def _power_from_eig(w: np.ndarray, v: np.ndarray, s: float) -> np.ndarray:
    mask = _support_mask(w)
    ws = np.zeros_like(w)
    ws[mask] = w[mask] ** s
    vs = v[:, mask]
    return (vs * ws[mask]) @ vs.conj().T


def herm_power(a, s: float, strict: bool = False) -> np.ndarray:
    """Power of a PSD matrix taken on its support.

    Eigenvalues below ``SUPPORT_TOL`` times the largest are treated as zero
    and mapped to zero for every exponent, including ``s <= 0``. With
    ``strict=True`` a nonpositive exponent on a singular matrix raises
    :class:`SingularSupportError` instead.
    """
    w, v = _psd_eigh(as_hermitian(a))
    if strict and s <= 0 and not np.all(_support_mask(w)):
        raise SingularSupportError(f"power {s} of a singular matrix")
    return _power_from_eig(w, v, s)


def _herm_power(a: np.ndarray, s: float) -> np.ndarray:
    w, v = np.linalg.eigh(a)
    return _power_from_eig(np.clip(w, 0.0, None), v, s)


def support_projector(a) -> np.ndarray:
    w, v = _psd_eigh(as_hermitian(a))
    vs = v[:, _support_mask(w)]
    return vs @ vs.conj().T


def geometric_mean(a, b) -> np.ndarray:
    """Matrix geometric mean ``A # B`` of two positive definite matrices."""
    a = as_hermitian(a, "A")
    b = as_hermitian(b, "B")
    for name, m in (("A", a), ("B", b)):
        w = np.linalg.eigvalsh(m)
        if w[0] <= PD_FLOOR * max(float(np.sum(w)), 0.0):
            raise SingularSupportError(f"{name} is not positive definite (min eigenvalue {w[0]:.3e})")
    return _weighted_mean_pd(a, b, 0.5)


def _weighted_mean_pd(a: np.ndarray, b: np.ndarray, t: float) -> np.ndarray:
    w, v = np.linalg.eigh(a)
    sq = (v * np.sqrt(w)) @ v.conj().T
    isq = (v / np.sqrt(w)) @ v.conj().T
    inner = isq @ b @ isq
    wi, vi = np.linalg.eigh((inner + inner.conj().T) / 2)
    wi = np.where(_support_mask(wi), wi, 0.0)
    mid = (vi * wi**t) @ vi.conj().T
    out = sq @ mid @ sq
    return (out + out.conj().T) / 2


def kubo_ando_mean(a, b, t: float) -> np.ndarray:
    """Weighted geometric mean ``A #_t B`` extended to singular arguments.

    For ``0 < t < 1`` the result is the limit of ``(A + eps I) #_t (B + eps I)``
    as ``eps -> 0``. It is computed exactly by restricting to the support of
    ``A`` and replacing ``B`` with its Schur complement relative to the kernel
    of ``A`` (the shorted operator). For ``t > 1`` the limit is finite only
    when ``supp B`` lies inside ``supp A``. In that case the formula is
    evaluated on ``supp A``; otherwise ``None`` is returned to signal
    divergence.
    """
    a = as_hermitian(a, "A")
    b = as_hermitian(b, "B")
    return _kubo_ando_mean(a, b, t)


def _kubo_ando_mean(a: np.ndarray, b: np.ndarray, t: float):
    d = a.shape[0]
    wa, va = np.linalg.eigh(a)
    wa = np.clip(wa, 0.0, None)
    mask = _support_mask(wa)
    if not mask.any():
        return np.zeros_like(a)
    b_rot = va.conj().T @ b @ va
    sup = np.flatnonzero(mask)
    ker = np.flatnonzero(~mask)
    b00 = b_rot[np.ix_(sup, sup)]
    if ker.size:
        b11 = b_rot[np.ix_(ker, ker)]
        b01 = b_rot[np.ix_(sup, ker)]
        if t > 1:
            bscale = max(float(np.real(np.trace(b))), 1e-300)
            if np.max(np.linalg.eigvalsh((b11 + b11.conj().T) / 2), initial=0.0) > SUPPORT_TOL * bscale:
                return None
            shorted = b00
        else:
            # invert b11 only on eigenvalues that are significant on the scale of B
            wb, vb = np.linalg.eigh((b11 + b11.conj().T) / 2)
            keep = wb > SUPPORT_TOL * max(float(np.max(np.linalg.eigvalsh(b))), 1e-300)
            proj = b01 @ vb[:, keep]
            shorted = b00 - (proj / wb[keep]) @ proj.conj().T
    else:
        shorted = b00
    shorted = (shorted + shorted.conj().T) / 2
    a0 = np.diag(wa[sup]).astype(complex)
    if t > 1:
        # the formula with exponent > 1 needs no positivity of the sandwich
        w0 = wa[sup]
        inner = shorted / np.sqrt(np.outer(w0, w0))
        wi, vi = np.linalg.eigh((inner + inner.conj().T) / 2)
        wi = np.where(_support_mask(wi), wi, 0.0)
        mid = (vi * wi**t) @ vi.conj().T
        block = np.sqrt(np.outer(w0, w0)) * mid
    else:
        block = _weighted_mean_pd(a0, shorted, t)
    full = np.zeros((d, d), dtype=complex)
    full[np.ix_(sup, sup)] = block
    out = va @ full @ va.conj().T
    return (out + out.conj().T) / 2


def positive_part_threshold(a, t: float, tie_tol: float = TIE_TOL):
    """Projector onto eigenvalues of ``A`` above ``t`` and the tie eigenspace.

    Returns ``(projector, boundary)`` where ``boundary`` holds orthonormal
    columns spanning eigenvectors whose eigenvalue is within ``tie_tol`` of
    ``t``. These are the directions a randomized test may mix in.
    """
    w, v = np.linalg.eigh(as_hermitian(a))
    above = w > t + tie_tol
    tie = np.abs(w - t) <= tie_tol
    va = v[:, above]
    return va @ va.conj().T, v[:, tie]


def partial_trace(m: np.ndarray, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Partial trace of a bipartite operator; ``keep`` is 0 or 1."""
    d0, d1 = dims
    t = m.reshape(d0, d1, d0, d1)
    if keep == 0:
        return np.einsum("ibjb->ij", t)
    return np.einsum("aiaj->ij", t)
