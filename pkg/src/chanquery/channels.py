"""States and channels.

States are plain complex ``numpy`` arrays validated by :func:`as_density_matrix`.
Channels are small immutable classes:

* :class:`QuantumChannel` stores Kraus operators and caches its Choi operator.
* :class:`ClassicalChannel` stores a row-stochastic matrix ``P[x, y] = P(y|x)``.
* :class:`CQChannel` stores one output state per classical input symbol.

Bipartite operators always put the reference system first (``R ⊗ A``).
"""

from __future__ import annotations

from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .errors import CapacityError, ValidationError
from .linalg import CLIP_TOL, _psd_eigh, as_hermitian, partial_trace

TRACE_TOL = 1e-10
TP_TOL = 1e-9
STOCHASTIC_TOL = 1e-12
DEFAULT_DIM_BUDGET = 4096


def as_density_matrix(rho, name: str = "state") -> np.ndarray:
    """Validate a density matrix: Hermitian, PSD after clipping, unit trace."""
    a = as_hermitian(rho, name)
    tr = float(np.real(np.trace(a)))
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError("unit trace", f"{name} has trace {tr:.12g}")
    w, v = _psd_eigh(a, name)
    if np.linalg.eigvalsh(a)[0] < 0:
        a = (v * w) @ v.conj().T
    return a


def pure_state(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def basis_state(i: int, dim: int) -> np.ndarray:
    rho = np.zeros((dim, dim), dtype=complex)
    rho[i, i] = 1.0
    return rho


def max_entangled(dim: int) -> np.ndarray:
    """Maximally entangled state on ``R ⊗ A`` with ``dim R = dim A = dim``."""
    v = np.eye(dim, dtype=complex).ravel() / np.sqrt(dim)
    return np.outer(v, v.conj())


class QuantumChannel:
    """CPTP map given by Kraus operators of shape ``(dim_out, dim_in)``."""

    def __init__(self, kraus: Sequence[np.ndarray], validate: bool = True):
        ops = np.asarray([np.asarray(k, dtype=complex) for k in kraus])
        if ops.ndim != 3 or ops.shape[0] == 0:
            raise ValidationError("Kraus operator shape", "expected a nonempty list of matrices")
        if not np.all(np.isfinite(ops)):
            raise ValidationError("finite entries", "Kraus operators")
        self.kraus = ops
        self.kraus.setflags(write=False)
        self.dim_out, self.dim_in = ops.shape[1:]
        if validate:
            gram = np.einsum("kji,kjl->il", ops.conj(), ops)
            err = np.max(np.abs(gram - np.eye(self.dim_in)))
            if err > TP_TOL:
                raise ValidationError("Kraus completeness", f"max |sum K^dag K - I| = {err:.3e}")

    def __repr__(self) -> str:
        return f"QuantumChannel(dim_in={self.dim_in}, dim_out={self.dim_out}, n_kraus={len(self.kraus)})"

    @cached_property
    def choi(self) -> np.ndarray:
        """Choi operator ``sum_ij |i><j| ⊗ N(|i><j|)`` on ``R ⊗ B``."""
        # column k of the stack is (I ⊗ K_k)|Gamma> with |Gamma> = sum_i |i>|i>
        vecs = np.transpose(self.kraus, (0, 2, 1)).reshape(len(self.kraus), -1)
        out = vecs.T @ vecs.conj()
        out = (out + out.conj().T) / 2
        out.setflags(write=False)
        return out

    def apply(self, rho: np.ndarray, ref_dim: int = 1) -> np.ndarray:
        """Apply ``id_R ⊗ N`` to an operator on ``R ⊗ A``."""
        rho = np.asarray(rho, dtype=complex)
        da = self.dim_in
        if rho.shape != (ref_dim * da, ref_dim * da):
            raise ValidationError(
                "dimension mismatch", f"input shape {rho.shape} vs reference {ref_dim} x input {da}"
            )
        t = rho.reshape(ref_dim, da, ref_dim, da)
        out = np.einsum("kba,rasc,kdc->rbsd", self.kraus, t, self.kraus.conj())
        db = self.dim_out
        out = out.reshape(ref_dim * db, ref_dim * db)
        return (out + out.conj().T) / 2

    def apply_pure(self, psi: np.ndarray) -> np.ndarray:
        """Output of ``id_R ⊗ N`` on a pure input given as a ``dim_R × dim_A`` coefficient matrix."""
        # (I ⊗ K)|psi> has coefficient matrix psi @ K^T
        mats = psi[None, :, :] @ np.transpose(self.kraus, (0, 2, 1))
        vecs = mats.reshape(len(self.kraus), -1)
        return vecs.T @ vecs.conj()

    def tensor(self, other: "QuantumChannel") -> "QuantumChannel":
        ops = [np.kron(a, b) for a in self.kraus for b in other.kraus]
        return QuantumChannel(ops, validate=False)

    def to_quantum(self) -> "QuantumChannel":
        return self


class ClassicalChannel:
    """Classical channel with row-stochastic matrix ``P[x, y] = P(y|x)``."""

    def __init__(self, matrix, validate: bool = True):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or min(m.shape) < 1:
            raise ValidationError("stochastic matrix shape", f"got shape {m.shape}")
        if validate:
            if not np.all(np.isfinite(m)) or np.any(m < 0):
                raise ValidationError("nonnegative entries", "stochastic matrix")
            err = np.max(np.abs(m.sum(axis=1) - 1.0))
            if err > STOCHASTIC_TOL:
                raise ValidationError("rows sum to 1", f"max deviation {err:.3e}")
        self.matrix = m
        self.matrix.setflags(write=False)
        self.n_in, self.n_out = m.shape

    def __repr__(self) -> str:
        return f"ClassicalChannel(n_in={self.n_in}, n_out={self.n_out})"

    @property
    def dim_in(self) -> int:
        return self.n_in

    @property
    def dim_out(self) -> int:
        return self.n_out

    def output(self, x: int) -> np.ndarray:
        return self.matrix[x]

    def to_cq(self) -> "CQChannel":
        return CQChannel([np.diag(row).astype(complex) for row in self.matrix], validate=False)

    def to_quantum(self) -> QuantumChannel:
        return embed_classical(self)


class CQChannel:
    """Classical-quantum channel ``x -> omega_x``."""

    def __init__(self, outputs: Sequence[np.ndarray], validate: bool = True):
        if len(outputs) == 0:
            raise ValidationError("nonempty output list", "CQ channel")
        outs = [
            as_density_matrix(o, f"output {i}") if validate else np.asarray(o, dtype=complex)
            for i, o in enumerate(outputs)
        ]
        dims = {o.shape[0] for o in outs}
        if len(dims) != 1:
            raise ValidationError("equal output dimensions", f"got {sorted(dims)}")
        self.outputs = np.asarray(outs)
        self.outputs.setflags(write=False)
        self.n_in = len(outs)
        self.dim_out = outs[0].shape[0]

    def __repr__(self) -> str:
        return f"CQChannel(n_in={self.n_in}, dim_out={self.dim_out})"

    @property
    def dim_in(self) -> int:
        return self.n_in

    def output(self, x: int) -> np.ndarray:
        return self.outputs[x]

    def to_cq(self) -> "CQChannel":
        return self

    def to_quantum(self) -> QuantumChannel:
        return embed_cq(self)


AnyChannel = Union[QuantumChannel, ClassicalChannel, CQChannel]


def apply_channel(ch: AnyChannel, rho, ref_dim: int = 1) -> np.ndarray:
    """Apply ``id_R ⊗ N`` to a state on ``R ⊗ A`` (reference system first)."""
    q = ch.to_quantum()
    rho = as_density_matrix(rho, "input")
    return q.apply(rho, ref_dim)


def choi_of(ch: AnyChannel) -> np.ndarray:
    return ch.to_quantum().choi


def embed_classical(ch: ClassicalChannel) -> QuantumChannel:
    """Quantum channel measuring in the computational basis, then emitting ``P(.|x)``."""
    ops = []
    for x in range(ch.n_in):
        for y in range(ch.n_out):
            if ch.matrix[x, y] > 0:
                k = np.zeros((ch.n_out, ch.n_in), dtype=complex)
                k[y, x] = np.sqrt(ch.matrix[x, y])
                ops.append(k)
    return QuantumChannel(ops, validate=False)


def embed_cq(ch: CQChannel) -> QuantumChannel:
    """Quantum channel measuring in the computational basis, then preparing ``omega_x``."""
    ops = []
    for x, omega in enumerate(ch.outputs):
        w, v = np.linalg.eigh(omega)
        for lam, vec in zip(w, v.T):
            if lam > CLIP_TOL:
                k = np.zeros((ch.dim_out, ch.n_in), dtype=complex)
                k[:, x] = np.sqrt(lam) * vec
                ops.append(k)
    return QuantumChannel(ops, validate=False)


def tensor_power(rho, n: int, budget: int = DEFAULT_DIM_BUDGET) -> np.ndarray:
    """``n``-fold Kronecker power of a square matrix."""
    rho = np.asarray(rho)
    if n < 1:
        raise ValidationError("positive power", f"n = {n}")
    d = rho.shape[0]
    if d**n > budget:
        raise CapacityError(f"tensor power dimension {d}^{n} exceeds budget {budget}")
    out = rho
    for _ in range(n - 1):
        out = np.kron(out, rho)
    return out


def partial_trace_ref(rho: np.ndarray, ref_dim: int) -> np.ndarray:
    """Trace out the reference system of an operator on ``R ⊗ B``."""
    d = rho.shape[0] // ref_dim
    return partial_trace(rho, (ref_dim, d), keep=1)


# ---------------------------------------------------------------------------
# random instances


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator so that seeds map to independent streams."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def random_state(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    r = dim if rank is None else rank
    g = rng.standard_normal((dim, r)) + 1j * rng.standard_normal((dim, r))
    m = g @ g.conj().T
    m = m / np.real(np.trace(m))
    return (m + m.conj().T) / 2


def random_pure_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(
    dim_in: int,
    rng: np.random.Generator,
    dim_out: int | None = None,
    dim_env: int | None = None,
    low_rank: bool = False,
) -> QuantumChannel:
    """Channel from a Haar isometry into ``B ⊗ E`` followed by tracing out ``E``."""
    dim_out = dim_in if dim_out is None else dim_out
    if low_rank:
        dim_env = 1
    elif dim_env is None:
        dim_env = dim_in * dim_out
    big = dim_out * dim_env
    if big < dim_in:
        raise ValidationError("isometry dimension", f"dim_out*dim_env = {big} < dim_in = {dim_in}")
    iso = random_unitary(big, rng)[:, :dim_in].reshape(dim_out, dim_env, dim_in)
    ops = [iso[:, e, :] for e in range(dim_env)]
    return QuantumChannel(ops, validate=False)


def random_classical(n_in: int, rng: np.random.Generator, n_out: int | None = None) -> ClassicalChannel:
    n_out = n_in if n_out is None else n_out
    u = rng.uniform(size=(n_in, n_out))
    return ClassicalChannel(u / u.sum(axis=1, keepdims=True), validate=False)


def random_cq(n_in: int, dim_out: int, rng: np.random.Generator) -> CQChannel:
    return CQChannel([random_state(dim_out, rng) for _ in range(n_in)], validate=False)


def random_instance(kind: str, dim: int, seed, **kwargs):
    """Deterministic random state or channel.

    ``kind`` is one of ``"state"``, ``"pure"``, ``"channel"``, ``"classical"``
    or ``"cq"``. Extra keyword arguments are forwarded to the generator.
    """
    if dim < 1:
        raise ValidationError("positive dimension", f"dim = {dim}")
    rng = make_rng(seed)
    if kind == "state":
        return random_state(dim, rng, kwargs.get("rank"))
    if kind == "pure":
        return pure_state(random_pure_vector(dim, rng))
    if kind == "channel":
        return random_channel(dim, rng, **kwargs)
    if kind == "classical":
        return random_classical(dim, rng, kwargs.get("n_out"))
    if kind == "cq":
        return random_cq(dim, kwargs.get("dim_out", 2), rng)
    raise ValidationError("known instance kind", repr(kind))
