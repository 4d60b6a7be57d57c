"""Kraus decompositions and dilations to a larger Hilbert space.

A dilated space is ``C^N ⊗ C^D`` in the system-major layout of
:mod:`unistoch.core`: block ``(i, j)`` of an ``ND x ND`` matrix is the
``D x D`` submatrix ``m[i*D:(i+1)*D, j*D:(j+1)*D]``.
"""
from dataclasses import dataclass, field

import numpy as np

from .core import (
    PVM,
    Check,
    DimensionError,
    ValidationError,
    _tol,
    as_cmatrix,
    as_rmatrix,
    configuration_pvm,
    dagger,
    is_unitary,
    partial_trace_internal,
    tensor,
)
from .correspondence import _theta, density_matrix
from .stochastic import TransitionMatrix

__all__ = [
    "KrausSet",
    "DilatedSystem",
    "kraus_from_theta",
    "bit_flip_kraus",
    "gamma_from_kraus",
    "evolve_density_kraus",
    "dilate_trivial",
    "reconstruct_gamma",
    "get_block",
    "blockwise_gauge",
    "factorization_error",
    "stinespring_unitary",
    "realify",
    "apply_conjugation_real",
    "is_orthogonal",
]

_J = np.array([[0.0, -1.0], [1.0, 0.0]])
_K = np.array([[0.0, 1.0], [1.0, 0.0]])


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Operators ``K_b`` on ``C^N`` with ``sum_b K_b^† K_b = I``."""

    operators: tuple
    t: float | None = None
    tol: float | None = field(default=None, repr=False)

    def __post_init__(self):
        ops = tuple(as_cmatrix(k, square=True).copy() for k in self.operators)
        if not ops:
            raise ValidationError("a Kraus set needs at least one operator")
        n = ops[0].shape[0]
        if any(k.shape != (n, n) for k in ops):
            raise DimensionError("Kraus operators must share one square shape")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "operators", ops)
        dev = self.identity_violation()
        if dev > _tol(self.tol):
            raise ValidationError(f"Kraus identity violated by {dev:.3e}")

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self):
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def identity_violation(self) -> float:
        total = sum(dagger(k) @ k for k in self.operators)
        return float(np.max(np.abs(total - np.eye(self.dim))))


def _kraus(ks) -> KrausSet:
    return ks if isinstance(ks, KrausSet) else KrausSet(tuple(ks))


def kraus_from_theta(theta) -> KrausSet:
    """``K_b = Theta P_b``: column ``b`` of ``Theta`` kept, the rest zeroed."""
    th = _theta(theta)
    ops = []
    for b in range(th.shape[0]):
        k = np.zeros_like(th)
        k[:, b] = th[:, b]
        ops.append(k)
    return KrausSet(tuple(ops), t=getattr(theta, "t", None))


def bit_flip_kraus(p: float) -> KrausSet:
    """``{sqrt(1-p) I, sqrt(p) sigma_x}``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("flip probability must lie in [0, 1]")
    return KrausSet((np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * np.array([[0, 1], [1, 0]])))


def gamma_from_kraus(ks, pvm: PVM | None = None) -> TransitionMatrix:
    """``Gamma_ij = sum_b tr(K_b^† P_i K_b P_j)``."""
    ks = _kraus(ks)
    pvm = configuration_pvm(ks.dim) if pvm is None else pvm
    if pvm.dim != ks.dim:
        raise DimensionError(f"PVM of dim {pvm.dim} for Kraus operators of dim {ks.dim}")
    g = np.zeros((len(pvm), len(pvm)))
    for k in ks:
        kd = dagger(k)
        for i, p in enumerate(pvm):
            left = kd @ p @ k
            for j, q in enumerate(pvm):
                g[i, j] += np.trace(left @ q).real
    return TransitionMatrix(g, t=ks.t)


def evolve_density_kraus(rho0, ks) -> np.ndarray:
    """``rho(t) = sum_b K_b rho(0) K_b^†``."""
    ks = _kraus(ks)
    rho0 = density_matrix(rho0)
    if rho0.shape[0] != ks.dim:
        raise DimensionError(f"density matrix of dim {rho0.shape[0]} for Kraus operators of dim {ks.dim}")
    return density_matrix(sum(k @ rho0 @ dagger(k) for k in ks))


def _dilated_gamma(evolution, n, d, internal_pvm, gamma_index):
    eye_d = np.eye(d)
    cols = [tensor(np.diag(np.eye(n)[j]), internal_pvm[gamma_index]) for j in range(n)]
    ed = dagger(evolution)
    g = np.empty((n, n))
    for i in range(n):
        left = ed @ tensor(np.diag(np.eye(n)[i]), eye_d) @ evolution
        for j in range(n):
            g[i, j] = np.trace(partial_trace_internal(left @ cols[j], n, d)).real
    return g


@dataclass(frozen=True, eq=False)
class DilatedSystem:
    """Evolution on ``C^N ⊗ C^D`` read through the dilated dictionary.

    The system side uses the configuration PVM; the internal side uses
    ``internal_pvm`` with label ``gamma_index`` fixing the column
    projectors.  Construction fails unless the reconstructed ``Gamma`` is
    column stochastic.
    """

    system_dim: int
    internal_dim: int
    internal_pvm: PVM
    gamma_index: int
    evolution: np.ndarray
    tol: float | None = field(default=None, repr=False)
    _gamma: np.ndarray = field(init=False, repr=False, default=None)

    def __post_init__(self):
        n, d = self.system_dim, self.internal_dim
        if n < 1 or d < 1:
            raise DimensionError("system and internal dimensions must be at least 1")
        ev = as_cmatrix(self.evolution, square=True).copy()
        if ev.shape[0] != n * d:
            raise DimensionError(f"evolution has shape {ev.shape}, expected {(n * d, n * d)}")
        if self.internal_pvm.dim != d:
            raise DimensionError(f"internal PVM of dim {self.internal_pvm.dim} for internal dim {d}")
        if not 0 <= self.gamma_index < len(self.internal_pvm):
            raise IndexError(f"gamma index {self.gamma_index} out of range")
        ev.setflags(write=False)
        object.__setattr__(self, "evolution", ev)
        g = _dilated_gamma(ev, n, d, self.internal_pvm, self.gamma_index)
        tol = _tol(self.tol)
        col_err = np.abs(g.sum(axis=0) - 1.0)
        if g.min() < -tol or col_err.max() > tol:
            worst = int(np.argmax(np.maximum(col_err, -g.min(axis=0))))
            raise ValidationError(
                f"dilated dictionary is not column stochastic; worst column {worst} "
                f"(sum {g[:, worst].sum():.6g}, min {g[:, worst].min():.3e})"
            )
        g.setflags(write=False)
        object.__setattr__(self, "_gamma", g)

    def to_dict(self) -> dict:
        from .io import matrix_to_json

        return {
            "system_dim": self.system_dim,
            "internal_dim": self.internal_dim,
            "gamma_index": self.gamma_index,
            "internal_pvm": [matrix_to_json(p) for p in self.internal_pvm],
            "evolution": matrix_to_json(self.evolution),
        }


def dilate_trivial(theta, d: int, internal_pvm: PVM | None = None, gamma_index: int = 0) -> DilatedSystem:
    """``Theta -> Theta ⊗ 1_D``."""
    th = _theta(theta)
    if d < 1:
        raise DimensionError("internal dimension must be at least 1")
    internal_pvm = configuration_pvm(d) if internal_pvm is None else internal_pvm
    return DilatedSystem(th.shape[0], d, internal_pvm, gamma_index, tensor(th, np.eye(d)))


def reconstruct_gamma(ds: DilatedSystem) -> TransitionMatrix:
    """``Gamma_ij = tr tr_I(Theta~^† [P_i ⊗ 1] Theta~ [P_j ⊗ P_gamma])``."""
    return TransitionMatrix(ds._gamma, tol=ds.tol)


def get_block(m, n: int, d: int, i: int, j: int) -> np.ndarray:
    """``D x D`` block ``(i, j)`` of an ``ND x ND`` matrix."""
    m = np.asarray(m)
    if m.shape != (n * d, n * d):
        raise DimensionError(f"expected shape {(n * d, n * d)}, got {m.shape}")
    return m[i * d:(i + 1) * d, j * d:(j + 1) * d]


def blockwise_gauge(ds: DilatedSystem, v_blocks, tol=None) -> DilatedSystem:
    """Left-multiply each block ``(i, j)`` of the evolution by its own unitary.

    ``v_blocks`` is an ``(N, N, D, D)`` array, a nested ``N x N`` sequence of
    ``D x D`` matrices, or a callable ``(i, j) -> D x D`` matrix.
    """
    n, d = ds.system_dim, ds.internal_dim
    ev = np.array(ds.evolution)
    for i in range(n):
        for j in range(n):
            v = as_cmatrix(v_blocks(i, j) if callable(v_blocks) else v_blocks[i][j], square=True)
            if v.shape != (d, d):
                raise DimensionError(f"block unitary ({i},{j}) has shape {v.shape}, expected {(d, d)}")
            check = is_unitary(v, tol)
            if not check:
                raise ValidationError(f"block unitary ({i},{j}) deviates from unitarity by {check.deviation:.3e}")
            ev[i * d:(i + 1) * d, j * d:(j + 1) * d] = v @ ev[i * d:(i + 1) * d, j * d:(j + 1) * d]
    return DilatedSystem(n, d, ds.internal_pvm, ds.gamma_index, ev, ds.tol)


def factorization_error(m, n: int, d: int) -> float:
    """Frobenius distance from ``m`` to the nearest ``A ⊗ B`` with ``A`` ``n x n``.

    Uses the operator-Schmidt rearrangement: ``m`` is a Kronecker product
    iff the ``n^2 x d^2`` matrix ``R[(i,j),(a,b)] = m[(i,a),(j,b)]`` has
    rank one.
    """
    m = np.asarray(m)
    if m.shape != (n * d, n * d):
        raise DimensionError(f"expected shape {(n * d, n * d)}, got {m.shape}")
    r = m.reshape(n, d, n, d).transpose(0, 2, 1, 3).reshape(n * n, d * d)
    s = np.linalg.svd(r, compute_uv=False)
    return float(np.sqrt(np.sum(s[1:] ** 2)))


def stinespring_unitary(ks, seed=0) -> DilatedSystem:
    """Unitary dilation of a Kraus set on ``C^N ⊗ C^D``, ``D = len(ks)``.

    The isometry ``psi ⊗ e_0 -> sum_b K_b psi ⊗ e_b`` fills the columns with
    internal label 0; the remaining columns are an orthonormal basis of the
    complement, obtained from Gaussian candidates drawn with ``seed``.  The
    result uses the configuration PVM internally with ``gamma_index = 0``.
    """
    ks = _kraus(ks)
    n, d = ks.dim, len(ks)
    big = n * d
    w = np.zeros((big, n), dtype=complex)
    for b, k in enumerate(ks):
        w[b::d, :] = k
    u = np.zeros((big, big), dtype=complex)
    slot = np.arange(n) * d
    u[:, slot] = w
    if d > 1:
        rng = np.random.default_rng(seed)
        cand = rng.standard_normal((big, big - n)) + 1j * rng.standard_normal((big, big - n))
        for _ in range(2):
            cand = cand - w @ (dagger(w) @ cand)
        q, _ = np.linalg.qr(cand)
        for _ in range(2):
            q = q - w @ (dagger(w) @ q)
            q, _ = np.linalg.qr(q)
        rest = np.setdiff1d(np.arange(big), slot)
        u[:, rest] = q
    return DilatedSystem(n, d, configuration_pvm(d), 0, u)


def realify(m) -> np.ndarray:
    """Replace each entry ``a + ib`` by the real block ``[[a, -b], [b, a]]``."""
    m = as_cmatrix(m)
    return np.kron(m.real, np.eye(2)) + np.kron(m.imag, _J)


def apply_conjugation_real(m2n) -> np.ndarray:
    """Conjugate a realified matrix by block-diagonal ``[[0, 1], [1, 0]]``.

    The result equals ``realify(conj(m))`` when the input is ``realify(m)``.
    """
    r = as_rmatrix(m2n)
    if r.shape[0] % 2 or r.shape[1] % 2:
        raise DimensionError(f"realified matrices have even dimensions, got {r.shape}")
    kl = np.kron(np.eye(r.shape[0] // 2), _K)
    kr = np.kron(np.eye(r.shape[1] // 2), _K)
    return kl @ r @ kr


def is_orthogonal(r, tol=None) -> Check:
    """Check ``r^T r = I`` for a real square matrix."""
    r = as_rmatrix(r, square=True)
    dev = float(np.max(np.abs(r.T @ r - np.eye(r.shape[0]))))
    return Check(dev <= _tol(tol), dev)

