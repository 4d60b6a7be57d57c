"""The stochastic-quantum dictionary and Hilbert-space bookkeeping.

Translates between transition matrices and time-evolution operators, and
provides density matrices, state vectors, the Born rule, expectation values
and the Heisenberg picture.
"""
from dataclasses import dataclass, field

import numpy as np

from .core import (
    PVM,
    DimensionError,
    ValidationError,
    _as_index,
    _tol,
    as_cmatrix,
    dagger,
    is_psd,
    is_self_adjoint,
)
from .stochastic import TransitionMatrix, prob_vector

__all__ = [
    "RANK_ONE_TOL",
    "FD_STEP",
    "EvolutionOperator",
    "Beable",
    "density_matrix",
    "state_vector",
    "emergeable",
    "observable_matrix",
    "gamma_from_theta",
    "theta_from_gamma",
    "dictionary_rhs",
    "dictionary_gamma",
    "initial_density",
    "evolve_density",
    "born_rule",
    "born_rule_state",
    "born_probabilities",
    "factor_rank_one",
    "expect_obs",
    "to_heisenberg",
    "emergeable_rate",
]

RANK_ONE_TOL = 1e-8
FD_STEP = 1e-5


@dataclass(frozen=True, eq=False)
class EvolutionOperator:
    """Square matrix ``Theta(t <- anchor)`` with unit-norm columns.

    The unit column norms are exactly the condition that makes the entrywise
    modulus squares column stochastic.  ``Theta`` need not be unitary.
    """

    theta: np.ndarray
    t: float | None = None
    anchor_time: float = 0.0
    tol: float | None = field(default=None, repr=False)

    def __post_init__(self):
        th = as_cmatrix(self.theta, square=True).copy()
        err = float(np.max(np.abs(np.sum(np.abs(th) ** 2, axis=0) - 1.0)))
        if err > _tol(self.tol):
            raise ValidationError(f"columns of Theta do not have unit norm (max error {err:.3e})")
        th.setflags(write=False)
        object.__setattr__(self, "theta", th)

    @property
    def dim(self) -> int:
        return self.theta.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.theta, dtype=dtype)


def _theta(x, tol=None) -> np.ndarray:
    if isinstance(x, EvolutionOperator):
        return x.theta
    return EvolutionOperator(x, tol=tol).theta


@dataclass(frozen=True, eq=False)
class Beable:
    """Observable diagonal in the configuration basis.

    ``values[i]`` is the value the observable takes in configuration ``i``
    at time ``t``.
    """

    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        if v.ndim != 1 or v.size < 1:
            raise DimensionError("beable values must be a non-empty 1-D array")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.size

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.values).astype(complex)


def observable_matrix(a) -> np.ndarray:
    """Matrix form of a :class:`Beable` or a square array."""
    if isinstance(a, Beable):
        return a.matrix
    return as_cmatrix(a, square=True)


def density_matrix(rho, tol=None) -> np.ndarray:
    """Validate a density matrix: self-adjoint, PSD, unit trace."""
    rho = as_cmatrix(rho, square=True)
    tol = _tol(tol)
    sa = is_self_adjoint(rho, tol)
    if not sa:
        raise ValidationError(f"density matrix is not self-adjoint (deviation {sa.deviation:.3e})")
    psd = is_psd(rho, tol)
    if not psd:
        raise ValidationError(f"density matrix is not positive semidefinite (deviation {psd.deviation:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"density matrix has trace {tr!r}, not 1")
    return rho


def state_vector(psi, tol=None) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.size < 1:
        raise DimensionError(f"state vector must be 1-D and non-empty, got shape {psi.shape}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > _tol(tol):
        raise ValidationError(f"state vector has norm {norm!r}, not 1")
    return psi


def emergeable(m, tol=None) -> np.ndarray:
    """Validate a self-adjoint (generally non-diagonal) observable."""
    m = as_cmatrix(m, square=True)
    check = is_self_adjoint(m, tol)
    if not check:
        raise ValidationError(f"observable is not self-adjoint (deviation {check.deviation:.3e})")
    return m


def gamma_from_theta(theta, tol=None) -> TransitionMatrix:
    """Transition matrix ``Gamma_ij = |Theta_ij|^2``."""
    t, anchor = getattr(theta, "t", None), getattr(theta, "anchor_time", 0.0)
    th = _theta(theta, tol)
    return TransitionMatrix(np.abs(th) ** 2, t=t, anchor_time=anchor, tol=tol)


def theta_from_gamma(gamma, phases=None, tol=None) -> EvolutionOperator:
    """Evolution operator ``Theta_ij = sqrt(Gamma_ij) exp(i phases_ij)``.

    With ``phases`` omitted every phase is zero, giving the entrywise
    non-negative square root.
    """
    if not isinstance(gamma, TransitionMatrix):
        gamma = TransitionMatrix(gamma, tol=tol)
    g = np.clip(gamma.gamma, 0.0, None)
    th = np.sqrt(g).astype(complex)
    if phases is not None:
        phases = np.asarray(phases, dtype=float)
        if phases.shape != g.shape:
            raise DimensionError(f"phase matrix shape {phases.shape} does not match {g.shape}")
        th = th * np.exp(1j * phases)
    return EvolutionOperator(th, t=gamma.t, anchor_time=gamma.anchor_time, tol=tol)


def _pvm_for(pvm, n):
    if not isinstance(pvm, PVM):
        pvm = PVM(tuple(pvm))
    if pvm.dim != n:
        raise DimensionError(f"PVM of dim {pvm.dim} does not match operator dim {n}")
    return pvm


def dictionary_rhs(theta, pvm, i: int, j: int, initial_pvm=None) -> float:
    """``tr(Theta^† P_i Theta P_j)`` for projectors of ``pvm``.

    ``initial_pvm`` supplies the column projectors ``P_j`` when they differ
    from the row projectors, as happens after a time-dependent change of
    frame.
    """
    th = as_cmatrix(np.asarray(theta), square=True)
    rows = _pvm_for(pvm, th.shape[0])
    cols = rows if initial_pvm is None else _pvm_for(initial_pvm, th.shape[0])
    i = _as_index(i, len(rows), "row index")
    j = _as_index(j, len(cols), "column index")
    val = np.trace(dagger(th) @ rows[i] @ th @ cols[j])
    return float(val.real)


def dictionary_gamma(theta, pvm, initial_pvm=None) -> np.ndarray:
    """Full matrix of :func:`dictionary_rhs` values over the PVM labels."""
    th = as_cmatrix(np.asarray(theta), square=True)
    rows = _pvm_for(pvm, th.shape[0])
    cols = rows if initial_pvm is None else _pvm_for(initial_pvm, th.shape[0])
    out = np.empty((len(rows), len(cols)))
    for i, p in enumerate(rows):
        left = dagger(th) @ p @ th
        for j, q in enumerate(cols):
            out[i, j] = np.trace(left @ q).real
    return out


def initial_density(p0, tol=None) -> np.ndarray:
    """Diagonal density matrix carrying the initial probabilities."""
    return np.diag(prob_vector(p0, tol)).astype(complex)


def evolve_density(rho0, theta, tol=None) -> np.ndarray:
    """``rho(t) = Theta rho(0) Theta^†``, re-validated.

    The result is a density matrix automatically when ``rho(0)`` is diagonal
    in the configuration basis; for other inputs and non-unitary ``Theta``
    the output may fail validation, which raises :class:`ValidationError`.
    """
    rho0 = density_matrix(rho0, tol)
    th = _theta(theta, tol)
    if th.shape != rho0.shape:
        raise DimensionError(f"Theta {th.shape} and rho {rho0.shape} differ in shape")
    rho = th @ rho0 @ dagger(th)
    try:
        return density_matrix(rho, tol)
    except ValidationError as exc:
        raise ValidationError(f"evolved density matrix is invalid: {exc}") from None


def born_rule(rho, pvm, i: int) -> float:
    """``p_i = tr(P_i rho)``."""
    rho = as_cmatrix(rho, square=True)
    pvm = _pvm_for(pvm, rho.shape[0])
    i = _as_index(i, len(pvm))
    return float(np.trace(pvm[i] @ rho).real)


def born_probabilities(rho, pvm) -> np.ndarray:
    """Born-rule probabilities for every element of ``pvm``."""
    rho = as_cmatrix(rho, square=True)
    pvm = _pvm_for(pvm, rho.shape[0])
    return np.array([np.trace(p @ rho).real for p in pvm])


def born_rule_state(psi, i: int) -> float:
    """``p_i = |Psi_i|^2``."""
    psi = np.asarray(psi, dtype=complex)
    i = _as_index(i, psi.size)
    return float(abs(psi[i]) ** 2)


def factor_rank_one(rho, tol=None) -> np.ndarray:
    """State vector ``Psi`` with ``rho = Psi Psi^†``.

    The global phase is fixed so that the first component with modulus
    above ``tol`` is real and positive.

    Raises
    ------
    ValidationError
        If the second-largest eigenvalue of ``rho`` is not below
        :data:`RANK_ONE_TOL`.
    """
    rho = density_matrix(rho, tol)
    w, v = np.linalg.eigh(0.5 * (rho + dagger(rho)))
    if w.size > 1 and w[-2] >= RANK_ONE_TOL:
        rank = int(np.sum(w >= RANK_ONE_TOL))
        raise ValidationError(f"density matrix is not rank one (numerical rank {rank})")
    psi = v[:, -1] * np.sqrt(max(w[-1], 0.0))
    lead = np.flatnonzero(np.abs(psi) > _tol(tol))[0]
    psi = psi * (abs(psi[lead]) / psi[lead])
    return psi / np.linalg.norm(psi)


def expect_obs(a, rho, tol=None) -> float:
    """``<A> = tr(A rho)`` for a self-adjoint observable.

    Raises if ``A`` is not self-adjoint or if the trace has an imaginary
    part larger than ``tol``.
    """
    am = emergeable(observable_matrix(a), tol)
    rho = as_cmatrix(rho, square=True)
    if am.shape != rho.shape:
        raise DimensionError(f"observable {am.shape} and rho {rho.shape} differ in shape")
    val = np.trace(am @ rho)
    if abs(val.imag) > _tol(tol):
        raise ValidationError(f"expectation value has imaginary part {val.imag:.3e}")
    return float(val.real)


def to_heisenberg(a, theta) -> np.ndarray:
    """Heisenberg-picture observable ``Theta^† A Theta``.

    For a generic ``Theta`` the image of a projector need not be a
    projector; check with :func:`unistoch.core.is_projector` if it matters.
    """
    am = observable_matrix(a)
    th = as_cmatrix(np.asarray(theta), square=True)
    if am.shape != th.shape:
        raise DimensionError(f"observable {am.shape} and Theta {th.shape} differ in shape")
    return dagger(th) @ am @ th


def emergeable_rate(a, family, h: float = FD_STEP) -> np.ndarray:
    """Rate emergeable ``dA^H/dt`` at ``t = 0`` by central differences.

    ``family`` maps a time to ``U(t <- 0)``.  The result is symmetrized, so
    it is exactly self-adjoint.
    """
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    am = observable_matrix(a)
    rate = (to_heisenberg(am, family(h)) - to_heisenberg(am, family(-h))) / (2 * h)
    return 0.5 * (rate + dagger(rate))
