"""Schur-Hadamard and Foldy-Wouthuysen gauge transformations.

Schur-Hadamard transformations multiply each entry of the evolution
operator by its own phase.  Foldy-Wouthuysen transformations rotate the
whole Hilbert-space description by a time-dependent unitary ``V(t)``.
Neither changes any transition probability.
"""
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import PVM, DimensionError, ValidationError, _tol, as_cmatrix, configuration_pvm, dagger, is_unitary
from .correspondence import (
    FD_STEP,
    EvolutionOperator,
    _theta,
    born_probabilities,
    dictionary_gamma,
    expect_obs,
    observable_matrix,
)
from .dynamics import Residual, UnitaryFamily, _expm_hermitian, _hamiltonian

__all__ = [
    "sh_gauge",
    "FWTransform",
    "FWBundle",
    "fw_gauge",
    "fw_invariance",
    "transform_hamiltonian",
    "check_covariant_derivative",
]


def sh_gauge(theta, phases) -> EvolutionOperator:
    """``Theta -> Theta ⊙ exp(i phases)``.

    ``phases`` is an ``N x N`` real matrix of angles in radians; it is not
    reduced modulo ``2 pi``.
    """
    th = _theta(theta)
    phases = np.asarray(phases, dtype=float)
    if phases.shape != th.shape:
        raise DimensionError(f"phase matrix {phases.shape} does not match Theta {th.shape}")
    if not np.all(np.isfinite(phases)):
        raise ValidationError("phases must be finite")
    return EvolutionOperator(
        th * np.exp(1j * phases),
        t=getattr(theta, "t", None),
        anchor_time=getattr(theta, "anchor_time", 0.0),
    )


@dataclass(frozen=True, eq=False)
class FWTransform:
    """Time-dependent unitary ``V(t)``, checked for unitarity on every call."""

    evaluator: Callable[[float], np.ndarray]
    dim: int
    tol: float | None = field(default=None, repr=False)

    def __call__(self, t: float) -> np.ndarray:
        v = as_cmatrix(self.evaluator(t), square=True)
        if v.shape[0] != self.dim:
            raise DimensionError(f"V({t}) has shape {v.shape}, expected dim {self.dim}")
        check = is_unitary(v, self.tol)
        if not check:
            raise ValidationError(f"V({t}) is not unitary (deviation {check.deviation:.3e})")
        return v

    @classmethod
    def constant(cls, v) -> "FWTransform":
        v = as_cmatrix(v, square=True).copy()
        v.setflags(write=False)
        return cls(lambda t: v, v.shape[0])

    @classmethod
    def from_generator(cls, g) -> "FWTransform":
        """``V(t) = exp(-i G t)`` for self-adjoint ``G``."""
        g = as_cmatrix(g, square=True)
        if np.max(np.abs(g - dagger(g))) > _tol(None):
            raise ValidationError("generator must be self-adjoint")
        return cls(lambda t: _expm_hermitian(g, t, 1.0), g.shape[0])

    @classmethod
    def adjoint_of(cls, fam: UnitaryFamily) -> "FWTransform":
        """``V(t) = U(t <- 0)^†``, the Heisenberg-picture gauge."""
        return cls(fam.adjoint(), fam.dim)

    def derivative(self, t: float, h_step: float = FD_STEP) -> np.ndarray:
        return (self(t + h_step) - self(t - h_step)) / (2 * h_step)


@dataclass(frozen=True, eq=False)
class FWBundle:
    """Gauge-transformed description at one time ``t``.

    ``pvm`` represents the configurations at time ``t`` and ``initial_pvm``
    at time 0; they coincide only when ``V`` is time independent.
    """

    theta: np.ndarray
    rho: np.ndarray
    observables: tuple
    pvm: PVM
    initial_pvm: PVM
    psi: np.ndarray | None = None

    def probabilities(self) -> np.ndarray:
        return born_probabilities(self.rho, self.pvm)

    def expectations(self) -> np.ndarray:
        return np.array([expect_obs(a, self.rho) for a in self.observables])

    def gamma(self) -> np.ndarray:
        return dictionary_gamma(self.theta, self.pvm, self.initial_pvm)


def _transform_pvm(pvm, v):
    return PVM(tuple(v @ p @ dagger(v) for p in pvm), tol=pvm.tol)


def fw_gauge(theta, rho, observables, v: FWTransform, t: float, pvm: PVM | None = None, psi=None) -> FWBundle:
    """Apply ``V`` to every ingredient of the description at time ``t``.

    ``rho`` (and ``psi`` if given) are the state at time ``t``.  The
    evolution operator becomes ``V(t) Theta V(0)^†``; the projectors
    representing configurations are carried along, at ``t`` for rows and at
    0 for columns of the dictionary.
    """
    th = np.asarray(theta, dtype=complex)
    n = th.shape[0]
    if pvm is None:
        pvm = configuration_pvm(n)
    vt, v0 = v(t), v(0.0)
    rho = as_cmatrix(rho, square=True)
    if rho.shape != th.shape or vt.shape != th.shape or pvm.dim != n:
        raise DimensionError("Theta, rho, V and the PVM must share one dimension")
    obs = tuple(vt @ observable_matrix(a) @ dagger(vt) for a in observables)
    return FWBundle(
        theta=vt @ th @ dagger(v0),
        rho=vt @ rho @ dagger(vt),
        observables=obs,
        pvm=_transform_pvm(pvm, vt),
        initial_pvm=_transform_pvm(pvm, v0),
        psi=None if psi is None else vt @ np.asarray(psi, dtype=complex),
    )


def fw_invariance(theta, rho, observables, v: FWTransform, t: float, pvm: PVM | None = None) -> dict:
    """Largest changes in probabilities, expectations and ``Gamma`` under ``V``."""
    if pvm is None:
        pvm = configuration_pvm(np.asarray(theta).shape[0])
    obs = tuple(observable_matrix(a) for a in observables)
    plain = FWBundle(np.asarray(theta, dtype=complex), as_cmatrix(rho), obs, pvm, pvm)
    moved = fw_gauge(theta, rho, observables, v, t, pvm)
    exp_plain, exp_moved = plain.expectations(), moved.expectations()
    return {
        "probabilities": float(np.max(np.abs(plain.probabilities() - moved.probabilities()))),
        "expectations": float(np.max(np.abs(exp_plain - exp_moved))) if exp_plain.size else 0.0,
        "gamma": float(np.max(np.abs(plain.gamma() - moved.gamma()))),
    }


def transform_hamiltonian(h, v: FWTransform, t: float, h_step: float = FD_STEP, hbar: float = 1.0) -> np.ndarray:
    """``H_V = V H V^† - i hbar V dV^†/dt`` with a central-difference derivative."""
    if h_step <= 0:
        raise ValueError("h_step must be positive")
    hm = _hamiltonian(h)
    vt = v(t)
    dvd = dagger(v.derivative(t, h_step))
    return vt @ hm(t) @ dagger(vt) - 1j * hbar * vt @ dvd


def check_covariant_derivative(h, v: FWTransform, psi, t: float, h_step: float = FD_STEP, hbar: float = 1.0) -> Residual:
    """Covariance of ``D = d/dt + (i/hbar) H`` under ``V``.

    Compares ``V D psi`` with ``D_V (V psi)`` where ``D_V`` uses the
    transformed Hamiltonian.  ``psi`` is a fixed vector or a callable
    trajectory ``t -> psi(t)``.
    """
    if h_step <= 0:
        raise ValueError("h_step must be positive")
    hm = _hamiltonian(h)
    traj = psi if callable(psi) else (lambda s, _p=np.asarray(psi, dtype=complex): _p)
    psi_t = traj(t)
    dpsi = (traj(t + h_step) - traj(t - h_step)) / (2 * h_step)
    vt = v(t)
    lhs = vt @ (dpsi + (1j / hbar) * hm(t) @ psi_t)
    d_vpsi = (v(t + h_step) @ traj(t + h_step) - v(t - h_step) @ traj(t - h_step)) / (2 * h_step)
    h_v = transform_hamiltonian(hm, v, t, h_step, hbar)
    rhs = d_vpsi + (1j / hbar) * h_v @ (vt @ psi_t)
    return Residual(float(np.linalg.norm(lhs - rhs)), lhs, rhs)
