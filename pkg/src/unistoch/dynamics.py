"""Unitary families, Hamiltonians and the equations of motion.

Integration uses the classical fixed-step fourth-order Runge-Kutta scheme so
results are deterministic and the error is easy to bound.  Matrix
exponentials of constant Hamiltonians go through the eigendecomposition.
"""
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .core import (
    DimensionError,
    ValidationError,
    _tol,
    as_cmatrix,
    dagger,
    is_self_adjoint,
    is_unitary,
)
from .correspondence import FD_STEP, Beable, density_matrix, state_vector

__all__ = [
    "DT",
    "UnitaryFamily",
    "Hamiltonian",
    "Residual",
    "identity_family",
    "family_from_constant_h",
    "family_from_piecewise",
    "extract_hamiltonian",
    "integrate_schrodinger",
    "integrate_von_neumann",
    "check_ehrenfest",
    "check_heisenberg_eom",
    "phase_distance",
]

DT = 1e-3


@dataclass(frozen=True, eq=False)
class UnitaryFamily:
    """Time-evolution operators ``U(t <- 0)`` given by a pure function of ``t``.

    Every evaluation is checked for unitarity, and ``U(0)`` must be the
    identity.
    """

    evaluator: Callable[[float], np.ndarray]
    dim: int
    hbar: float = 1.0
    tol: float | None = field(default=None, repr=False)

    def __post_init__(self):
        u0 = self(0.0)
        dev = float(np.max(np.abs(u0 - np.eye(self.dim))))
        if dev > _tol(self.tol):
            raise ValidationError(f"U(0) differs from the identity by {dev:.3e}")

    def __call__(self, t: float) -> np.ndarray:
        u = as_cmatrix(self.evaluator(t), square=True)
        if u.shape[0] != self.dim:
            raise DimensionError(f"family returned shape {u.shape}, expected dim {self.dim}")
        check = is_unitary(u, self.tol)
        if not check:
            raise ValidationError(f"U({t}) is not unitary (deviation {check.deviation:.3e})")
        return u

    def adjoint(self) -> Callable[[float], np.ndarray]:
        """The map ``t -> U(t)^†``."""
        return lambda t: dagger(self(t))


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Self-adjoint ``H(t)``; construct with :meth:`constant` for fixed ``H``."""

    evaluator: Callable[[float], np.ndarray]
    dim: int
    matrix: np.ndarray | None = None
    tol: float | None = field(default=None, repr=False)

    @classmethod
    def constant(cls, h, tol=None) -> "Hamiltonian":
        h = as_cmatrix(h, square=True).copy()
        check = is_self_adjoint(h, tol)
        if not check:
            raise ValidationError(f"Hamiltonian is not self-adjoint (deviation {check.deviation:.3e})")
        h.setflags(write=False)
        return cls(lambda t: h, h.shape[0], h, tol)

    @property
    def is_constant(self) -> bool:
        return self.matrix is not None

    def __call__(self, t: float) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        h = as_cmatrix(self.evaluator(t), square=True)
        if h.shape[0] != self.dim:
            raise DimensionError(f"H({t}) has shape {h.shape}, expected dim {self.dim}")
        check = is_self_adjoint(h, self.tol)
        if not check:
            raise ValidationError(f"H({t}) is not self-adjoint (deviation {check.deviation:.3e})")
        return h


def _hamiltonian(h) -> Hamiltonian:
    return h if isinstance(h, Hamiltonian) else Hamiltonian.constant(h)


class Residual(NamedTuple):
    """Residual of an equation check with both sides for inspection."""

    residual: float
    lhs: object
    rhs: object


def identity_family(n: int, hbar: float = 1.0) -> UnitaryFamily:
    eye = np.eye(n, dtype=complex)
    return UnitaryFamily(lambda t: eye, n, hbar)


def _expm_hermitian(h, t, hbar):
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t / hbar)) @ dagger(v)


def family_from_constant_h(h, hbar: float = 1.0) -> UnitaryFamily:
    """``U(t) = exp(-i H t / hbar)`` through the eigendecomposition of ``H``."""
    hm = _hamiltonian(h)
    if not hm.is_constant:
        raise ValueError("family_from_constant_h needs a time-independent Hamiltonian")
    w, v = np.linalg.eigh(hm.matrix)
    vd = dagger(v)
    return UnitaryFamily(lambda t: (v * np.exp(-1j * w * t / hbar)) @ vd, hm.dim, hbar)


def family_from_piecewise(segments, hbar: float = 1.0) -> UnitaryFamily:
    """Compose constant-Hamiltonian segments ``[(duration, H), ...]`` starting at ``t = 0``.

    After the last segment its Hamiltonian keeps acting; negative times use
    the first segment's Hamiltonian.
    """
    segs = [(float(d), as_cmatrix(h, square=True)) for d, h in segments]
    if not segs or any(d <= 0 for d, _ in segs):
        raise ValueError("segments need positive durations")
    n = segs[0][1].shape[0]
    for _, h in segs:
        if h.shape != (n, n) or not is_self_adjoint(h):
            raise ValidationError("segment Hamiltonians must be self-adjoint of one dimension")

    def evaluate(t):
        if t <= 0:
            return _expm_hermitian(segs[0][1], t, hbar)
        u = np.eye(n, dtype=complex)
        start = 0.0
        for k, (d, h) in enumerate(segs):
            last = k == len(segs) - 1
            span = t - start if last else min(d, t - start)
            u = _expm_hermitian(h, span, hbar) @ u
            start += d
            if t <= start:
                break
        return u

    return UnitaryFamily(evaluate, n, hbar)


def extract_hamiltonian(fam: UnitaryFamily, t: float, h_step: float = FD_STEP) -> np.ndarray:
    """``H(t) = i hbar (dU/dt) U^†`` by central differences, symmetrized."""
    if h_step <= 0:
        raise ValueError("h_step must be positive")
    du = (fam(t + h_step) - fam(t - h_step)) / (2 * h_step)
    h = 1j * fam.hbar * du @ dagger(fam(t))
    return 0.5 * (h + dagger(h))


def _rk4(f, y0, t_end, dt):
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_end <= 0 or dt > t_end:
        raise ValueError(f"need 0 < dt <= t_end, got dt={dt}, t_end={t_end}")
    steps = int(np.ceil(t_end / dt - 1e-9))
    step = t_end / steps
    y, t = y0, 0.0
    for _ in range(steps):
        y = _rk4_step(f, y, t, step)
        t += step
    return y


def _rk4_step(f, y, t, step):
    k1 = f(t, y)
    k2 = f(t + step / 2, y + step / 2 * k1)
    k3 = f(t + step / 2, y + step / 2 * k2)
    k4 = f(t + step, y + step * k3)
    return y + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _schrodinger_rhs(hm, hbar):
    return lambda t, psi: (-1j / hbar) * (hm(t) @ psi)


def _von_neumann_rhs(hm, hbar):
    def rhs(t, rho):
        h = hm(t)
        return (-1j / hbar) * (h @ rho - rho @ h)

    return rhs


def integrate_schrodinger(h, psi0, t_end: float, dt: float = DT, hbar: float = 1.0, return_drift=False):
    """Integrate ``i hbar dPsi/dt = H(t) Psi`` from 0 to ``t_end``.

    The final state is renormalized.  With ``return_drift=True`` the pair
    ``(psi, drift)`` is returned, ``drift`` being ``| |psi| - 1 |`` before
    renormalization.
    """
    hm = _hamiltonian(h)
    psi0 = state_vector(psi0)
    if psi0.size != hm.dim:
        raise DimensionError(f"state of dim {psi0.size} for Hamiltonian of dim {hm.dim}")
    psi = _rk4(_schrodinger_rhs(hm, hbar), psi0, t_end, dt)
    norm = np.linalg.norm(psi)
    psi = psi / norm
    return (psi, abs(norm - 1.0)) if return_drift else psi


def integrate_von_neumann(h, rho0, t_end: float, dt: float = DT, hbar: float = 1.0) -> np.ndarray:
    """Integrate ``i hbar drho/dt = [H(t), rho]`` from 0 to ``t_end``.

    The output is returned as integrated; its trace and self-adjointness
    drift by the integration error only.
    """
    hm = _hamiltonian(h)
    rho0 = density_matrix(rho0)
    if rho0.shape[0] != hm.dim:
        raise DimensionError(f"density matrix of dim {rho0.shape[0]} for Hamiltonian of dim {hm.dim}")
    return _rk4(_von_neumann_rhs(hm, hbar), rho0, t_end, dt)


def _observable_at(a, t):
    if isinstance(a, Beable):
        return a.matrix
    if callable(a):
        a = a(t)
    a = np.asarray(a)
    if a.ndim == 1:
        return np.diag(a).astype(complex)
    return as_cmatrix(a, square=True)


def _time_derivative(a, t, h_step, n):
    if not callable(a) or isinstance(a, Beable):
        return np.zeros((n, n), dtype=complex)
    return (_observable_at(a, t + h_step) - _observable_at(a, t - h_step)) / (2 * h_step)


def _density_at(hm, rho0, t, hbar, dt):
    if t == 0:
        return rho0
    if hm.is_constant:
        u = _expm_hermitian(hm.matrix, t, hbar)
        return u @ rho0 @ dagger(u)
    if t < 0:
        raise ValueError("time-dependent Hamiltonians are integrated forward from 0 only")
    return integrate_von_neumann(hm, rho0, t, min(dt, t), hbar)


def check_ehrenfest(h, a, rho0, t: float, h_step: float = FD_STEP, hbar: float = 1.0, dt: float = DT) -> Residual:
    """Compare ``d<A>/dt`` with ``<(i/hbar)[H, A]> + <dA/dt>`` at time ``t``.

    ``a`` is a :class:`Beable`, a constant observable, or a callable giving
    the beable values (or matrix) at time ``t``.  The left side is a central
    difference of ``<A>`` along the von Neumann flow.
    """
    if h_step <= 0:
        raise ValueError("h_step must be positive")
    hm = _hamiltonian(h)
    rho0 = density_matrix(rho0)
    rho_t = _density_at(hm, rho0, t, hbar, dt)
    flow = _von_neumann_rhs(hm, hbar)
    rho_plus = _rk4_step(flow, rho_t, t, h_step)
    rho_minus = _rk4_step(flow, rho_t, t, -h_step)
    lhs = (
        np.trace(_observable_at(a, t + h_step) @ rho_plus) - np.trace(_observable_at(a, t - h_step) @ rho_minus)
    ).real / (2 * h_step)
    am = _observable_at(a, t)
    ht = hm(t)
    rate = (1j / hbar) * (ht @ am - am @ ht) + _time_derivative(a, t, h_step, hm.dim)
    rhs = np.trace(rate @ rho_t).real
    return Residual(float(abs(lhs - rhs)), float(lhs), float(rhs))


def check_heisenberg_eom(h, a, fam: UnitaryFamily, t: float, h_step: float = FD_STEP) -> Residual:
    """Compare ``dA^H/dt`` with ``(i/hbar)[H^H, A^H] + (dA/dt)^H`` at time ``t``.

    The residual is the spectral norm of the difference.
    """
    if h_step <= 0:
        raise ValueError("h_step must be positive")
    hm = _hamiltonian(h)

    def heis(s):
        u = fam(s)
        return dagger(u) @ _observable_at(a, s) @ u

    lhs = (heis(t + h_step) - heis(t - h_step)) / (2 * h_step)
    u = fam(t)
    ud = dagger(u)
    hh = ud @ hm(t) @ u
    ah = heis(t)
    rhs = (1j / fam.hbar) * (hh @ ah - ah @ hh) + ud @ _time_derivative(a, t, h_step, fam.dim) @ u
    return Residual(float(np.linalg.norm(lhs - rhs, 2)), lhs, rhs)


def phase_distance(psi1, psi2) -> float:
    """``1 - |<psi1, psi2>|``: zero iff the unit vectors agree up to a global phase."""
    return float(1.0 - abs(np.vdot(psi1, psi2)))
