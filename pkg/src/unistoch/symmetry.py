"""Dynamical symmetries of an evolution operator.

A unitary ``V`` is a dynamical symmetry of ``Theta`` when ``V Theta V^†``
has the same entrywise moduli as ``Theta``, i.e. the two differ only by
entrywise phases.  Unitary and anti-unitary symmetries are the special
cases where those phases vanish or amount to complex conjugation.
"""
import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import Check, ValidationError, _tol, as_cmatrix, dagger, is_self_adjoint, is_unitary
from .correspondence import density_matrix

__all__ = [
    "Classification",
    "SymmetryCandidate",
    "SymmetryVerdict",
    "WignerVerdict",
    "NoetherReport",
    "check_dynamical_symmetry",
    "check_antiunitary_form",
    "check_wigner",
    "noether_check",
    "involution_generator",
]


class Classification(enum.Enum):
    UNITARY = "Unitary"
    ANTI_UNITARY = "AntiUnitary"
    PHASE_GENERAL = "PhaseGeneral"
    NONE = "None"


@dataclass(frozen=True, eq=False)
class SymmetryCandidate:
    """Unitary ``V`` proposed as a symmetry; ``kind_hint`` is informational."""

    v: np.ndarray
    kind_hint: str = "unknown"
    tol: float | None = field(default=None, repr=False)

    def __post_init__(self):
        v = as_cmatrix(self.v, square=True).copy()
        check = is_unitary(v, self.tol)
        if not check:
            raise ValidationError(f"symmetry candidate is not unitary (deviation {check.deviation:.3e})")
        if self.kind_hint not in ("unitary", "anti_unitary", "unknown"):
            raise ValueError(f"unknown kind_hint {self.kind_hint!r}")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @property
    def dim(self) -> int:
        return self.v.shape[0]


def _v(candidate) -> np.ndarray:
    return candidate.v if isinstance(candidate, SymmetryCandidate) else SymmetryCandidate(candidate).v


@dataclass(frozen=True, eq=False)
class SymmetryVerdict:
    """Result of :func:`check_dynamical_symmetry`.

    ``recovered_phases[i, j]`` is ``arg(VThetaV^†)_ij - arg(Theta_ij)`` in
    ``(-pi, pi]``; entries where ``Theta`` vanishes are NaN (unconstrained).
    """

    holds: bool
    classification: Classification
    recovered_phases: np.ndarray | None
    max_violation: float

    def to_dict(self) -> dict:
        phases = None
        if self.recovered_phases is not None:
            phases = [[None if np.isnan(x) else float(x) for x in row] for row in self.recovered_phases]
        return {
            "holds": self.holds,
            "classification": self.classification.value,
            "recovered_phases": phases,
            "max_violation": self.max_violation,
        }


def check_dynamical_symmetry(v, theta, tol=None) -> SymmetryVerdict:
    """Test ``|(V Theta V^†)_ij|^2 = |Theta_ij|^2`` and classify the symmetry."""
    tol = _tol(tol)
    vm = _v(v)
    th = as_cmatrix(np.asarray(theta), square=True)
    moved = vm @ th @ dagger(vm)
    violation = float(np.max(np.abs(np.abs(moved) ** 2 - np.abs(th) ** 2)))
    if violation > tol:
        return SymmetryVerdict(False, Classification.NONE, None, violation)
    phases = np.full(th.shape, np.nan)
    mask = np.abs(th) > tol
    phases[mask] = np.angle(moved[mask] / th[mask])
    if np.max(np.abs(moved - th)) <= tol:
        kind = Classification.UNITARY
    elif np.max(np.abs(moved - np.conj(th))) <= tol:
        kind = Classification.ANTI_UNITARY
    else:
        kind = Classification.PHASE_GENERAL
    return SymmetryVerdict(True, kind, phases, violation)


def check_antiunitary_form(v, theta, tol=None) -> Check:
    """Test ``V K Theta K V^† = Theta``, i.e. ``V conj(Theta) V^† = Theta``.

    If ``V Theta V^† = conj(Theta)`` then this form holds for ``conj(V)``.
    """
    vm = _v(v)
    th = as_cmatrix(np.asarray(theta), square=True)
    dev = float(np.max(np.abs(vm @ np.conj(th) @ dagger(vm) - th)))
    return Check(dev <= _tol(tol), dev)


class WignerVerdict(NamedTuple):
    holds: bool
    trials_passed: int
    max_violation: float
    counterexample_basis: np.ndarray | None


def _random_basis(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, _ = np.linalg.qr(z)
    return q


def check_wigner(v, theta, trials: int = 64, seed=0, tol=None) -> WignerVerdict:
    """Check the modulus condition in ``trials`` random orthonormal bases.

    Each basis comes from orthonormalizing a complex Gaussian matrix drawn
    from ``numpy.random.default_rng(seed)``; ``seed`` may also be a
    :class:`numpy.random.Generator`.  Sampling stops at the first basis
    that violates the condition, which is returned as the counterexample.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    tol = _tol(tol)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    vm = _v(v)
    th = as_cmatrix(np.asarray(theta), square=True)
    moved = vm @ th @ dagger(vm)
    worst = 0.0
    for k in range(trials):
        b = _random_basis(th.shape[0], rng)
        bd = dagger(b)
        dev = float(np.max(np.abs(np.abs(bd @ moved @ b) ** 2 - np.abs(bd @ th @ b) ** 2)))
        worst = max(worst, dev)
        if dev > tol:
            return WignerVerdict(False, k, worst, b)
    return WignerVerdict(True, trials, worst, None)


class NoetherReport(NamedTuple):
    max_drift: float
    commutes: bool
    max_commutator: float
    expectations: np.ndarray


def noether_check(g, fam, rho0, times, tol=None) -> NoetherReport:
    """Drift of ``<G(t)> = tr(G U rho(0) U^†)`` over ``times``.

    Conservation is only expected when ``[G, U(t)] = 0`` at every sampled
    time; whether that precondition holds is reported in ``commutes``.
    """
    gm = as_cmatrix(g, square=True)
    check = is_self_adjoint(gm, tol)
    if not check:
        raise ValidationError(f"generator is not self-adjoint (deviation {check.deviation:.3e})")
    rho0 = density_matrix(rho0, tol)
    g0 = np.trace(gm @ rho0).real
    values, comm = [], 0.0
    for t in times:
        u = fam(t)
        comm = max(comm, float(np.max(np.abs(gm @ u - u @ gm))))
        values.append(np.trace(gm @ u @ rho0 @ dagger(u)).real)
    values = np.asarray(values)
    drift = float(np.max(np.abs(values - g0))) if values.size else 0.0
    return NoetherReport(drift, comm <= _tol(tol), comm, values)


def involution_generator(v, tol=None) -> np.ndarray:
    """Return an involutive symmetry ``V`` (``V^2 = I``) as its own self-adjoint generator."""
    vm = _v(v)
    dev = float(np.max(np.abs(vm @ vm - np.eye(vm.shape[0]))))
    if dev > _tol(tol):
        raise ValidationError(f"V is not an involution (|V^2 - I| = {dev:.3e})")
    return vm.copy()
