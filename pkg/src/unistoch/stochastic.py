"""Transition matrices, propagation, Markov chains and divisibility tests."""
import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple

import numpy as np

from .core import (
    DimensionError,
    SingularMatrixError,
    ValidationError,
    _tol,
    as_rmatrix,
)

__all__ = [
    "MIN_SINGULAR_VALUE",
    "prob_vector",
    "stochastic_violation",
    "is_stochastic",
    "TransitionMatrix",
    "Process",
    "DivisibilityReport",
    "propagate",
    "markov_power",
    "candidate_intermediate",
    "is_divisible_at",
    "InverseClass",
    "InverseClassification",
    "is_permutation",
    "stochastic_inverse_classify",
    "expectation",
    "pauli_x_gamma",
]

# candidate_intermediate refuses to invert below this smallest singular value
MIN_SINGULAR_VALUE = 1e-8


def prob_vector(p, tol=None) -> np.ndarray:
    """Validate and return a probability vector as a float array."""
    arr = np.asarray(p)
    if np.iscomplexobj(arr):
        if np.any(arr.imag != 0):
            raise ValidationError("probabilities must be real")
        arr = arr.real
    arr = np.asarray(arr, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise DimensionError(f"probability vector must be 1-D and non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("probability vector contains NaN or Inf")
    tol = _tol(tol)
    if arr.min() < -tol or arr.max() > 1 + tol:
        raise ValidationError(f"probabilities outside [0, 1]: min {arr.min():.3e}, max {arr.max():.3e}")
    total = arr.sum()
    if abs(total - 1.0) > tol:
        raise ValidationError(f"probabilities sum to {total!r}, not 1")
    return arr


def stochastic_violation(m) -> tuple[float, float]:
    """Return ``(min_entry, max_column_sum_error)`` for a real square matrix."""
    m = np.asarray(m, dtype=float)
    return float(m.min()), float(np.max(np.abs(m.sum(axis=0) - 1.0)))


def is_stochastic(m, tol=None) -> bool:
    """Column-stochastic within tolerance: entries ``>= -tol``, column sums within ``tol`` of 1."""
    m = np.asarray(m)
    if np.iscomplexobj(m):
        if np.any(np.abs(m.imag) > _tol(tol)):
            return False
        m = m.real
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    lo, err = stochastic_violation(m)
    return lo >= -_tol(tol) and err <= _tol(tol)


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Column-stochastic matrix ``Gamma(t <- anchor_time)``.

    ``gamma[i, j]`` is the probability of configuration ``i`` at time ``t``
    conditioned on configuration ``j`` at the anchor.  When ``t`` equals the
    anchor the matrix must be the identity.  ``t=None`` leaves the target
    time unspecified.
    """

    gamma: np.ndarray
    t: float | None = None
    anchor_time: float = 0.0
    tol: float | None = field(default=None, repr=False)

    def __post_init__(self):
        g = as_rmatrix(self.gamma, square=True)
        tol = _tol(self.tol)
        lo, err = stochastic_violation(g)
        if lo < -tol or err > tol:
            raise ValidationError(
                f"not column stochastic: min entry {lo:.3e}, max column-sum error {err:.3e}"
            )
        if self.t is not None and self.t == self.anchor_time and np.max(np.abs(g - np.eye(g.shape[0]))) > tol:
            raise ValidationError("transition matrix at its own anchor time must be the identity")
        g = g.copy()
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)
        if self.t is not None:
            object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "anchor_time", float(self.anchor_time))

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.gamma, dtype=dtype)


def _gamma(x) -> np.ndarray:
    return x.gamma if isinstance(x, TransitionMatrix) else as_rmatrix(x, square=True)


@dataclass(frozen=True, eq=False)
class Process:
    """Sampled indivisible stochastic process.

    Stores transition matrices from a single division event (``anchor_time``)
    to an increasing list of target times, plus the initial distribution.
    Nothing is interpolated between samples.
    """

    samples: tuple
    initial: np.ndarray
    anchor_time: float = 0.0
    tol: float | None = field(default=None, repr=False)

    def __post_init__(self):
        samples = tuple(self.samples)
        if not samples:
            raise ValidationError("a process needs at least one sample")
        initial = prob_vector(self.initial, self.tol).copy()
        initial.setflags(write=False)
        dim = initial.size
        for s in samples:
            if not isinstance(s, TransitionMatrix) or s.t is None:
                raise TypeError("process samples must be TransitionMatrix instances with a target time")
        times = [s.t for s in samples]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValidationError(f"sample times must be strictly increasing, got {times}")
        for s in samples:
            if s.dim != dim:
                raise DimensionError(f"sample at t={s.t} has dim {s.dim}, expected {dim}")
            if s.anchor_time != self.anchor_time:
                raise ValidationError(
                    f"sample at t={s.t} is anchored at {s.anchor_time}, not {self.anchor_time}"
                )
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "initial", initial)

    @classmethod
    def from_family(
        cls,
        family: Callable[[float], np.ndarray],
        times: Iterable[float],
        initial,
        anchor_time: float = 0.0,
        tol=None,
    ) -> "Process":
        """Sample ``family(t)`` at each time to build a process."""
        samples = tuple(
            TransitionMatrix(family(t), t=t, anchor_time=anchor_time, tol=tol) for t in times
        )
        return cls(samples, initial, anchor_time, tol)

    @property
    def dim(self) -> int:
        return self.initial.size

    @property
    def times(self) -> list[float]:
        return [s.t for s in self.samples]

    def at(self, t: float, atol: float = 1e-12) -> TransitionMatrix:
        """Sample at time ``t``; raises ``KeyError`` if there is none."""
        for s in self.samples:
            if abs(s.t - t) <= atol:
                return s
        raise KeyError(f"process has no sample at t={t} (available: {self.times})")

    def distribution(self, t: float) -> np.ndarray:
        return propagate(self.at(t), self.initial)


@dataclass(frozen=True, eq=False)
class DivisibilityReport:
    """Outcome of the inverse construction ``Gamma(t) Gamma(t')^-1``."""

    split_time: float
    target_time: float
    candidate: np.ndarray
    is_stochastic: bool
    min_entry: float
    max_column_sum_error: float
    reconstruction_error: float
    smallest_singular_value: float

    def to_dict(self) -> dict:
        return {
            "split_time": None if np.isnan(self.split_time) else self.split_time,
            "target_time": None if np.isnan(self.target_time) else self.target_time,
            "candidate": self.candidate.tolist(),
            "is_stochastic": self.is_stochastic,
            "min_entry": self.min_entry,
            "max_column_sum_error": self.max_column_sum_error,
            "reconstruction_error": self.reconstruction_error,
            "smallest_singular_value": self.smallest_singular_value,
        }


def propagate(gamma, p0, tol=None) -> np.ndarray:
    """Law of total probability, ``p(t) = Gamma p(0)``."""
    g = _gamma(gamma)
    p0 = prob_vector(p0, tol)
    if g.shape[1] != p0.size:
        raise DimensionError(f"transition matrix of dim {g.shape[1]} cannot act on {p0.size} probabilities")
    return prob_vector(g @ p0, tol)


def markov_power(gamma, n: int, tol=None) -> np.ndarray:
    """``n``-step transition matrix of a homogeneous Markov chain."""
    g = _gamma(gamma)
    if n < 0:
        raise ValueError("power must be non-negative")
    if not is_stochastic(g, tol):
        lo, err = stochastic_violation(g)
        raise ValidationError(f"not column stochastic: min entry {lo:.3e}, column-sum error {err:.3e}")
    return np.linalg.matrix_power(g, n)


def candidate_intermediate(gamma_t, gamma_tp, tol=None) -> DivisibilityReport:
    """Build ``Gamma~(t <- t') = Gamma(t <- t0) Gamma(t' <- t0)^-1`` and test it.

    Parameters
    ----------
    gamma_t, gamma_tp : TransitionMatrix or array_like
        Transition matrices to the later target ``t`` and to the split
        time ``t'``, sharing one anchor.

    Raises
    ------
    SingularMatrixError
        If the smallest singular value of ``Gamma(t')`` is below
        :data:`MIN_SINGULAR_VALUE`.
    """
    tol = _tol(tol)
    if isinstance(gamma_t, TransitionMatrix) and isinstance(gamma_tp, TransitionMatrix):
        if gamma_t.anchor_time != gamma_tp.anchor_time:
            raise ValidationError("transition matrices have different anchor times")
    g_t, g_tp = _gamma(gamma_t), _gamma(gamma_tp)
    if g_t.shape != g_tp.shape:
        raise DimensionError(f"shape mismatch {g_t.shape} vs {g_tp.shape}")
    smin = float(np.linalg.svd(g_tp, compute_uv=False)[-1])
    if smin < MIN_SINGULAR_VALUE:
        raise SingularMatrixError(
            f"Gamma(t') is singular: smallest singular value {smin:.3e} < {MIN_SINGULAR_VALUE:.0e}"
        )
    cand = np.linalg.solve(g_tp.T, g_t.T).T
    lo, err = stochastic_violation(cand)
    recon = float(np.max(np.abs(cand @ g_tp - g_t)))
    return DivisibilityReport(
        split_time=_time_of(gamma_tp),
        target_time=_time_of(gamma_t),
        candidate=cand,
        is_stochastic=bool(lo >= -tol and err <= tol),
        min_entry=lo,
        max_column_sum_error=err,
        reconstruction_error=recon,
        smallest_singular_value=smin,
    )


def _time_of(x) -> float:
    t = getattr(x, "t", None)
    return float("nan") if t is None else float(t)


def is_divisible_at(proc: Process, t: float, t_prime: float, tol=None) -> DivisibilityReport:
    """Divisibility test of ``proc`` at target ``t`` split at ``t_prime``."""
    return candidate_intermediate(proc.at(t), proc.at(t_prime), tol)


class InverseClass(enum.Enum):
    PERMUTATION_BOTH_STOCHASTIC = "PermutationBothStochastic"
    INVERSE_PSEUDO_STOCHASTIC = "InversePseudoStochastic"


class InverseClassification(NamedTuple):
    kind: InverseClass
    inverse: np.ndarray
    min_entry: float
    max_column_sum_error: float


def is_permutation(m, tol=None) -> bool:
    """True when ``m`` is a 0/1 matrix with exactly one 1 per row and column."""
    m = np.asarray(m, dtype=float)
    tol = _tol(tol)
    ones = np.abs(m - 1.0) <= tol
    zeros = np.abs(m) <= tol
    return bool(
        np.all(ones | zeros)
        and np.all(ones.sum(axis=0) == 1)
        and np.all(ones.sum(axis=1) == 1)
    )


def stochastic_inverse_classify(gamma, tol=None) -> InverseClassification:
    """Classify the inverse of an invertible stochastic matrix.

    Only permutation matrices have stochastic inverses; every other
    invertible stochastic matrix has a pseudo-stochastic inverse (columns
    summing to one, some entry negative).
    """
    g = _gamma(gamma)
    if not is_stochastic(g, tol):
        raise ValidationError("input is not column stochastic")
    smin = float(np.linalg.svd(g, compute_uv=False)[-1])
    if smin < MIN_SINGULAR_VALUE:
        raise SingularMatrixError(f"matrix is singular: smallest singular value {smin:.3e}")
    inv = np.linalg.inv(g)
    lo, err = stochastic_violation(inv)
    if is_permutation(g, tol):
        return InverseClassification(InverseClass.PERMUTATION_BOTH_STOCHASTIC, np.round(inv), lo, err)
    return InverseClassification(InverseClass.INVERSE_PSEUDO_STOCHASTIC, inv, lo, err)


def expectation(values, p, tol=None) -> float:
    """Probability-weighted sum ``sum_i a_i p_i``."""
    a = np.asarray(values, dtype=float)
    p = prob_vector(p, tol)
    if a.shape != p.shape:
        raise DimensionError(f"{a.size} values for {p.size} probabilities")
    return float(a @ p)


def pauli_x_gamma(t: float) -> np.ndarray:
    """Unistochastic family ``[[cos^2 t, sin^2 t], [sin^2 t, cos^2 t]]`` of ``exp(-i sigma_x t)``."""
    c, s = np.cos(t) ** 2, np.sin(t) ** 2
    return np.array([[c, s], [s, c]])
