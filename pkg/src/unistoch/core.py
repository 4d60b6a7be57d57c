"""Dense matrix foundation shared by every other module.

Matrices are plain :class:`numpy.ndarray` objects.  Complex data uses
``complex128`` and real data ``float64``; nothing here is sparse.

Tensor layout
-------------
Every composite index follows one convention: the system index is major and
the internal index is minor, so entry ``(a, g)`` of an ``n*d`` dimensional
space lives at flat position ``a*d + g``.  This is the layout produced by
:func:`numpy.kron` and it is the layout every dilation routine assumes.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "TOL_ALG",
    "TOL_INT",
    "Tolerance",
    "DEFAULT_TOLERANCE",
    "UnistochError",
    "DimensionError",
    "ValidationError",
    "SingularMatrixError",
    "Check",
    "as_cmatrix",
    "as_rmatrix",
    "dagger",
    "schur_hadamard",
    "tensor",
    "partial_trace_internal",
    "is_unitary",
    "is_self_adjoint",
    "is_psd",
    "is_projector",
    "PVM",
    "configuration_pvm",
    "pvm_from_unitary",
    "Basis",
    "configuration_basis",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "HADAMARD",
]

TOL_ALG = 1e-10
TOL_INT = 1e-6


@dataclass(frozen=True)
class Tolerance:
    """Pair of tolerances: ``alg`` for algebraic identities, ``int`` for ODE comparisons."""

    alg: float = TOL_ALG
    int: float = TOL_INT

    def __post_init__(self):
        for name in ("alg", "int"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"tolerance {name}={value!r} must lie in (0, 1)")


DEFAULT_TOLERANCE = Tolerance()


class UnistochError(Exception):
    """Base class for all errors raised by the package."""


class DimensionError(UnistochError, ValueError):
    """Shapes are incompatible with the requested operation."""


class ValidationError(UnistochError, ValueError):
    """An object fails the invariants of its type."""


class SingularMatrixError(UnistochError, np.linalg.LinAlgError):
    """A matrix that must be inverted is numerically singular."""


class Check(NamedTuple):
    """Verdict of a validation predicate together with its largest deviation."""

    ok: bool
    deviation: float

    def __bool__(self):
        return self.ok


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

for _m in (PAULI_X, PAULI_Y, PAULI_Z, HADAMARD):
    _m.setflags(write=False)


def _tol(tol):
    return DEFAULT_TOLERANCE.alg if tol is None else float(tol)


def _check_finite(m):
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix contains NaN or Inf entries")


def as_cmatrix(m, *, square=False) -> np.ndarray:
    """Coerce ``m`` to a finite two-dimensional ``complex128`` array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    _check_finite(arr)
    return arr


def as_rmatrix(m, *, square=False) -> np.ndarray:
    """Coerce ``m`` to a finite two-dimensional ``float64`` array.

    Complex input is accepted only when its imaginary part is exactly zero.
    """
    arr = np.asarray(m)
    if np.iscomplexobj(arr):
        if np.any(arr.imag != 0):
            raise ValidationError("real matrix expected, got complex entries")
        arr = arr.real
    arr = np.asarray(arr, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    _check_finite(arr)
    return arr


def dagger(m) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.asarray(m)).T


def schur_hadamard(x, y) -> np.ndarray:
    """Entrywise product ``(x ⊙ y)[i, j] = x[i, j] * y[i, j]``."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise DimensionError(f"Schur-Hadamard product needs equal shapes, got {x.shape} and {y.shape}")
    return x * y


def tensor(a, b) -> np.ndarray:
    """Kronecker product in the system-major layout.

    ``tensor(a, b)[a1*q + b1, a2*s + b2] == a[a1, a2] * b[b1, b2]`` where
    ``b`` has shape ``(q, s)``.
    """
    return np.kron(np.asarray(a), np.asarray(b))


def partial_trace_internal(m, n: int, d: int) -> np.ndarray:
    """Trace out the internal (minor) factor of an ``(n*d) x (n*d)`` matrix.

    Returns the ``n x n`` matrix ``r[a, b] = sum_g m[a*d + g, b*d + g]``.
    """
    m = np.asarray(m)
    if n < 1 or d < 1:
        raise DimensionError("partial trace needs n >= 1 and d >= 1")
    if m.ndim != 2 or m.shape != (n * d, n * d):
        raise DimensionError(f"expected shape ({n * d}, {n * d}) for n={n}, d={d}; got {m.shape}")
    return np.trace(m.reshape(n, d, n, d), axis1=1, axis2=3)


def _square(m):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"square matrix required, got shape {m.shape}")
    return m


def is_unitary(m, tol=None) -> Check:
    """Check ``m^† m = I`` and ``m m^† = I`` entrywise."""
    m = _square(m)
    eye = np.eye(m.shape[0])
    dev = max(np.max(np.abs(dagger(m) @ m - eye)), np.max(np.abs(m @ dagger(m) - eye)))
    return Check(bool(dev <= _tol(tol)), float(dev))


def is_self_adjoint(m, tol=None) -> Check:
    m = _square(m)
    dev = float(np.max(np.abs(m - dagger(m))))
    return Check(dev <= _tol(tol), dev)


def is_psd(m, tol=None) -> Check:
    """Positive semidefiniteness of the Hermitian part.

    The deviation is the magnitude of the most negative eigenvalue (zero when
    none is negative), combined with any anti-Hermitian residue.
    """
    m = _square(m)
    herm = 0.5 * (m + dagger(m))
    skew = float(np.max(np.abs(m - herm)))
    lowest = float(np.linalg.eigvalsh(herm)[0])
    dev = max(skew, max(0.0, -lowest))
    return Check(dev <= _tol(tol), dev)


def is_projector(m, tol=None) -> Check:
    """Self-adjoint and idempotent."""
    m = _square(m)
    dev = max(float(np.max(np.abs(m - dagger(m)))), float(np.max(np.abs(m @ m - m))))
    return Check(dev <= _tol(tol), dev)


@dataclass(frozen=True, eq=False)
class PVM:
    """Complete family of mutually exclusive orthogonal projectors.

    Validated at construction, so an invalid PVM cannot exist.

    Parameters
    ----------
    projectors : sequence of array_like
        Square matrices of a common dimension.
    tol : float, optional
        Algebraic tolerance for the checks, default :data:`TOL_ALG`.
    """

    projectors: tuple
    tol: float = TOL_ALG

    def __post_init__(self):
        mats = tuple(as_cmatrix(p, square=True) for p in self.projectors)
        if not mats:
            raise DimensionError("a PVM needs at least one projector")
        n = mats[0].shape[0]
        if any(p.shape != (n, n) for p in mats):
            raise DimensionError("all projectors of a PVM must share one dimension")
        for p in mats:
            p.setflags(write=False)
        object.__setattr__(self, "projectors", mats)
        dev = self.max_violation()
        if dev > self.tol:
            raise ValidationError(f"projectors do not form a PVM (max violation {dev:.3e})")

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def __len__(self):
        return len(self.projectors)

    def __getitem__(self, i):
        return self.projectors[i]

    def __iter__(self):
        return iter(self.projectors)

    def max_violation(self) -> float:
        """Largest deviation from exclusivity, completeness, and projector-ness."""
        mats = self.projectors
        dev = float(np.max(np.abs(sum(mats) - np.eye(self.dim))))
        for i, p in enumerate(mats):
            dev = max(dev, is_projector(p).deviation)
            for q in mats[i + 1:]:
                dev = max(dev, float(np.max(np.abs(p @ q))))
        return dev


def configuration_pvm(n: int) -> PVM:
    """The ``n`` diagonal projectors ``P_i = e_i e_i^†``."""
    if n < 1:
        raise DimensionError("configuration PVM needs n >= 1")
    projectors = []
    for i in range(n):
        p = np.zeros((n, n), dtype=complex)
        p[i, i] = 1.0
        projectors.append(p)
    return PVM(tuple(projectors))


def pvm_from_unitary(v, base: PVM, tol=None) -> PVM:
    """Similarity-transformed PVM ``{V^† P_i V}``."""
    v = as_cmatrix(v, square=True)
    if v.shape[0] != base.dim:
        raise DimensionError(f"unitary of dim {v.shape[0]} does not match PVM dim {base.dim}")
    check = is_unitary(v, tol)
    if not check:
        raise ValidationError(f"similarity matrix is not unitary (deviation {check.deviation:.3e})")
    vd = dagger(v)
    return PVM(tuple(vd @ p @ v for p in base), tol=max(base.tol, _tol(tol)))


@dataclass(frozen=True, eq=False)
class Basis:
    """Orthonormal basis stored as the columns of a unitary matrix."""

    vectors: np.ndarray
    tol: float = TOL_ALG

    def __post_init__(self):
        v = as_cmatrix(self.vectors, square=True)
        check = is_unitary(v, self.tol)
        if not check:
            raise ValidationError(f"basis is not orthonormal (deviation {check.deviation:.3e})")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def __getitem__(self, i) -> np.ndarray:
        return self.vectors[:, i]

    def pvm(self) -> PVM:
        """Rank-one projectors ``e_i e_i^†`` onto the basis vectors."""
        return PVM(tuple(np.outer(self[i], np.conj(self[i])) for i in range(self.dim)), tol=self.tol)


def configuration_basis(n: int) -> Basis:
    if n < 1:
        raise DimensionError("configuration basis needs n >= 1")
    return Basis(np.eye(n, dtype=complex))


def _as_index(i, n, what="index"):
    if not 0 <= i < n:
        raise IndexError(f"{what} {i} out of range for dimension {n}")
    return int(i)


def max_abs(m) -> float:
    """Largest absolute entry, 0.0 for empty input."""
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0

