"""Random test objects drawn from a :class:`numpy.random.Generator`.

Every function takes the generator explicitly; nothing here touches global
random state.
"""
import numpy as np

from .core import dagger

__all__ = [
    "random_unitary",
    "random_hermitian",
    "random_stochastic",
    "random_evolution",
    "random_probabilities",
    "random_density",
    "random_state",
    "random_phases",
    "random_kraus",
]


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(n: int, rng: np.random.Generator, norm: float | None = None) -> np.ndarray:
    """Random self-adjoint matrix; rescaled to spectral norm ``norm`` if given."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = 0.5 * (z + dagger(z))
    if norm is not None:
        h *= norm / np.linalg.norm(h, 2)
    return h


def random_stochastic(n: int, rng: np.random.Generator) -> np.ndarray:
    """Column-stochastic matrix with Dirichlet(1, ..., 1) columns."""
    return rng.dirichlet(np.ones(n), size=n).T


def random_evolution(n: int, rng: np.random.Generator) -> np.ndarray:
    """Generic (non-unitary) matrix whose columns have unit Euclidean norm."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return z / np.linalg.norm(z, axis=0)


def random_probabilities(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.dirichlet(np.ones(n))


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix of the given rank (full rank by default)."""
    k = n if rank is None else rank
    z = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    rho = z @ dagger(z)
    return rho / np.trace(rho).real


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


def random_phases(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-np.pi, np.pi, size=(n, n))


def random_kraus(n: int, k: int, rng: np.random.Generator) -> list:
    """``k`` operators on ``C^n`` obeying the Kraus identity.

    Built by slicing the first ``n`` columns of a Haar unitary on ``C^(n*k)``.
    """
    u = random_unitary(n * k, rng)[:, :n]
    return [u[b * n:(b + 1) * n, :] for b in range(k)]
