"""Embedding the system in a larger space without changing Gamma."""
import numpy as np

from unistoch import (
    bit_flip_kraus,
    blockwise_gauge,
    dilate_trivial,
    factorization_error,
    gamma_from_kraus,
    gamma_from_theta,
    realify,
    apply_conjugation_real,
    reconstruct_gamma,
    stinespring_unitary,
)
from unistoch.randmat import random_unitary

np.set_printoptions(precision=4, suppress=True)
rng = np.random.default_rng(3)

# A non-unitary channel becomes unitary on a doubled space.
ks = bit_flip_kraus(0.3)
ds = stinespring_unitary(ks)
print("Bit-flip Gamma:\n", gamma_from_kraus(ks).gamma)
print("Dilated unitary is", ds.evolution.shape, "and reconstructs\n", reconstruct_gamma(ds).gamma)

# Independent unitaries on every internal block: Gamma survives, the tensor
# product structure does not.
theta = random_unitary(3, rng)
ds = blockwise_gauge(dilate_trivial(theta, 2), lambda i, j: random_unitary(2, rng))
print("\nGamma unchanged:", np.allclose(reconstruct_gamma(ds).gamma, gamma_from_theta(theta).gamma))
print(f"Distance from the nearest tensor product: {factorization_error(ds.evolution, 3, 2):.3f}")

# Complex numbers as real 2x2 blocks; conjugation becomes a real similarity.
r = realify(theta)
print("\nRealified unitary is orthogonal:", np.allclose(r.T @ r, np.eye(6)))
print("Conjugation in the real picture matches:", np.allclose(apply_conjugation_real(r), realify(theta.conj())))
