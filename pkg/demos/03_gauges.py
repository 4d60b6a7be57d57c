"""Two kinds of gauge freedom that leave every prediction unchanged."""
import numpy as np

from unistoch import Beable, FWTransform, family_from_constant_h, fw_gauge, fw_invariance, gamma_from_theta, is_unitary, sh_gauge, transform_hamiltonian
from unistoch.randmat import random_density, random_hermitian, random_phases, random_unitary

rng = np.random.default_rng(1)
n = 3

# Entrywise phases: Gamma is untouched, but unitarity is generally lost.
theta = random_unitary(n, rng)
moved = sh_gauge(theta, random_phases(n, rng))
print("Gamma unchanged by entrywise phases:", np.allclose(gamma_from_theta(moved).gamma, gamma_from_theta(theta).gamma))
print("Still unitary afterwards?", bool(is_unitary(moved.theta)))

# Time-dependent change of frame V(t) = exp(-iGt).
h = random_hermitian(n, rng, norm=2.0)
fam = family_from_constant_h(h)
t = 1.3
u = fam(t)
rho0 = random_density(n, rng)
rho_t = u @ rho0 @ u.conj().T
frame = FWTransform.from_generator(random_hermitian(n, rng))
devs = fw_invariance(u, rho_t, [Beable([1.0, 0.0, -1.0]), random_hermitian(n, rng)], frame, t)
print("\nLargest changes under a moving frame:", {k: f"{v:.1e}" for k, v in devs.items()})

# The Heisenberg frame V = U^† freezes the state and removes the Hamiltonian.
heis = FWTransform.adjoint_of(fam)
bundle = fw_gauge(u, rho_t, [], heis, t)
print("\nTheta in the Heisenberg frame is the identity:", np.allclose(bundle.theta, np.eye(n)))
print("State is back at its initial value:", np.allclose(bundle.rho, rho0))
print(f"Norm of the transformed Hamiltonian: {np.linalg.norm(transform_hamiltonian(h, heis, t), 2):.1e}")
