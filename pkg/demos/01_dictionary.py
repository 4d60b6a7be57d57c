"""From an evolution operator to transition probabilities and back.

Run with ``python demos/01_dictionary.py``.
"""
import numpy as np

from unistoch import (
    HADAMARD,
    born_probabilities,
    configuration_pvm,
    dictionary_gamma,
    evolve_density,
    gamma_from_theta,
    initial_density,
    theta_from_gamma,
)
from unistoch.randmat import random_evolution
from unistoch.stochastic import propagate

np.set_printoptions(precision=4, suppress=True)
rng = np.random.default_rng(0)

# Hadamard spreads each configuration evenly over both targets.
print("Gamma for the Hadamard matrix:\n", gamma_from_theta(HADAMARD).gamma)

# Theta need not be unitary: unit-norm columns are enough for a valid Gamma.
theta = random_evolution(4, rng)
gamma = gamma_from_theta(theta).gamma
print("\nColumn sums of Gamma for a random non-unitary Theta:", gamma.sum(axis=0))

# The projector trace formula gives the same matrix.
print("Trace formula agrees:", np.allclose(dictionary_gamma(theta, configuration_pvm(4)), gamma))

# Evolving a diagonal density matrix and reading off the Born probabilities
# reproduces the law of total probability.
p0 = np.array([0.1, 0.2, 0.3, 0.4])
rho_t = evolve_density(initial_density(p0), theta)
print("\nBorn probabilities: ", born_probabilities(rho_t, configuration_pvm(4)))
print("Gamma @ p0:         ", propagate(gamma, p0))

# Going the other way needs a choice of phases; any choice gives back Gamma.
back = theta_from_gamma(gamma, rng.uniform(-np.pi, np.pi, (4, 4)))
print("\nRound trip through random phases recovers Gamma:", np.allclose(gamma_from_theta(back).gamma, gamma))
