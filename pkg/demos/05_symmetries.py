"""Unitary, anti-unitary and phase-only dynamical symmetries."""
import numpy as np

from unistoch import PAULI_X, PAULI_Z, check_dynamical_symmetry, check_wigner, family_from_constant_h, noether_check
from unistoch.randmat import random_density, random_unitary

theta = family_from_constant_h(PAULI_X)(0.7)
for name, v in (("sigma_x", PAULI_X), ("sigma_z", PAULI_Z)):
    verdict = check_dynamical_symmetry(v, theta)
    print(f"{name}: holds={verdict.holds}, classification={verdict.classification.value}")

# A diagonal unitary only rephases entries, so it passes the modulus test in
# the configuration basis but fails in a generic basis.
v = np.diag(np.exp(1j * np.array([0.0, 0.5, 2.0])))
theta3 = random_unitary(3, np.random.default_rng(11))
print("\nDiagonal V:", check_dynamical_symmetry(v, theta3).classification.value)
w = check_wigner(v, theta3, trials=32, seed=1)
print(f"Survives basis changes? {w.holds} (failed after {w.trials_passed} good bases)")

rep = noether_check(PAULI_X, family_from_constant_h(PAULI_X), random_density(2, np.random.default_rng(2)), np.linspace(0, 10, 100))
print(f"\n<sigma_x> drift under its own flow: {rep.max_drift:.1e}")
rep = noether_check(PAULI_Z, family_from_constant_h(PAULI_X), np.diag([1.0, 0.0]), [0.0, np.pi / 4, np.pi / 2])
print("<sigma_z> along the flow (no commuting generator):", np.round(rep.expectations, 6))
