"""Hamiltonians, integrators and the equations of motion."""
import numpy as np

from unistoch import (
    PAULI_X,
    Beable,
    check_ehrenfest,
    check_heisenberg_eom,
    emergeable_rate,
    extract_hamiltonian,
    family_from_constant_h,
    integrate_schrodinger,
    integrate_von_neumann,
)

np.set_printoptions(precision=4, suppress=True)

fam = family_from_constant_h(PAULI_X)
print("H recovered from U(t) by finite differences:\n", extract_hamiltonian(fam, 0.8).real)

psi = integrate_schrodinger(PAULI_X, np.array([1.0, 0.0]), np.pi / 2)
print("\nRK4 state at t = pi/2:", psi)
rho = integrate_von_neumann(PAULI_X, np.diag([1.0, 0.0]), np.pi / 2)
print("RK4 density matrix at t = pi/2:\n", rho.real)

sigma_z = Beable([1.0, -1.0])
res = check_ehrenfest(PAULI_X, sigma_z, np.diag([1.0, 0.0]), np.pi / 4)
print(f"\nd<sigma_z>/dt at pi/4: finite difference {res.lhs:.6f}, commutator formula {res.rhs:.6f}")
res = check_heisenberg_eom(PAULI_X, sigma_z, fam, 0.5)
print(f"Heisenberg equation residual: {res.residual:.1e}")

# The rate of a beable is not itself diagonal: it is an emergeable.
print("\nRate of sigma_z under sigma_x (2 sigma_y):\n", emergeable_rate(sigma_z, fam))
