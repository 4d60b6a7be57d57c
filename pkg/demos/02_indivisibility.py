"""A unistochastic family with no stochastic intermediate.

Gamma(t) = [[cos^2 t, sin^2 t], [sin^2 t, cos^2 t]] comes from exp(-i sigma_x t).
Splitting the interval at t' and asking for the intermediate matrix that
would carry t' to t gives a matrix with a negative entry.
"""
import numpy as np

from unistoch import Process, is_divisible_at, pauli_x_gamma, stochastic_inverse_classify

np.set_printoptions(precision=5, suppress=True)

t, t_prime = np.pi / 3, 0.6
proc = Process.from_family(pauli_x_gamma, [t_prime, t], initial=[1.0, 0.0])
report = is_divisible_at(proc, t, t_prime)

print("Candidate intermediate:\n", report.candidate)
print("Stochastic?", report.is_stochastic)
print("Smallest entry:", round(report.min_entry, 5))
print("Closed form for the diagonal:", round((1 + np.cos(2 * t) / np.cos(2 * t_prime)) / 2, 5))

# Only permutation matrices have stochastic inverses.
for g in (np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([[0.75, 0.25], [0.25, 0.75]])):
    res = stochastic_inverse_classify(g)
    print(f"\n{g.tolist()} -> {res.kind.value}\ninverse:\n{res.inverse}")
