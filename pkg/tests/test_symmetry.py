import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from unistoch.core import HADAMARD, PAULI_X, PAULI_Z, ValidationError
from unistoch.dynamics import family_from_constant_h, identity_family
from unistoch.randmat import random_density, random_unitary
from unistoch.symmetry import (
    Classification,
    SymmetryCandidate,
    check_antiunitary_form,
    check_dynamical_symmetry,
    check_wigner,
    involution_generator,
    noether_check,
)

from conftest import sigma_x_evolution

seeds = st.integers(0, 2**32 - 1)


def test_candidate_must_be_unitary():
    with pytest.raises(ValidationError):
        SymmetryCandidate(np.ones((2, 2)))
    with pytest.raises(ValueError):
        SymmetryCandidate(np.eye(2), kind_hint="sideways")


def test_identity_is_unitary_symmetry(rng):
    v = check_dynamical_symmetry(np.eye(3), random_unitary(3, rng))
    assert v.holds and v.classification is Classification.UNITARY


@pytest.mark.parametrize("t", [0.3, 1.1, 2.0])
def test_sigma_x_and_sigma_z_on_sigma_x_flow(t):
    th = sigma_x_evolution(t)
    unitary = check_dynamical_symmetry(PAULI_X, th)
    assert unitary.holds and unitary.classification is Classification.UNITARY
    np.testing.assert_allclose(unitary.recovered_phases, 0.0, atol=1e-12)
    anti = check_dynamical_symmetry(PAULI_Z, th)
    assert anti.holds and anti.classification is Classification.ANTI_UNITARY
    np.testing.assert_allclose(PAULI_Z @ th @ PAULI_Z, np.conj(th), atol=1e-15)


def test_phase_general_symmetry():
    # diagonal V only rephases entries: V Theta V^ = Theta * exp(i(a_i - a_j))
    v = np.diag(np.exp(1j * np.array([0.0, 0.5, 2.0])))
    th = random_unitary(3, np.random.default_rng(11))
    out = check_dynamical_symmetry(v, th)
    assert out.holds and out.classification is Classification.PHASE_GENERAL
    expected = np.angle((v @ th @ v.conj().T) / th)
    np.testing.assert_allclose(out.recovered_phases, expected, atol=1e-12)


def test_recovered_phases_nan_where_theta_vanishes():
    out = check_dynamical_symmetry(np.eye(2), np.eye(2))
    assert np.isnan(out.recovered_phases[0, 1])
    assert out.to_dict()["recovered_phases"][0][1] is None


def test_non_symmetry(rng):
    out = check_dynamical_symmetry(HADAMARD, sigma_x_evolution(0.4))
    assert not out.holds
    assert out.classification is Classification.NONE
    assert out.max_violation > 1e-3


def test_antiunitary_form_examples():
    real = np.array([[0.6, 0.8], [0.8, -0.6]])
    assert check_antiunitary_form(np.eye(2), real)
    assert check_antiunitary_form(np.conj(PAULI_Z), sigma_x_evolution(0.7))
    assert not check_antiunitary_form(np.eye(2), np.diag(np.exp(1j * np.array([0.4, 1.3]))))


def test_wigner_examples():
    th = sigma_x_evolution(0.9)
    assert check_wigner(np.exp(0.6j) * np.eye(2), th).holds
    assert check_wigner(PAULI_X, th, trials=32, seed=3).holds


def test_wigner_rejects_phase_general_symmetry():
    th = random_unitary(3, np.random.default_rng(11))
    v = np.diag(np.exp(1j * np.array([0.0, 0.5, 2.0])))
    assert check_dynamical_symmetry(v, th).holds
    out = check_wigner(v, th, trials=32, seed=1)
    assert not out.holds
    assert out.counterexample_basis is not None
    assert out.max_violation > 1e-10


def test_wigner_is_seed_deterministic():
    th = random_unitary(3, np.random.default_rng(11))
    v = np.diag(np.exp(1j * np.array([0.0, 0.5, 2.0])))
    a = check_wigner(v, th, seed=5)
    b = check_wigner(v, th, seed=np.random.default_rng(5))
    np.testing.assert_array_equal(a.counterexample_basis, b.counterexample_basis)


def test_noether_examples():
    fam = family_from_constant_h(PAULI_X)
    rho0 = random_density(2, np.random.default_rng(0))
    times = np.linspace(0, 5, 100)
    assert noether_check(np.eye(2), fam, rho0, times).max_drift <= 1e-12
    rep = noether_check(PAULI_X, fam, rho0, times)
    assert rep.commutes and rep.max_drift <= 1e-9
    rep = noether_check(PAULI_Z, fam, np.diag([1.0, 0.0]), times)
    assert not rep.commutes
    np.testing.assert_allclose(rep.expectations, np.cos(2 * times), atol=1e-12)


@given(seeds)
def test_noether_for_functions_of_h(seed):
    r = np.random.default_rng(seed)
    u = random_unitary(3, r)
    h = u @ np.diag(r.standard_normal(3)) @ u.conj().T
    g = u @ np.diag(r.standard_normal(3)) @ u.conj().T
    rep = noether_check(g, family_from_constant_h(h), random_density(3, r), np.linspace(0, 5, 20))
    assert rep.commutes and rep.max_drift <= 1e-9


def test_involution_generator_examples():
    np.testing.assert_array_equal(involution_generator(PAULI_X), PAULI_X)
    np.testing.assert_array_equal(involution_generator(np.eye(2)), np.eye(2))
    np.testing.assert_allclose(involution_generator(HADAMARD), HADAMARD)
    with pytest.raises(ValidationError):
        involution_generator(np.diag([1, 1j]))


def test_involution_generates_conserved_quantity():
    fam = family_from_constant_h(PAULI_X)
    g = involution_generator(PAULI_X)
    rep = noether_check(g, fam, np.diag([1.0, 0.0]), [0.5, 1.5])
    assert rep.max_drift <= 1e-12
    assert noether_check(np.eye(2), identity_family(2), np.eye(2) / 2, [1.0]).max_drift == 0.0
