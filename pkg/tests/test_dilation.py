import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from unistoch.core import HADAMARD, PAULI_X, DimensionError, ValidationError, configuration_pvm, pvm_from_unitary
from unistoch.correspondence import gamma_from_theta, initial_density
from unistoch.dilation import (
    DilatedSystem,
    KrausSet,
    apply_conjugation_real,
    bit_flip_kraus,
    blockwise_gauge,
    dilate_trivial,
    evolve_density_kraus,
    factorization_error,
    gamma_from_kraus,
    get_block,
    is_orthogonal,
    kraus_from_theta,
    realify,
    reconstruct_gamma,
    stinespring_unitary,
)
from unistoch.gauge import sh_gauge
from unistoch.randmat import random_evolution, random_kraus, random_phases, random_unitary

seeds = st.integers(0, 2**32 - 1)
BIT_FLIP_GAMMA = np.array([[0.7, 0.3], [0.3, 0.7]])


def test_kraus_identity_validated():
    with pytest.raises(ValidationError):
        KrausSet((np.eye(2), np.eye(2)))
    with pytest.raises(DimensionError):
        KrausSet((np.eye(2), np.zeros((3, 3))))


def test_kraus_from_theta_examples():
    ks = kraus_from_theta(np.eye(3))
    for k, p in zip(ks, configuration_pvm(3)):
        np.testing.assert_array_equal(k, p)
    k0, k1 = kraus_from_theta(HADAMARD)
    np.testing.assert_allclose(k1[:, 1], HADAMARD[:, 1])
    np.testing.assert_array_equal(k1[:, 0], 0)


@given(seeds, st.integers(1, 8))
def test_kraus_identity_forced_and_gamma_matches(seed, n):
    th = random_evolution(n, np.random.default_rng(seed))
    ks = kraus_from_theta(th)
    assert ks.identity_violation() <= 1e-12
    assert np.max(np.abs(gamma_from_kraus(ks).gamma - gamma_from_theta(th).gamma)) <= 1e-10


def test_gamma_from_kraus_examples():
    np.testing.assert_array_equal(gamma_from_kraus(kraus_from_theta(np.eye(2))).gamma, np.eye(2))
    np.testing.assert_allclose(gamma_from_kraus(kraus_from_theta(HADAMARD)).gamma, np.full((2, 2), 0.5))
    np.testing.assert_allclose(gamma_from_kraus(bit_flip_kraus(0.3)).gamma, BIT_FLIP_GAMMA, atol=1e-15)


def test_evolve_density_kraus_examples():
    rho = initial_density([0.4, 0.6])
    np.testing.assert_allclose(evolve_density_kraus(rho, [np.eye(2)]), rho)
    out = evolve_density_kraus(np.diag([1.0, 0.0]), bit_flip_kraus(0.3))
    np.testing.assert_allclose(out, np.diag([0.7, 0.3]), atol=1e-15)
    assert np.trace(out @ out).real == pytest.approx(0.58)


def test_dilate_trivial_examples(rng):
    th = random_unitary(3, rng)
    g = gamma_from_theta(th).gamma
    np.testing.assert_allclose(reconstruct_gamma(dilate_trivial(th, 1)).gamma, g, atol=1e-12)
    a = reconstruct_gamma(dilate_trivial(th, 2, gamma_index=0)).gamma
    b = reconstruct_gamma(dilate_trivial(th, 2, gamma_index=1)).gamma
    np.testing.assert_allclose(a, b, atol=1e-12)
    np.testing.assert_allclose(reconstruct_gamma(dilate_trivial(HADAMARD, 3)).gamma, np.full((2, 2), 0.5), atol=1e-12)
    np.testing.assert_array_equal(reconstruct_gamma(dilate_trivial(np.eye(2), 2)).gamma, np.eye(2))


@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_dilation_identity_any_internal_pvm(seed, n, d):
    r = np.random.default_rng(seed)
    th = random_evolution(n, r)
    pvm = pvm_from_unitary(random_unitary(d, r), configuration_pvm(d))
    expected = gamma_from_theta(th).gamma
    for gi in range(d):
        got = reconstruct_gamma(dilate_trivial(th, d, pvm, gi)).gamma
        assert np.max(np.abs(got - expected)) <= 1e-10


def test_dilated_system_rejects_non_stochastic_reconstruction():
    ev = np.zeros((4, 4))
    ev[0, 0] = 1.0
    with pytest.raises(ValidationError, match="worst column"):
        DilatedSystem(2, 2, configuration_pvm(2), 0, ev)


def test_get_block_layout(rng):
    m = rng.standard_normal((6, 6))
    np.testing.assert_array_equal(get_block(m, 3, 2, 1, 2), m[2:4, 4:6])
    a = rng.standard_normal((3, 3))
    np.testing.assert_array_equal(get_block(np.kron(a, np.eye(2)), 3, 2, 2, 0), a[2, 0] * np.eye(2))


def test_blockwise_gauge_identity_blocks(rng):
    ds = dilate_trivial(random_unitary(2, rng), 3)
    out = blockwise_gauge(ds, lambda i, j: np.eye(3))
    np.testing.assert_array_equal(out.evolution, ds.evolution)


def test_blockwise_gauge_scalar_blocks_reduce_to_phases(rng):
    th = random_unitary(3, rng)
    phases = random_phases(3, rng)
    out = blockwise_gauge(dilate_trivial(th, 2), lambda i, j: np.exp(1j * phases[i, j]) * np.eye(2))
    np.testing.assert_allclose(out.evolution, np.kron(sh_gauge(th, phases).theta, np.eye(2)), atol=1e-12)


def test_blockwise_gauge_accepts_array(rng):
    ds = dilate_trivial(random_unitary(2, rng), 2)
    blocks = np.array([[random_unitary(2, rng) for _ in range(2)] for _ in range(2)])
    a = blockwise_gauge(ds, blocks)
    b = blockwise_gauge(ds, lambda i, j: blocks[i, j])
    np.testing.assert_array_equal(a.evolution, b.evolution)
    with pytest.raises(ValidationError):
        blockwise_gauge(ds, lambda i, j: 2 * np.eye(2))


@given(seeds, st.integers(2, 4), st.integers(2, 3))
def test_blockwise_gauge_invariance(seed, n, d):
    r = np.random.default_rng(seed)
    th = random_unitary(n, r)
    ds = dilate_trivial(th, d)
    out = blockwise_gauge(ds, lambda i, j: random_unitary(d, r))
    assert np.max(np.abs(reconstruct_gamma(out).gamma - gamma_from_theta(th).gamma)) <= 1e-10


def test_factorization_error(rng):
    a, b = random_unitary(3, rng), random_unitary(2, rng)
    assert factorization_error(np.kron(a, b), 3, 2) <= 1e-12
    ds = blockwise_gauge(dilate_trivial(a, 2), lambda i, j: random_unitary(2, rng))
    assert factorization_error(ds.evolution, 3, 2) > 1e-6


def test_stinespring_examples():
    ds = stinespring_unitary([np.eye(2)])
    np.testing.assert_allclose(ds.evolution, np.eye(2))
    ds = stinespring_unitary(bit_flip_kraus(0.3))
    assert ds.evolution.shape == (4, 4)
    np.testing.assert_allclose(ds.evolution.conj().T @ ds.evolution, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(reconstruct_gamma(ds).gamma, BIT_FLIP_GAMMA, atol=1e-12)


def test_stinespring_round_trip_from_unitary(rng):
    th = random_unitary(3, rng)
    ds = stinespring_unitary(kraus_from_theta(th), seed=4)
    np.testing.assert_allclose(reconstruct_gamma(ds).gamma, gamma_from_theta(th).gamma, atol=1e-10)


@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_stinespring_random(seed, n, k):
    r = np.random.default_rng(seed)
    ks = random_kraus(n, k, r)
    ds = stinespring_unitary(ks, seed=seed)
    u = ds.evolution
    assert np.max(np.abs(u.conj().T @ u - np.eye(n * k))) <= 1e-10
    assert np.max(np.abs(reconstruct_gamma(ds).gamma - gamma_from_kraus(ks).gamma)) <= 1e-10


def test_stinespring_is_deterministic_per_seed():
    ks = random_kraus(2, 3, np.random.default_rng(0))
    np.testing.assert_array_equal(stinespring_unitary(ks, 9).evolution, stinespring_unitary(ks, 9).evolution)


def test_dilated_to_dict():
    d = stinespring_unitary(bit_flip_kraus(0.3)).to_dict()
    assert (d["system_dim"], d["internal_dim"], d["gamma_index"]) == (2, 2, 0)
    assert len(d["evolution"]) == 4


def test_realify_examples():
    np.testing.assert_array_equal(realify(np.eye(3)), np.eye(6))
    np.testing.assert_array_equal(realify([[1j]]), [[0, -1], [1, 0]])
    assert is_orthogonal(realify(HADAMARD))


@given(seeds)
def test_realify_is_star_homomorphism(seed):
    r = np.random.default_rng(seed)
    a, b = (r.standard_normal((3, 3)) + 1j * r.standard_normal((3, 3)) for _ in range(2))
    assert np.max(np.abs(realify(a @ b) - realify(a) @ realify(b))) <= 1e-12
    assert np.max(np.abs(realify(a.conj().T) - realify(a).T)) <= 1e-12
    assert is_orthogonal(realify(random_unitary(3, r)), tol=1e-12)


def test_conjugation_examples(rng):
    m = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    r = realify(m)
    np.testing.assert_array_equal(apply_conjugation_real(apply_conjugation_real(r)), r)
    np.testing.assert_array_equal(apply_conjugation_real(realify([[1j]])), realify([[-1j]]))
    np.testing.assert_allclose(apply_conjugation_real(r), realify(np.conj(m)), atol=1e-15)
    with pytest.raises(DimensionError):
        apply_conjugation_real(np.eye(3))


def test_bit_flip_bounds():
    with pytest.raises(ValueError):
        bit_flip_kraus(1.5)
    assert not np.allclose(bit_flip_kraus(0.3).operators[1], 0)
    np.testing.assert_allclose(bit_flip_kraus(1.0).operators[1], PAULI_X)
