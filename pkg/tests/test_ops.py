import numpy as np
import pytest

from qnnwitness.errors import DimensionMismatch, ImaginaryTraceError
from qnnwitness.ops import (
    OBSERVABLE_IDS,
    OBSERVABLES,
    SX,
    SZ,
    commutator,
    dagger,
    embed_pauli,
    expectation,
    is_hermitian,
    kron3,
)

RNG = np.random.default_rng(7)


def random_density(rng=RNG):
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def test_pauli_algebra():
    assert np.allclose(SX @ SX, np.eye(2))
    assert np.allclose(SZ @ SZ, np.eye(2))
    assert np.allclose(SX @ SZ + SZ @ SX, 0)


def test_embed_acts_on_named_qubit_only():
    # |000> flipped on B lands on |010>, index 2
    psi = np.zeros(8)
    psi[0] = 1.0
    flipped = embed_pauli("x", "B") @ psi
    assert flipped[2] == 1.0 and np.count_nonzero(flipped) == 1


def test_observables_are_parity_products():
    assert set(OBSERVABLE_IDS) == set(OBSERVABLES)
    zz = np.kron(SZ, SZ)
    assert np.allclose(OBSERVABLES["AB"], np.kron(zz, np.eye(2)))
    assert np.allclose(OBSERVABLES["BC"], np.kron(np.eye(2), zz))
    assert np.allclose(OBSERVABLES["ABC"], kron3(SZ, SZ, SZ))
    for obs in OBSERVABLES.values():
        assert is_hermitian(obs)
        assert np.allclose(obs @ obs, np.eye(8))


def test_expectation_is_real_diagonal_sum():
    rho = random_density()
    val = expectation(rho, OBSERVABLES["AB"])
    signs = np.array([1, 1, -1, -1, -1, -1, 1, 1])
    assert val == pytest.approx(float(np.sum(signs * np.diag(rho).real)))


def test_expectation_rejects_complex_trace():
    rho = random_density()
    rho[0, 0] += 1.0j  # imaginary population, so tr(rho P) leaves the real axis
    with pytest.raises(ImaginaryTraceError):
        expectation(rho, OBSERVABLES["AB"])


def test_commutator_of_commuting_operators_vanishes():
    assert np.allclose(commutator(OBSERVABLES["AB"], OBSERVABLES["BC"]), 0)


def test_commutator_dimension_check():
    with pytest.raises(DimensionMismatch):
        commutator(np.eye(4), np.eye(8))


def test_dagger_handles_batches():
    batch = RNG.normal(size=(5, 8, 8)) + 1j * RNG.normal(size=(5, 8, 8))
    out = dagger(batch)
    for i in range(5):
        assert np.array_equal(out[i], batch[i].conj().T)
