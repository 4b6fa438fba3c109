import math

import numpy as np
import pytest

from holophase import oracles
from holophase.connection import horizontal_lift
from holophase.errors import TooManySequences
from holophase.evolution import builtin_neutron_I, propagate_constant, resample
from holophase.phases import arg
from holophase.spectral import Spectrum


def test_brute_transport_neutron_I(two_level):
    _, psi0 = two_level
    path = builtin_neutron_I(1.0, 0.9, math.pi, 2000)
    a = horizontal_lift(path, psi0)
    b = oracles.brute_transport(path, psi0, 100_000)
    assert np.abs(a.endpoint.matrix - b.endpoint.matrix).max() < 1e-5


def test_brute_transport_constant(two_level):
    _, psi0 = two_level
    b = oracles.brute_transport(propagate_constant(np.zeros((2, 2)), 1.0, 5), psi0, 100)
    np.testing.assert_allclose(b.endpoint.matrix, psi0.matrix)
    np.testing.assert_allclose(b.gauges[-1], np.eye(2))


def test_brute_transport_degenerate(rng):
    spec = Spectrum.from_values([0.4, 0.4, 0.2])
    psi0 = oracles.random_frame(rng, 4, spec)
    path = propagate_constant(oracles.random_hermitian(rng, 4), 1.0, 2000)
    a = horizontal_lift(path, psi0)
    b = oracles.brute_transport(path, psi0, 100_000)
    assert np.linalg.norm(a.endpoint.matrix - b.endpoint.matrix) < 1e-5


def test_brute_transport_time_ordering(rng):
    # a non-commuting, time-dependent generator distinguishes the two orderings
    spec = Spectrum.from_values([0.4, 0.4, 0.2])
    psi0 = oracles.random_frame(rng, 4, spec)
    path = oracles.driven_path(oracles.random_hermitian(rng, 4), oracles.random_hermitian(rng, 4), 1.0, 2000)
    a = horizontal_lift(path, psi0)
    b = oracles.brute_transport(path, psi0, 50_000)
    assert np.linalg.norm(a.endpoint.matrix - b.endpoint.matrix) < 1e-6


def test_brute_transport_sampled_path(two_level):
    _, psi0 = two_level
    exact = builtin_neutron_I(1.0, 0.9, math.pi, 400)
    sampled = resample(exact.times, exact.unitaries)
    b = oracles.brute_transport(sampled, psi0, 20_000)
    a = horizontal_lift(exact, psi0)
    assert np.abs(a.endpoint.matrix - b.endpoint.matrix).max() < 1e-5


def test_closed_form_candidates():
    c = oracles.closed_form_neutron_I(0.7, 0.3, math.pi / 2)
    assert c["paper"] == pytest.approx(-1) and c["swapped"] == pytest.approx(-1)
    c = oracles.closed_form_neutron_I(0.7, 0.3, 0.0)
    assert c["paper"] == pytest.approx(1) and c["swapped"] == pytest.approx(1)
    c = oracles.closed_form_neutron_I(0.7, 0.3, math.pi / 3)
    assert arg(c["paper"]) == pytest.approx(-math.pi / 2)
    assert arg(c["swapped"]) == pytest.approx(math.pi / 2)


def test_enumerate_zeta_J(rng):
    spec = Spectrum.from_values([0.4, 0.4, 0.2])
    M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    t1 = oracles.enumerate_zeta_J(M, 1, spec)
    assert len(t1) == 2
    assert abs(sum(z for _, z in t1) - np.trace(M)) < 1e-12
    t3 = oracles.enumerate_zeta_J(M, 3, spec)
    assert abs(sum(z for _, z in t3) - np.trace(M @ M @ M)) < 1e-10
    with pytest.raises(TooManySequences):
        oracles.enumerate_zeta_J(M, 20, spec)


def test_enumerate_cyclic_off_constant_vanish(rng):
    spec = Spectrum.from_values([0.4, 0.4, 0.2])
    hol = np.zeros((3, 3), dtype=complex)
    hol[:2, :2] = oracles.random_unitary(rng, 2)
    hol[2, 2] = np.exp(0.3j)
    M = np.diag(spec.eigenvalues) @ hol
    for J, z in oracles.enumerate_zeta_J(M, 3, spec):
        if len(set(J)) > 1:
            assert z == 0


def test_seeded_streams_reproducible():
    a = oracles.OracleConfig(seed=7).rng(3).standard_normal(5)
    b = oracles.OracleConfig(seed=7).rng(3).standard_normal(5)
    np.testing.assert_array_equal(a, b)


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("HOLOPHASE_SEED", "99")
    assert oracles.OracleConfig.from_env().seed == 99


def test_random_spectrum_degenerate(rng):
    for _ in range(20):
        s = oracles.random_spectrum(rng, 4, degenerate=True)
        assert s.l < s.n
        assert sum(s.eigenvalues) == pytest.approx(1, abs=1e-12)


def test_cyclic_hamiltonian_period(rng):
    H = oracles.random_cyclic_hamiltonian(rng, 4)
    U = propagate_constant(H, 2 * math.pi, 1).unitaries[-1]
    assert np.linalg.norm(U - np.eye(4)) < 1e-12


def test_pure_state_quadrature_oracle():
    path = builtin_neutron_I(1.0, math.pi / 3, math.pi, 10)
    # parallel ket picks up -exp(-i pi cos theta) = i at theta = pi/3
    assert oracles.pure_state_parallel_phase(path, [1, 0]) == pytest.approx(math.pi / 2, abs=1e-10)
