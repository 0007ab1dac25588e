import numpy as np
import pytest

from covarloop.model import (
    NoiseEnvironment,
    Regime,
    SystemParams,
    bare_coupling_matrix,
    hamiltonian_matrix,
)


def test_defaults():
    p = SystemParams(g_lin=1e-3, kappa=0.1, gamma_m=1e-5)
    assert p.regime is Regime.RED_RWA
    assert p.omega_m == 1.0
    assert p.delta == -1.0


def test_negative_rates_rejected():
    with pytest.raises(ValueError):
        SystemParams(g_lin=-1e-3, kappa=0.1, gamma_m=1e-5)
    with pytest.raises(ValueError):
        SystemParams(g_lin=1e-3, kappa=0.1, gamma_m=1e-5, omega_m=0.0)


def test_red_rwa_hamiltonian():
    p = SystemParams(g_lin=0.4, kappa=0.1, gamma_m=1e-5)
    h = hamiltonian_matrix(p)
    expected = np.zeros((4, 4))
    expected[0, 2] = expected[2, 0] = 0.4
    expected[1, 3] = expected[3, 1] = 0.4
    assert np.array_equal(h, expected)


def test_blue_rwa_hamiltonian_sign():
    p = SystemParams(g_lin=0.4, kappa=0.1, gamma_m=1e-5, regime=Regime.BLUE_RWA)
    h = hamiltonian_matrix(p)
    assert h[0, 2] == 0.4 and h[1, 3] == -0.4


def test_full_hamiltonian():
    p = SystemParams(g_lin=0.4, kappa=0.1, gamma_m=1e-5, regime=Regime.FULL, delta=-1.0)
    h = hamiltonian_matrix(p)
    assert np.allclose(np.diag(h), [1.0, 1.0, 1.0, 1.0])
    assert h[0, 2] == pytest.approx(0.8)
    assert h[1, 3] == 0.0


def test_hamiltonians_symmetric():
    for regime in Regime:
        p = SystemParams(g_lin=0.3, kappa=0.1, gamma_m=1e-4, regime=regime)
        h = hamiltonian_matrix(p)
        assert np.array_equal(h, h.T)


def test_noise_environment_validation():
    with pytest.raises(ValueError):
        NoiseEnvironment(n_l=0.5)
    env = NoiseEnvironment.from_occupancy(nbar_m=100.0)
    assert env.n_m == 201.0
    assert env.n_l == 1.0


def test_sigma_in_layout():
    env = NoiseEnvironment(n_l=3.0, n_m=7.0)
    assert np.array_equal(env.sigma_in(1), np.diag([3.0, 3.0, 7.0, 7.0]))
    assert np.array_equal(env.sigma_in(2), np.diag([3.0, 3.0, 3.0, 3.0, 7.0, 7.0]))


def test_bare_coupling_shapes():
    p = SystemParams(g_lin=1e-3, kappa=0.04, gamma_m=1e-4)
    c1 = bare_coupling_matrix(p)
    assert c1.shape == (4, 4)
    c2 = bare_coupling_matrix(p, two_optical_interfaces=True)
    assert c2.shape == (4, 6)
    # both optical channels carry the same sqrt(kappa) block
    assert np.array_equal(c2[:2, :2], c2[:2, 2:4])
    assert np.allclose(c1[:2, :2] @ c1[:2, :2].T, p.kappa * np.eye(2))
