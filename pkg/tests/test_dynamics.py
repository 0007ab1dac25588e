import numpy as np
import pytest
from scipy.linalg import solve_continuous_lyapunov

from covarloop.dynamics import (
    assemble,
    blue_eigenvalues,
    integrate,
    is_hurwitz,
    lyapunov_steady_state,
    spectral_abscissa,
)
from covarloop.loops import passive_loop, squeeze_loss_loop, two_mode_squeeze_loop
from covarloop.model import NoiseEnvironment, Regime, SystemParams


def weak_setup(a=0.99, b=0.0):
    params = SystemParams(g_lin=1e-3, kappa=0.1, gamma_m=1e-5)
    env = NoiseEnvironment(n_l=1.0, n_m=200.0)
    return assemble(params, env, passive_loop(a, b)), params, env


def test_passive_red_drift_matrix():
    # Known closed form: diagonal -kappa_eff/2 (optical), -gamma_m/2
    # (mechanical), b-induced optical rotation 2 kappa b, couplings +-G.
    a_fb, b = 0.8, 0.1
    dyn, params, _ = weak_setup(a_fb, b)
    ke = 2 * params.kappa * (1 - a_fb)
    g, gm, k = params.g_lin, params.gamma_m, params.kappa
    expected = np.array([
        [-ke / 2, 2 * k * b, 0.0, g],
        [-2 * k * b, -ke / 2, -g, 0.0],
        [0.0, g, -gm / 2, 0.0],
        [-g, 0.0, 0.0, -gm / 2],
    ])
    assert np.allclose(dyn.a, expected, atol=1e-14)


def test_passive_red_diffusion_matrix():
    dyn, params, env = weak_setup(0.99, 0.0)
    ke = 2 * params.kappa * (1 - 0.99)
    expected = np.diag([ke * env.n_l, ke * env.n_l,
                        params.gamma_m * env.n_m, params.gamma_m * env.n_m])
    assert np.allclose(dyn.d, expected, atol=1e-12)


def test_squeeze_loss_drift_diagonal():
    # Optical diagonal of the squeeze-loss drift: kappa(eta z - 1) + kappa eta (z - 1/z)/2
    # = kappa(3 eta z / 2 - eta/(2z) - 1), and the x<->p partner with z -> 1/z.
    eta, z = 0.4, 1.3
    params = SystemParams(g_lin=1e-3, kappa=0.1, gamma_m=1e-5)
    env = NoiseEnvironment()
    dyn = assemble(params, env, squeeze_loss_loop(eta, z))
    k = params.kappa
    assert dyn.a[0, 0] == pytest.approx(k * (3 * eta * z / 2 - eta / (2 * z) - 1))
    assert dyn.a[1, 1] == pytest.approx(k * (3 * eta / (2 * z) - eta * z / 2 - 1))


def test_squeeze_loss_diffusion_diagonal():
    eta, z = 0.4, 1.3
    params = SystemParams(g_lin=1e-3, kappa=0.1, gamma_m=1e-5)
    env = NoiseEnvironment(n_l=2.0, n_m=50.0)
    dyn = assemble(params, env, squeeze_loss_loop(eta, z))
    k, nl = params.kappa, env.n_l
    assert dyn.d[0, 0] == pytest.approx(k * nl * (1 - 2 * eta * z + z * z))
    assert dyn.d[1, 1] == pytest.approx(k * nl * (1 - 2 * eta / z + 1 / z**2))


def test_flipped_tms_drift_damping():
    r = 1.0
    params = SystemParams(g_lin=4.5e-3, kappa=0.01, gamma_m=1e-3, regime=Regime.BLUE_RWA)
    dyn = assemble(params, NoiseEnvironment(), two_mode_squeeze_loop(r, flipped=True))
    kappa_s = 2 * params.kappa * (1 + np.cosh(r))
    assert dyn.a[0, 0] == pytest.approx(-kappa_s / 2)
    assert dyn.a[1, 1] == pytest.approx(-kappa_s / 2)


def test_steady_state_matches_scipy_lyapunov():
    dyn, _, _ = weak_setup()
    sigma = lyapunov_steady_state(dyn)
    ref = solve_continuous_lyapunov(dyn.a, -dyn.d)
    assert np.allclose(sigma, ref, rtol=1e-10)
    residual = dyn.a @ sigma + sigma @ dyn.a.T + dyn.d
    assert np.max(np.abs(residual)) <= 1e-10 * np.linalg.norm(dyn.d, 2)


def test_unstable_system_raises():
    params = SystemParams(g_lin=4.5e-3, kappa=0.1, gamma_m=1e-3, regime=Regime.BLUE_RWA)
    dyn = assemble(params, NoiseEnvironment(n_l=1.0, n_m=100.0),
                   passive_loop(1.0 - 0.04 / (2 * 0.1)))
    stable, _ = is_hurwitz(dyn)
    assert not stable
    with pytest.raises(ValueError):
        lyapunov_steady_state(dyn)


def test_blue_eigenvalues_match_numerical_spectrum():
    params = SystemParams(g_lin=4.5e-3, kappa=0.1, gamma_m=1e-3, regime=Regime.BLUE_RWA)
    ke = 0.1
    dyn = assemble(params, NoiseEnvironment(n_l=1.0, n_m=100.0),
                   passive_loop(1.0 - ke / (2 * params.kappa)))
    numeric = np.sort(np.real(np.linalg.eigvals(dyn.a)))
    analytic = np.sort(blue_eigenvalues(ke, params.g_lin, params.gamma_m))
    assert np.allclose(numeric, analytic, atol=1e-10)
    assert np.max(np.abs(np.imag(np.linalg.eigvals(dyn.a)))) <= 1e-12


def test_integrator_fixed_point():
    dyn, _, _ = weak_setup()
    sigma_ss = lyapunov_steady_state(dyn)
    _, sigmas = integrate(dyn, sigma_ss, t_final=20.0, dt_out=5.0)
    assert np.max(np.abs(sigmas[-1] - sigma_ss)) <= 1e-9


def test_integrator_converges_to_steady_state():
    params = SystemParams(g_lin=1e-3, kappa=0.1, gamma_m=1e-2)
    env = NoiseEnvironment(n_l=1.0, n_m=20.0)
    dyn = assemble(params, env, passive_loop(0.9))
    sigma_ss = lyapunov_steady_state(dyn)
    t_relax = 20.0 / abs(spectral_abscissa(dyn.a))
    _, sigmas = integrate(dyn, np.diag([1.0, 1.0, 20.0, 20.0]), t_relax, t_relax / 4)
    assert np.max(np.abs(sigmas[-1] - sigma_ss)) <= 1e-6 * np.linalg.norm(sigma_ss, 2)


def test_decoupled_mechanical_decay_rate():
    # G = 0: the mechanical block relaxes toward n_m with rate gamma_m.
    params = SystemParams(g_lin=0.0, kappa=0.1, gamma_m=0.05)
    env = NoiseEnvironment(n_l=1.0, n_m=10.0)
    dyn = assemble(params, env)
    sigma0 = np.diag([1.0, 1.0, 30.0, 30.0])
    t_fold = 1.0 / params.gamma_m
    times, sigmas = integrate(dyn, sigma0, 3 * t_fold, t_fold)
    occ = np.array([0.5 * (s[2, 2] + s[3, 3]) for s in sigmas])
    assert np.all(np.diff(occ) < 0)  # monotone cooling toward the bath
    measured = (occ[1] - 10.0) / (occ[0] - 10.0)
    assert measured == pytest.approx(np.exp(-1.0), rel=0.02)


def test_trajectory_stays_physical():
    from covarloop.gaussian import symplectic_eigenvalues
    dyn, _, _ = weak_setup()
    _, sigmas = integrate(dyn, np.diag([1.0, 1.0, 200.0, 200.0]), 200.0, 50.0)
    for s in sigmas:
        assert np.min(symplectic_eigenvalues(s)) >= 1.0 - 1e-7
