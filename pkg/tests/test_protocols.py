import numpy as np
import pytest

from covarloop.dynamics import assemble, lyapunov_steady_state
from covarloop.gaussian import mean_occupancy
from covarloop.loops import passive_loop
from covarloop.model import NoiseEnvironment, Regime, SystemParams
from covarloop.protocols import (
    cooling_sigma_cf,
    entanglement_sweep,
    optimize_cooling_weak,
    sigma_m_opt,
    squeezing_stability_boundary,
    squeezing_sweep,
    state_transfer,
    tms_stabilization,
)


def test_cooling_closed_form_limits():
    # G = 0: no cooling, the mechanics stay at the bath value.
    assert cooling_sigma_cf(0.01, 0.0, 0.1, 0.0, 1e-5, 1.0, 123.0) == pytest.approx(123.0)
    # optimal point b = 0, kappa_eff = 2G reduces to sigma_m_opt
    g, gm, nl, nm = 1e-3, 1e-5, 1.0, 200.0
    assert cooling_sigma_cf(2 * g, 0.0, 0.1, g, gm, nl, nm) == pytest.approx(
        sigma_m_opt(g, gm, nl, nm), rel=1e-12)


def test_cooling_closed_form_matches_lyapunov():
    rng = np.random.default_rng(5)
    for _ in range(10):
        kappa = rng.uniform(0.02, 0.5)
        g = rng.uniform(1e-4, 5e-3)
        gm = 10 ** rng.uniform(-6, -3)
        b = rng.uniform(-0.3, 0.3)
        a = rng.uniform(0.0, np.sqrt(1 - b * b))
        env = NoiseEnvironment(n_l=rng.uniform(1, 5), n_m=rng.uniform(1, 300))
        params = SystemParams(g_lin=g, kappa=kappa, gamma_m=gm)
        dyn = assemble(params, env, passive_loop(a, b))
        sigma = lyapunov_steady_state(dyn)
        analytic = cooling_sigma_cf(2 * kappa * (1 - a), b, kappa, g, gm, env.n_l, env.n_m)
        assert sigma[2, 2] == pytest.approx(analytic, rel=1e-10)


def test_optimize_cooling_weak():
    params = SystemParams(g_lin=1e-3, kappa=0.1, gamma_m=1e-5)
    env = NoiseEnvironment(n_l=1.0, n_m=200.0)
    a, b, occ = optimize_cooling_weak(params, env)
    assert b == 0.0
    assert a == pytest.approx(1 - params.g_lin / params.kappa, rel=1e-12)
    assert occ == pytest.approx(0.988, abs=0.002)


def test_tms_stabilization_threshold():
    params = SystemParams(g_lin=4.5e-3, kappa=0.01, gamma_m=1e-3, regime=Regime.BLUE_RWA)
    env = NoiseEnvironment(n_l=1.0, n_m=100.0)
    res = tms_stabilization(params, env)
    assert not res.passively_stabilizable
    expected = np.arccosh(2 * params.g_lin**2 / (params.kappa * params.gamma_m) - 1)
    assert res.r_analytic == pytest.approx(expected, rel=1e-12)
    assert res.r_bisected == pytest.approx(res.r_analytic, abs=1e-5)
    assert res.log_neg == 0.0


def test_tms_not_needed_when_passively_stable():
    params = SystemParams(g_lin=1e-3, kappa=0.1, gamma_m=1e-3, regime=Regime.BLUE_RWA)
    env = NoiseEnvironment(n_l=1.0, n_m=10.0)
    res = tms_stabilization(params, env)
    assert res.passively_stabilizable


def test_entanglement_sweep_passive():
    params = SystemParams(g_lin=4.5e-3, kappa=0.1, gamma_m=1e-3, regime=Regime.BLUE_RWA)
    env = NoiseEnvironment(n_l=1.0, n_m=100.0)
    table = entanglement_sweep(params, env, "passive", np.array([0.09, 0.1, 0.12]))
    by_ke = {row["kappa_eff"]: row for row in table.rows}
    assert by_ke[0.1]["log_neg"] == pytest.approx(0.01166, abs=1e-4)
    # entanglement grows toward the stability threshold
    assert by_ke[0.09]["log_neg"] > by_ke[0.1]["log_neg"] > by_ke[0.12]["log_neg"]


def test_squeezing_sweep_and_boundary():
    params = SystemParams(g_lin=1e-3, kappa=0.1, gamma_m=1e-5)
    env = NoiseEnvironment(n_l=1.0, n_m=201.0)
    eta_star = squeezing_stability_boundary(params, env, 1.3)
    assert eta_star == pytest.approx(0.6388, abs=1e-3)
    table = squeezing_sweep(params, env, 1.3, np.array([0.3, 0.63, 0.7]))
    rows = table.rows
    assert rows[0]["stable"] and rows[1]["stable"] and not rows[2]["stable"]
    # in-loop squeezing pushes the optical mode below vacuum noise
    assert rows[1]["min_opt_eig"] < 1.0
    # but never squeezes the mechanics below vacuum
    assert rows[0]["min_mech_eig"] >= 1.0 - 1e-6
    assert rows[1]["min_mech_eig"] >= 1.0 - 1e-6


def test_passive_sweep_no_optical_squeezing():
    params = SystemParams(g_lin=1e-3, kappa=0.1, gamma_m=1e-5)
    env = NoiseEnvironment(n_l=1.0, n_m=201.0)
    table = squeezing_sweep(params, env, 1.0, np.array([0.3, 0.6, 0.9]))
    for row in table.rows:
        assert row["min_opt_eig"] >= 1.0 - 1e-9


def test_state_transfer_prepared_beats_thermal():
    params = SystemParams(g_lin=0.1, kappa=0.05, gamma_m=1e-5, regime=Regime.FULL, delta=-1.0)
    env = NoiseEnvironment(n_l=1.0, n_m=100.0)
    kwargs = dict(theta_samples=4, n_oscillations=15.0)
    prep = state_transfer(params, env, 0.25, 0.035, prepared_optics=True, **kwargs)
    base = state_transfer(params, env, 0.25, 0.035, prepared_optics=False, **kwargs)
    assert prep.v_min < base.v_min
    assert prep.t_min > 0.0
    assert prep.min_mech_eigenvalue < env.n_m


def test_state_transfer_requires_full_regime():
    params = SystemParams(g_lin=0.1, kappa=0.05, gamma_m=1e-5)
    with pytest.raises(ValueError):
        state_transfer(params, NoiseEnvironment(), 0.25, 0.035)
