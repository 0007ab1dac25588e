import numpy as np
import pytest

from covarloop.gaussian import (
    check_covariance,
    log_negativity,
    mean_occupancy,
    min_quadrature_eigenvalue,
    omega,
    pure_state_cm,
    rotation,
    schatten2_distance,
    symplectic_eigenvalues,
)


def test_omega_antisymmetric_and_squares_to_minus_identity():
    for n in (1, 2, 3):
        om = omega(n)
        assert np.array_equal(om, -om.T)
        assert np.allclose(om @ om, -np.eye(2 * n))


def test_vacuum_is_physical():
    check_covariance(np.eye(4))


def test_thermal_symplectic_eigenvalues():
    sigma = np.diag([1.0, 1.0, 7.0, 7.0])
    nus = symplectic_eigenvalues(sigma)
    assert np.allclose(sorted(nus), [1.0, 7.0])


def test_nonphysical_matrix_rejected():
    with pytest.raises(ValueError):
        check_covariance(0.5 * np.eye(2))
    with pytest.raises(ValueError):
        check_covariance(np.diag([2.0, 0.1]))  # violates uncertainty


def test_mean_occupancy_thermal():
    nbar = 3.25
    sigma_m = (2 * nbar + 1) * np.eye(2)
    assert mean_occupancy(sigma_m) == pytest.approx(nbar, abs=1e-12)


def tmsv(r):
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    top = np.hstack([c * np.eye(2), s * np.diag([1.0, -1.0])])
    bot = np.hstack([s * np.diag([1.0, -1.0]), c * np.eye(2)])
    return np.vstack([top, bot])


def test_log_negativity_two_mode_squeezed_vacuum():
    # Base-2 convention: E_N = 2r / ln 2 for a TMSV.
    r = 0.5
    assert log_negativity(tmsv(r)) == pytest.approx(2 * r / np.log(2), rel=1e-12)


def test_log_negativity_matches_partial_transpose_oracle():
    # Independent oracle: partial transpose = flip the sign of p_m, then take
    # the smallest modulus of the eigenvalues of i*Omega*sigma~.
    rng = np.random.default_rng(3)
    for _ in range(25):
        m = rng.normal(size=(4, 4))
        sigma = np.eye(4) + m @ m.T
        p = np.diag([1.0, 1.0, 1.0, -1.0])
        sigma_pt = p @ sigma @ p
        nus = np.abs(np.linalg.eigvals(1j * omega(2) @ sigma_pt))
        nu_minus = np.min(nus)
        expected = max(0.0, -np.log2(nu_minus))
        assert log_negativity(sigma) == pytest.approx(expected, abs=1e-10)


def test_separable_product_state_has_zero_negativity():
    assert log_negativity(np.diag([1.0, 1.0, 5.0, 5.0])) == 0.0


def test_min_quadrature_eigenvalue():
    assert min_quadrature_eigenvalue(np.diag([0.25, 4.0])) == pytest.approx(0.25)


def test_pure_state_cm_is_pure_and_physical():
    for theta in np.linspace(0.0, np.pi, 7):
        for z in (0.25, 1.0, 3.0):
            cm = pure_state_cm(theta, z)
            assert np.linalg.det(cm) == pytest.approx(1.0, abs=1e-12)
            check_covariance(cm)


def test_pure_state_cm_axis_aligned():
    assert np.allclose(pure_state_cm(0.0, 0.25), np.diag([4.0, 0.25]))


def test_rotation_is_orthogonal():
    r = rotation(0.7)
    assert np.allclose(r @ r.T, np.eye(2))
    assert np.linalg.det(r) == pytest.approx(1.0)


def test_schatten2_distance():
    a = np.diag([1.0, 2.0])
    b = np.diag([1.0, 5.0])
    assert schatten2_distance(a, b) == pytest.approx(3.0)
