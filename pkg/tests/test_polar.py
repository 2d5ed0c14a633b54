import numpy as np
import pytest
import scipy.linalg

from invkahler.fixtures import gauge_closedness_oracle, gauge_pair, perturbed_pair
from invkahler.jstruct import standard_pair
from invkahler.kaehler import exterior_derivative_at, one_form_mu
from invkahler.polar import (
    GammaIntegrator,
    IntegrationError,
    holomorphy_residual,
    integrate_gamma,
    path_independence_residual,
    polar_coordinates,
    polar_map,
    quasi_equivariance_constant,
    quasi_equivariance_residual,
    symplecto_residual,
)
from invkahler.scalings import arctan_scaling, scaled_pair

from conftest import ALGEBRAS

SU2, SU3 = ALGEBRAS["su2"], ALGEBRAS["su3"]
ST2 = standard_pair(SU2)
A = np.array([0.9, -1.1, 0.6])


@pytest.mark.parametrize("alg_name", ["su2", "su3"])
def test_gamma_matches_exponential(alg_name):
    alg = ALGEBRAS[alg_name]
    a = alg.random_point(np.random.default_rng(1), 2.0)
    g = integrate_gamma(standard_pair(alg), a)
    np.testing.assert_allclose(g.matrix, alg.exp_c(np.zeros(alg.dim), a).matrix, atol=1e-6)


def test_fourth_order_convergence():
    a = 2.0 * A / SU2.norm(A)
    exact = ST2.gamma(a)
    errs = [np.max(np.abs(GammaIntegrator(ST2, n)(a) - exact)) for n in (20, 40, 80)]
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    assert all(12 <= r <= 20 for r in ratios), ratios


def test_integrator_validation():
    with pytest.raises(ValueError):
        GammaIntegrator(ST2, 0)
    g = integrate_gamma(ST2, A, steps=200, verify=True)
    assert not g.real_form
    with pytest.raises(IntegrationError):
        integrate_gamma(ST2, 6 * A, steps=2, verify=True)


def test_path_independence():
    assert path_independence_residual(ST2, A, np.array([1.0, 0.5, -0.4])) < 1e-10
    # a non-integrable phi has no primitive: the endpoint depends on the path
    assert path_independence_residual(perturbed_pair(SU2), A, np.array([1.0, 0.5, -0.4])) > 1e-3


def test_holomorphy_and_symplecto():
    integ = GammaIntegrator(ST2)
    x = SU2.exp_c(np.array([0.3, 1.2, -0.7])).matrix
    assert holomorphy_residual(ST2, x, A, integrator=integ) <= 1e-5
    assert symplecto_residual(ST2, A, integrator=integ) <= 1e-5


def test_polar_map_and_coordinates():
    x = SU2.exp_c(np.array([0.3, 1.2, -0.7]))
    g = polar_map(ST2, x, A)
    y, b = polar_coordinates(SU2, g.matrix)
    np.testing.assert_allclose(y @ SU2.exp_c(np.zeros(3), b).matrix, g.matrix, atol=1e-9)
    np.testing.assert_allclose(y, x.matrix, atol=1e-9)
    np.testing.assert_allclose(b, A, atol=1e-9)
    with pytest.raises(ValueError):
        polar_map(ST2, SU2.exp_c(np.zeros(3), A), A)


@pytest.mark.parametrize("pair", [ST2, scaled_pair(arctan_scaling(), SU2)], ids=["standard", "arctan"])
def test_quasi_equivariance(pair):
    integ = GammaIntegrator(pair, 400)
    z = SU2.exp_c(np.array([1.0, -2.0, 0.5])).matrix
    assert quasi_equivariance_residual(pair, z, A, np.array([-0.2, 0.4, 1.3]), integ) <= 1e-6
    # the biinvariant pairs here have constant e
    np.testing.assert_allclose(quasi_equivariance_constant(pair, z, A, integ), np.eye(2), atol=1e-6)


def test_gauge_pair_is_not_quasi_equivariant():
    pair = gauge_pair(SU2, np.array([0.5, -0.4, 0.3]))
    z = SU2.exp_c(np.array([1.0, -2.0, 0.5])).matrix
    assert quasi_equivariance_residual(pair, z, A, np.array([-0.2, 0.4, 1.3]), GammaIntegrator(pair, 400)) > 1e-3


def test_gauge_symplecto_matches_closedness_defect():
    b0 = np.array([0.3, -0.5, 0.4])
    pair = gauge_pair(SU2, b0)
    a = np.array([0.02, -0.03, 0.01])
    oracle = np.max(np.abs(gauge_closedness_oracle(SU2, b0)))
    measured = np.max(np.abs(exterior_derivative_at(one_form_mu(pair, "c"), a)))
    np.testing.assert_allclose(measured, oracle, rtol=0.2)
    np.testing.assert_allclose(symplecto_residual(pair, a), oracle, rtol=0.2)


def test_gauge_gamma_closed_form():
    pair = gauge_pair(SU2, np.array([0.3, -0.5, 0.4]))
    g = GammaIntegrator(pair, 400)(A)
    np.testing.assert_allclose(g, pair.gamma(A), atol=1e-9)
    assert np.allclose(scipy.linalg.det(g), np.linalg.det(pair.gamma(A)))


def test_symplecto_tracks_closedness_of_mu_c():
    pair = gauge_pair(SU2, np.array([0.3, -0.5, 0.4]))
    a = np.array([0.4, 0.2, -0.5])
    measured = np.max(np.abs(exterior_derivative_at(one_form_mu(pair, "c"), a)))
    np.testing.assert_allclose(symplecto_residual(pair, a, integrator=GammaIntegrator(pair, 400)), measured, rtol=1e-6)


def test_rescaled_symplecto_modes():
    # the rescaled map keeps omega with mu carried along, but moves the
    # momentum from a to chi(a), so the strict polar pullback differs
    pair = scaled_pair(arctan_scaling(), SU2)
    integ = GammaIntegrator(pair, 400)
    assert symplecto_residual(pair, A, integrator=integ) <= 1e-5
    assert symplecto_residual(pair, A, integrator=integ, mode="polar") > 0.1
    assert symplecto_residual(ST2, A, mode="polar") <= 1e-5
    with pytest.raises(ValueError):
        symplecto_residual(ST2, A, mode="other")
