import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from invkahler.jstruct import standard_pair
from invkahler.kaehler import KAHLER, kaehler_verdict, one_form_mu, potential_residual
from invkahler.scalings import (
    InvariantScaling,
    ScalingDomainError,
    ScalingFunction,
    arctan_scaling,
    chi_map,
    dchi_at,
    f_gradient,
    f_potential,
    get_scaling,
    identity_scaling,
    invariant_scaled_pair,
    polynomial_scaling,
    scaled_pair,
    sinh_scaling,
)

from conftest import ALGEBRAS
from strategies import points

SU2, SU3 = ALGEBRAS["su2"], ALGEBRAS["su3"]
FAMILIES = [identity_scaling(), arctan_scaling(), sinh_scaling(), polynomial_scaling([1.0, 0.2, 0.05])]
IDS = [sf.name for sf in FAMILIES]


def _sample(alg, n, radius=2.0, seed=0):
    rng = np.random.default_rng(seed)
    return [alg.random_point(rng, radius) for _ in range(n)]


def test_identity_is_the_standard_pair():
    pair, st_pair = scaled_pair(identity_scaling(), SU3), standard_pair(SU3)
    for a in _sample(SU3, 8):
        np.testing.assert_allclose(pair.c(a), st_pair.c(a), atol=1e-12)
        np.testing.assert_allclose(pair.s(a), st_pair.s(a), atol=1e-12)
        np.testing.assert_allclose(f_potential(identity_scaling(), SU3, a), 0.5 * a @ a, atol=1e-14)


def test_arctan_image_is_bounded():
    sf = arctan_scaling()
    for r in (0.5, 10.0, 100.0):
        a = r * np.array([0.6, 0.0, 0.8])
        assert np.isclose(SU2.norm(chi_map(sf, SU2, a)), np.arctan(r))
        assert SU2.norm(chi_map(sf, SU2, a)) < np.pi / 2


def test_origin_values():
    z = np.zeros(8)
    for sf in FAMILIES:
        np.testing.assert_array_equal(chi_map(sf, SU3, z), z)
        np.testing.assert_allclose(dchi_at(sf, SU3, z), sf.phi(0.0) * np.eye(8))
        assert f_potential(sf, SU3, z) == 0.0


@pytest.mark.parametrize("sf", FAMILIES, ids=IDS)
def test_small_argument_branches_are_continuous(sf):
    for y in (0.9e-6, 1.1e-6):
        r = np.sqrt(y)
        assert abs(sf.chi(r) / r - sf.phi(y)) < 1e-15
    lo, hi = 0.999999e-6, 1.000001e-6
    assert abs(sf.phi(lo) - sf.phi(hi)) < 1e-11
    assert abs(sf.dphi(lo) - sf.dphi(hi)) < 1e-9


@pytest.mark.parametrize("sf", FAMILIES, ids=IDS)
def test_dchi_matches_finite_differences(sf):
    h = 1e-6
    for a in _sample(SU3, 6, seed=3):
        fd = np.array([(chi_map(sf, SU3, a + e) - chi_map(sf, SU3, a - e)) / (2 * h) for e in h * np.eye(8)]).T
        np.testing.assert_allclose(dchi_at(sf, SU3, a), fd, atol=1e-7)


@pytest.mark.parametrize("sf", FAMILIES, ids=IDS)
def test_dchi_eigenstructure(sf):
    a = np.array([0.3, -1.2, 0.4])
    r = SU2.norm(a)
    D = dchi_at(sf, SU2, a)
    np.testing.assert_allclose(D @ (a / r), sf.dchi(r) * a / r, atol=1e-12)
    perp = np.cross(a, [1.0, 0.0, 0.0])
    np.testing.assert_allclose(D @ perp, sf.phi(r * r) * perp, atol=1e-12)


@pytest.mark.parametrize("sf", FAMILIES, ids=IDS)
def test_primitive_matches_quadrature(sf):
    bare = ScalingFunction(sf.name, sf.phi, sf.dphi)
    for x in (0.0, 0.3, 1.7, 4.0):
        np.testing.assert_allclose(bare.primitive(x), sf.primitive(x), atol=1e-10)


@given(points(8), points(8, 3.0))
def test_chi_is_ad_equivariant(a, t):
    sf = arctan_scaling()
    z = SU3.exp_c(t).matrix
    np.testing.assert_allclose(chi_map(sf, SU3, SU3.Ad(z, a)), SU3.Ad(z, chi_map(sf, SU3, a)), atol=1e-12)
    np.testing.assert_allclose(SU3.bracket(chi_map(sf, SU3, a), a), 0, atol=1e-15)


@given(points(8), st.sampled_from(FAMILIES))
def test_mu_c_vanishes(a, sf):
    assert np.max(np.abs(one_form_mu(scaled_pair(sf, SU3), "c")(a))) <= 1e-10


@given(points(8), st.sampled_from(FAMILIES))
def test_gradient_of_potential(a, sf):
    h = 1e-5
    fd = np.array([(f_potential(sf, SU3, a + e) - f_potential(sf, SU3, a - e)) / (2 * h) for e in h * np.eye(8)])
    np.testing.assert_allclose(fd, f_gradient(sf, SU3, a), atol=1e-7)
    np.testing.assert_allclose(one_form_mu(scaled_pair(sf, SU3), "s")(a), f_gradient(sf, SU3, a), atol=1e-10)


@pytest.mark.parametrize("alg_name", ["su2", "su3"])
@pytest.mark.parametrize("sf", FAMILIES, ids=IDS)
def test_verdict_and_potential(alg_name, sf):
    alg = ALGEBRAS[alg_name]
    pair = scaled_pair(sf, alg)
    sample = _sample(alg, 6, seed=7)
    rep = kaehler_verdict(pair, sample)
    assert rep.verdict == KAHLER, rep
    if sf.name != "polynomial":
        # the polynomial grows fast, so its O(h^2) difference error is larger
        assert max(v for k, v in rep.residuals.items() if k != "metric_min_eigenvalue") <= 1e-5
    assert potential_residual(pair, lambda a: f_potential(sf, alg, a), sample) <= 1e-7


def test_domain_errors():
    with pytest.raises(ScalingDomainError):
        chi_map(sinh_scaling(), SU2, np.array([6.0, 0.0, 0.0]))
    with pytest.raises(ScalingDomainError):
        polynomial_scaling([1.0, -1.0], radius=2.0)  # phi(y) = 1 - y turns negative
    with pytest.raises(ScalingDomainError):
        polynomial_scaling([1.0, -0.3], radius=1.2)  # chi'(x) = 1 - 0.9 x^2 vanishes
    with pytest.raises(ValueError):
        get_scaling("tanh")
    with pytest.raises(ValueError):
        get_scaling({"c": [1]})


def test_get_scaling():
    assert get_scaling("arctan").name == "arctan"
    sf = get_scaling({"coeffs": [1.0, 0.5]})
    np.testing.assert_allclose(sf.chi(2.0), 2.0 * (1 + 0.5 * 4))
    np.testing.assert_allclose(sf.primitive(2.0), 2.0**2 / 2 + 0.5 * 2.0**4 / 4)


def test_invariant_scaling_callback_matches_norm_scaling():
    sf = arctan_scaling()
    isf = InvariantScaling("arctan-inv", lambda a, inv: sf.phi(inv[0]))
    pair, ref = invariant_scaled_pair(isf, SU3), scaled_pair(sf, SU3)
    for a in _sample(SU3, 3, seed=2):
        np.testing.assert_allclose(isf.chi(SU3, a), chi_map(sf, SU3, a), atol=1e-15)
        np.testing.assert_allclose(pair.s(a), ref.s(a), atol=1e-8)
    assert not pair.analytic
