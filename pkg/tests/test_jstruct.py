import numpy as np
import pytest
from hypothesis import given

from invkahler.fixtures import perturbed_pair
from invkahler.jstruct import (
    RegularityError,
    admissibility_check,
    constant_pair,
    is_integrable,
    j_at,
    j_matrix,
    load_table_pair,
    maurer_cartan_residual,
    nijenhuis_residual,
    split_integrability_residuals,
    standard_pair,
)
from invkahler.lie_core import abelian

from conftest import ALGEBRAS
from strategies import points

SU2, SU3 = ALGEBRAS["su2"], ALGEBRAS["su3"]
PAIRS = {name: standard_pair(alg) for name, alg in ALGEBRAS.items()}


def test_j_at_origin_is_standard(alg):
    n = alg.dim
    J = j_at(standard_pair(alg), np.zeros(n)).block_matrix
    want = np.block([[np.zeros((n, n)), -np.eye(n)], [np.eye(n), np.zeros((n, n))]])
    np.testing.assert_allclose(J, want, atol=1e-15)


def test_j_call_splits_components():
    J = j_at(PAIRS["su2"], np.array([0.2, 0.4, -0.1]))
    u, v = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    ju, jv = J(u, v)
    np.testing.assert_allclose(np.concatenate([ju, jv]), J.block_matrix @ np.concatenate([u, v]))


@given(points(8))
def test_j_squares_to_minus_one(a):
    assert j_at(PAIRS["su3"], a).square_residual() <= 1e-12


@given(points(9, 3.0), points(9, 0.5))
def test_j_squares_for_any_regular_pair(c, ds):
    # any c and any s near Id give a complex structure
    M = j_matrix(c.reshape(3, 3), np.eye(3) + ds.reshape(3, 3))
    np.testing.assert_allclose(M @ M, -np.eye(6), atol=1e-10)


def test_standard_pair_is_integrable(alg):
    pair = standard_pair(alg)
    rng = np.random.default_rng(1)
    for _ in range(6):
        a = alg.random_point(rng, 2.0)
        re, im = maurer_cartan_residual(pair, a)
        assert max(re, im) <= 1e-6
        assert nijenhuis_residual(pair, a) <= 1e-5
        assert is_integrable(pair, a)


def test_split_residuals_agree_with_maurer_cartan():
    pair = perturbed_pair(SU3, 0.1)
    a = SU3.random_point(np.random.default_rng(2), 1.5)
    np.testing.assert_allclose(split_integrability_residuals(pair, a), maurer_cartan_residual(pair, a), rtol=1e-9)


def test_series_and_spectral_pairs_agree():
    a = np.array([0.7, -0.2, 1.1])
    c1, s1 = standard_pair(SU2, "series").c_and_s(a)
    c2, s2 = standard_pair(SU2, "spectral").c_and_s(a)
    np.testing.assert_allclose(c1, c2, atol=1e-12)
    np.testing.assert_allclose(s1, s2, atol=1e-12)


def test_perturbed_pair_fails_all_three_tests():
    pair = perturbed_pair(SU2, 0.1)
    a = np.array([0.5, -0.8, 0.3])
    assert max(maurer_cartan_residual(pair, a)) > 1e-3
    assert max(split_integrability_residuals(pair, a)) > 1e-3
    assert nijenhuis_residual(pair, a) > 1e-3
    assert not is_integrable(pair, a)


def test_constant_pair_integrable_only_when_abelian():
    u = abelian(3)
    a = np.array([0.3, 0.2, -0.4])
    assert max(maurer_cartan_residual(constant_pair(u), a)) < 1e-12
    assert nijenhuis_residual(constant_pair(u), a) < 1e-12
    # on su(2), phi = i Id gives [phi V, phi W] = -[V, W] with nothing to cancel it
    assert max(maurer_cartan_residual(constant_pair(SU2), a)) > 0.5


def test_admissibility():
    rng = np.random.default_rng(3)
    sample = [SU2.random_point(rng, 2.0) for _ in range(8)]
    assert admissibility_check(PAIRS["su2"], sample).passed
    bad = constant_pair(SU2, s=np.diag([1.0, 1.0, 0.0]))
    rep = admissibility_check(bad, sample)
    assert not rep.passed and rep.failures == list(range(8))
    with pytest.raises(RegularityError):
        j_at(bad, sample[0])
    with pytest.raises(ValueError):
        admissibility_check(PAIRS["su2"], [])


def _grid_table(alg, pair, ticks):
    grid = np.stack(np.meshgrid(*([ticks] * alg.dim), indexing="ij"), axis=-1)
    flat = grid.reshape(-1, alg.dim)
    c = np.array([pair.c(p) for p in flat]).reshape(grid.shape[:-1] + (alg.dim, alg.dim))
    s = np.array([pair.s(p) for p in flat]).reshape(grid.shape[:-1] + (alg.dim, alg.dim))
    return {"points": [ticks.tolist()] * alg.dim, "c_matrices": c.tolist(), "s_matrices": s.tolist()}


def test_table_pair_reproduces_nodes_and_interpolates(tmp_path):
    import json

    ticks = np.linspace(-1, 1, 9)
    doc = _grid_table(SU2, PAIRS["su2"], ticks)
    path = tmp_path / "table.json"
    path.write_text(json.dumps(doc))
    table = load_table_pair(path, SU2)
    node = np.array([ticks[2], ticks[5], ticks[7]])
    np.testing.assert_allclose(table.s(node), PAIRS["su2"].s(node), atol=1e-14)
    mid = np.array([0.1, -0.33, 0.41])
    # multilinear interpolation on spacing 0.25 is accurate to O(spacing^2)
    assert np.max(np.abs(table.c(mid) - PAIRS["su2"].c(mid))) < 0.02
    assert not table.analytic


def test_table_pair_shape_errors():
    doc = {"points": [[0, 1], [0, 1]], "c_matrices": [], "s_matrices": []}
    with pytest.raises(ValueError):
        load_table_pair(doc, SU2)
    doc = {"points": [[0, 1]] * 3, "c_matrices": np.zeros((2, 2, 2, 3, 3)).tolist(), "s_matrices": [[0]]}
    with pytest.raises(ValueError):
        load_table_pair(doc, SU2)
