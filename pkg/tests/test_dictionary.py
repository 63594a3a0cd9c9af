from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aglnet import dictionary as dct
from aglnet.datagen import NoiseSpec, make_dataset, make_test_set, target_from_id
from aglnet.dynamics import OdeConfig, integrate
from aglnet.errors import InvalidConfigurationError, ResourceError
from aglnet.metrics import relative_test_error, selection_metrics
from aglnet.selection import PathPoint, reduce_path
from oracles import cd_lasso, lasso_kkt_violation


def lasso_instance(seed, m=10, p=20):
    rng = np.random.default_rng(seed)
    Phi = rng.standard_normal((m, p))
    y = Phi[:, :3] @ np.array([1.5, -2.0, 0.7]) + 0.1 * rng.standard_normal(m)
    return Phi, y


def test_two_variable_layout():
    dic = dct.build_dictionary(np.array([[2.0, 3.0]]), 2)
    assert dic.term_names() == ["1", "x1", "x2", "x1^2", "x1*x2", "x2^2"]
    np.testing.assert_array_equal(dic.Phi, [[1, 2, 3, 4, 6, 9]])


def test_zero_inputs():
    dic = dct.build_dictionary(np.zeros((3, 4)), 2)
    assert np.all(dic.Phi[:, 0] == 1) and np.all(dic.Phi[:, 1:] == 0)


@pytest.mark.parametrize("d,deg", [(40, 2), (5, 3), (3, 1)])
def test_term_count(d, deg):
    assert len(dct.monomial_combos(d, deg)) == comb(d + deg, deg)


def test_exponents_match_combos():
    dic = dct.build_dictionary(np.ones((1, 3)), 3)
    assert dic.exponents.sum(1).max() == 3
    assert dic.exponents[dic.term_names().index("x1^2*x3")].tolist() == [2, 0, 1]


def test_resource_guard():
    with pytest.raises(ResourceError):
        dct.build_dictionary(np.ones((10, 40)), 3, max_bytes=1e6)
    with pytest.raises(InvalidConfigurationError):
        dct.build_dictionary(np.ones((3, 2)), 0)


def test_power_iteration():
    A = np.random.default_rng(0).standard_normal((30, 8))
    G = A.T @ A
    assert dct.largest_eigenvalue(G) == pytest.approx(np.linalg.eigvalsh(G)[-1], rel=1e-8)


@pytest.mark.parametrize("seed", range(5))
def test_ista_optimality_vs_coordinate_descent(seed):
    Phi, y = lasso_instance(seed)
    m = Phi.shape[0]
    lam = 0.1
    c, _ = dct.lasso_ista(Phi.T @ Phi / m, Phi.T @ y / m, lam, n_iter=200000, tol=1e-14)
    assert lasso_kkt_violation(Phi, y, c, lam) < 1e-6
    np.testing.assert_allclose(c, cd_lasso(Phi, y, lam), atol=1e-6)


def test_ista_lambda_zero_is_least_squares():
    rng = np.random.default_rng(3)
    Phi = rng.standard_normal((20, 10))
    y = rng.standard_normal(20)
    c, _ = dct.lasso_ista(Phi.T @ Phi / 20, Phi.T @ y / 20, 0.0, n_iter=100000, tol=1e-15)
    np.testing.assert_allclose(c, np.linalg.solve(Phi.T @ Phi, Phi.T @ y), atol=1e-8)


def test_degree_one_lambda_zero_linear_regression():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((50, 3))
    y = 2.0 + X @ np.array([1.0, -0.5, 0.25]) + 0.1 * rng.standard_normal(50)
    dic = dct.build_dictionary(X, 1)
    sc = dct.sparse_solve(dic, y, 0.0, n_iter=100000, tol=1e-15)
    A = np.column_stack([np.ones(50), X])
    np.testing.assert_allclose(sc.c, np.linalg.solve(A.T @ A, A.T @ y), atol=1e-8)


def test_square_system_exact():
    rng = np.random.default_rng(5)
    X = rng.uniform(-1, 1, (6, 2))
    dic = dct.build_dictionary(X, 2)
    y = dic.Phi @ rng.standard_normal(6)
    sc = dct.sparse_solve(dic, y, 0.0, n_iter=10)
    np.testing.assert_allclose(dic.Phi @ sc.c, y, atol=1e-10)
    assert sc.train_mse < 1e-20


def test_constant_only_recovery():
    X = np.random.default_rng(6).uniform(-1, 1, (40, 3))
    dic = dct.build_dictionary(X, 2)
    y = dic.Phi[:, 0].copy()
    sc = dct.sparse_solve(dic, y, 1e-3, refit=False, n_iter=100000, tol=1e-15)
    ref = cd_lasso(dic.Phi, y, 1e-3)
    np.testing.assert_allclose(sc.lasso_c, ref, atol=1e-6)
    assert sc.support == frozenset({0})
    assert dct.sparse_solve(dic, y, 1e-3).c[0] == pytest.approx(1.0, abs=1e-12)


def test_column_permutation_permutes_coefficients():
    Phi, y = lasso_instance(8, m=30, p=8)
    perm = np.random.default_rng(8).permutation(8)
    G, q = Phi.T @ Phi / 30, Phi.T @ y / 30
    c, _ = dct.lasso_ista(G, q, 0.05, n_iter=100000, tol=1e-15)
    cp, _ = dct.lasso_ista(G[np.ix_(perm, perm)], q[perm], 0.05, n_iter=100000, tol=1e-15)
    np.testing.assert_allclose(cp, c[perm], atol=1e-10)


def test_rank_deficient_flag():
    X = np.random.default_rng(9).standard_normal((20, 2))
    X[:, 1] = 2 * X[:, 0]
    dic = dct.build_dictionary(X, 1)
    sc = dct.sparse_solve(dic, X[:, 0] + 1.0, 0.0, n_iter=50)
    assert sc.rank_deficient


def test_support_variables():
    dic = dct.build_dictionary(np.ones((1, 30)), 2)
    idx = {name: p for p, name in enumerate(dic.term_names())}
    only_const = dct.SparseCoefficients(c=np.zeros(dic.n_terms), lam=0, support=frozenset({0}))
    assert dct.dict_support_variables(only_const, dic) == frozenset()
    two = dct.SparseCoefficients(c=np.zeros(dic.n_terms), lam=0,
                                 support=frozenset({idx["x23*x24"], idx["x25"]}))
    assert dct.dict_support_variables(two, dic) == frozenset({23, 24, 25})


@given(st.integers(0, 1000))
def test_destandardize_matches_raw_prediction(seed):
    rng = np.random.default_rng(seed)
    raw = rng.uniform(-3, 3, (15, 3))
    sigma, alpha = rng.uniform(0.5, 2.0, 3), 1.7
    dic = dct.build_dictionary(raw / sigma, 2)
    c = rng.standard_normal(dic.n_terms)
    sc = dct.SparseCoefficients(c=c, lam=0, support=frozenset(range(dic.n_terms)))
    doc = dct.coefficients_to_dict(sc, dic, (sigma, alpha))
    np.testing.assert_allclose(dct.predict_from_dict(doc, raw), alpha * dct.predict(sc, dic, raw / sigma),
                               rtol=1e-10, atol=1e-10)


def test_noiseless_lorenz_recovery(tmp_path):
    traj = integrate(OdeConfig())
    tf = target_from_id("lorenz_rhs_25")
    train = make_dataset(traj, tf, NoiseSpec(0.0, 0.0, 0))
    test = make_test_set(traj, tf, train.scales)
    dic = dct.build_dictionary(train.X, 2)
    points = {}
    for lam in np.logspace(-1, -4, 4):
        sc = dct.sparse_solve(dic, train.y, lam, n_iter=3000)
        points[lam] = PathPoint(sc.train_mse, sc.n_active, sc.support, sc)
    sc = reduce_path(points, train.m).chosen.payload
    doc = dct.coefficients_to_dict(sc, dic, train.scales)
    got = {t["name"]: t["coef_original"] for t in doc["terms"]}
    assert set(got) == {"1", "x25", "x23*x24", "x24*x26"}
    np.testing.assert_allclose([got["1"], got["x25"], got["x23*x24"], got["x24*x26"]], [8, -1, -1, 1], atol=1e-6)
    rep = selection_metrics(dct.dict_support_variables(sc, dic), tf.active_set, 40)
    assert (rep.sensitivity, rep.specificity) == (1.0, 1.0)
    assert relative_test_error(test.raw_y, dct.predict(sc, dic, test.X) * test.alpha) < 1e-6
    path = dct.save_coefficients(tmp_path / "c.json", sc, dic, train.scales)
    assert path.exists()
