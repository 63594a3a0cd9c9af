import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aglnet.datagen import (
    NoiseSpec,
    TargetFunction,
    evaluate_target,
    load_dataset,
    make_dataset,
    make_test_set,
    real_power,
    save_dataset,
    sidecar_path,
    standardize,
    target_from_id,
)
from aglnet.dynamics import OdeConfig, integrate
from aglnet.errors import DegenerateDataError, InvalidConfigurationError


@pytest.fixture(scope="module")
def traj():
    return integrate(OdeConfig())


@pytest.fixture(scope="module")
def lorenz25():
    return target_from_id("lorenz_rhs_25")


def test_equilibrium_target_value(lorenz25):
    assert evaluate_target(lorenz25, np.full(40, 8.0)) == 0.0


def test_setting2_at_origin():
    assert evaluate_target(TargetFunction("setting2"), np.zeros(40)) == 7.0


def test_setting1_real_root_convention():
    x = np.zeros(40)
    x[15], x[16] = -1.0, 1.0
    # scratch: cube root first, then the fourth power
    p = lambda v: np.cbrt(v) ** 4  # noqa: E731
    expected = (p(x[18]) - p(x[15])) * p(x[16]) - p(x[17]) + 8.0
    assert evaluate_target(TargetFunction("setting1"), x) == expected == 7.0


def test_real_power_negative_base():
    assert real_power(-8.0, 2, 3) == pytest.approx(4.0)
    assert real_power(-32.0, 4, 5) == pytest.approx(16.0)
    with pytest.raises(InvalidConfigurationError):
        real_power(1.0, 1, 2)


def test_lorenz_target_wraps_cyclically():
    tf = target_from_id("lorenz_rhs_1", dim=6)
    assert tf.active_set == frozenset({5, 6, 1, 2})
    x = np.arange(1.0, 7.0)
    assert evaluate_target(tf, x) == -x[4] * x[5] + x[5] * x[1] - x[0] + 8.0


def test_batch_matches_pointwise(lorenz25):
    X = np.random.default_rng(0).standard_normal((5, 40))
    batch = evaluate_target(lorenz25, X)
    np.testing.assert_array_equal(batch, [evaluate_target(lorenz25, x) for x in X])


@pytest.mark.parametrize("target", ["lorenz_rhs_25", "lorenz_rhs_10", "setting1", "setting2", "setting3"])
def test_support_correctness(target):
    tf = target_from_id(target)
    rng = np.random.default_rng(1)
    for _ in range(100):
        x = 3.0 * rng.standard_normal(40)
        base = evaluate_target(tf, x)
        for j in range(1, 41):
            xp = x.copy()
            xp[j - 1] += 0.1
            changed = evaluate_target(tf, xp) != base
            assert changed == (j in tf.active_set), (target, j)


def test_linear_combo_has_no_variable_truth():
    tf = target_from_id("linear_combo", combo_seed=3)
    assert tf.active_set == frozenset()
    assert tf.combo_matrix.shape == (4, 40)
    x = np.random.default_rng(2).standard_normal(40)
    z = tf.combo_matrix @ x
    assert evaluate_target(tf, x) == pytest.approx((z[3] - z[0]) * z[1] - z[2] + 8.0, rel=1e-12)


@pytest.mark.parametrize("kind", ["bogus", "lorenz_rhs"])
def test_bad_targets(kind):
    with pytest.raises(InvalidConfigurationError):
        TargetFunction(kind)


def test_noiseless_dataset_is_exact(traj, lorenz25):
    ds = make_dataset(traj, lorenz25, NoiseSpec(0.0, 0.0, 5))
    idx = traj.window(0, 80)
    assert ds.m == 8000
    np.testing.assert_array_equal(ds.raw_X, traj.states[idx])
    np.testing.assert_array_equal(ds.raw_y, evaluate_target(lorenz25, traj.states[idx]))
    assert ds.true_support == frozenset({23, 24, 25, 26})


def test_dataset_reproducible(traj, lorenz25):
    a = make_dataset(traj, lorenz25, NoiseSpec(0.02, 0.02, 11))
    b = make_dataset(traj, lorenz25, NoiseSpec(0.02, 0.02, 11))
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(a.y, b.y)


def test_input_noise_level(traj, lorenz25):
    ds = make_dataset(traj, lorenz25, NoiseSpec(0.02, 0.02, 0))
    clean = traj.states[traj.window(0, 80)]
    M_x = np.abs(clean).max()
    assert np.std(ds.raw_X - clean) == pytest.approx(0.02 * M_x, rel=0.03)


def test_noise_streams_independent(traj, lorenz25):
    a = make_dataset(traj, lorenz25, NoiseSpec(0.02, 0.02, 4))
    b = make_dataset(traj, lorenz25, NoiseSpec(0.05, 0.02, 4))
    np.testing.assert_array_equal(a.raw_y, b.raw_y)
    assert not np.array_equal(a.raw_X, b.raw_X)


def test_scale_window_changes_noise_amplitude(traj, lorenz25):
    clean = traj.states[traj.window(0, 80)]
    ds = make_dataset(traj, lorenz25, NoiseSpec(0.02, 0.0, 4), scale_window=(0, 8))
    M_short = np.abs(traj.states[traj.window(0, 8)]).max()
    assert np.std(ds.raw_X - clean) == pytest.approx(0.02 * M_short, rel=0.03)


def test_test_set(traj, lorenz25):
    train = make_dataset(traj, lorenz25, NoiseSpec(0.02, 0.02, 0))
    test = make_test_set(traj, lorenz25, train.scales)
    assert test.m == 2000
    np.testing.assert_array_equal(test.raw_y, evaluate_target(lorenz25, test.raw_X))
    np.testing.assert_allclose(test.X * train.sigma, test.raw_X, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(test.unscale_outputs(test.y), test.raw_y, rtol=1e-12, atol=1e-12)


def test_test_set_needs_coverage(lorenz25):
    short = integrate(OdeConfig(t_final=50.0))
    with pytest.raises(InvalidConfigurationError):
        make_test_set(short, lorenz25, (np.ones(40), 1.0))


def test_standardization_idempotent_on_scales(traj, lorenz25):
    ds = make_dataset(traj, lorenz25, NoiseSpec(0.02, 0.02, 0))
    _, _, sigma, alpha = standardize(ds.X, ds.y)
    np.testing.assert_allclose(sigma, 1.0, atol=1e-9)
    assert alpha == pytest.approx(1.0, abs=1e-9)


@given(st.integers(2, 30), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_standardize_uses_sample_std_without_centering(m, d, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((m, d)) + 3.0
    y = rng.standard_normal(m) - 1.0
    Xs, ys, sigma, alpha = standardize(X, y)
    np.testing.assert_allclose(sigma, np.sqrt(((X - X.mean(0)) ** 2).sum(0) / (m - 1)), rtol=1e-12)
    np.testing.assert_allclose(Xs * sigma, X, rtol=1e-12)
    assert ys.mean() == pytest.approx(y.mean() / alpha, rel=1e-9)


def test_constant_column_is_degenerate():
    X = np.ones((5, 3))
    X[:, [0, 2]] = np.random.default_rng(0).standard_normal((5, 2))
    with pytest.raises(DegenerateDataError, match="x2"):
        standardize(X, np.arange(5.0))


def test_noise_spec_rejects_negative():
    with pytest.raises(InvalidConfigurationError):
        NoiseSpec(-0.1, 0.0)


def test_dataset_round_trip(tmp_path, traj, lorenz25):
    ds = make_dataset(traj, lorenz25, NoiseSpec(0.02, 0.01, 8), t_range=(0, 1))
    path = save_dataset(ds, tmp_path / "train.csv")
    assert sidecar_path(path).exists()
    back = load_dataset(path)
    np.testing.assert_array_equal(back.raw_X, ds.raw_X)
    np.testing.assert_array_equal(back.y, ds.y)
    assert back.true_support == ds.true_support and back.noise == ds.noise
