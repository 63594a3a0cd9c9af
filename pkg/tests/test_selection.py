import csv
import math
from decimal import Decimal, getcontext

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aglnet.errors import InvalidConfigurationError, SweepError, DivergenceError
from aglnet.selection import (
    LambdaGrid,
    PathPoint,
    bic_score,
    choose_lambda,
    network_dof,
    reduce_path,
    sweep,
    write_path_csv,
)


def test_bic_without_dof():
    assert bic_score(0.5, 0, 100) == 100 * math.log(0.5)


def test_bic_linear_in_dof():
    assert bic_score(0.3, 20, 500) - bic_score(0.3, 10, 500) == pytest.approx(10 * math.log(500), rel=1e-14)


def test_bic_reference_value():
    getcontext().prec = 40
    ref = 8000 * Decimal("0.01").ln() + 100 * Decimal(8000).ln()
    assert bic_score(0.01, 100, 8000) == pytest.approx(float(ref), rel=1e-14)
    assert float(ref) == pytest.approx(-35942.64, abs=0.01)


def test_bic_edge_cases():
    assert bic_score(0.0, 3, 10) == -math.inf
    for args in [(0.1, 1, 0), (0.1, -1, 5), (-1.0, 1, 5), (float("nan"), 1, 5)]:
        with pytest.raises(InvalidConfigurationError):
            bic_score(*args)


def test_network_dof():
    dims = (40, 20, 20, 20, 1)
    assert network_dof(dims, 40) == 1681 - 0  # full support counts every parameter
    assert network_dof(dims, 4) == 4 * 20 + 400 + 400 + 20 + 61
    assert network_dof(dims, 4, convention="selected-groups") == 80
    assert network_dof(dims, 3, penalized_layer=2) == 3 * 20 + 800 + 400 + 20 + 61
    with pytest.raises(InvalidConfigurationError):
        network_dof(dims, 4, convention="other")


def test_grid_rules():
    g = LambdaGrid.logspace()
    assert len(g) == 25 and g.values[0] == pytest.approx(10.0) and g.values[-1] == pytest.approx(1e-5)
    assert LambdaGrid.from_values([0.1, 1.0, 0.1]).values == (1.0, 0.1)
    for bad in [(), (1.0, 1.0), (0.1, 1.0), (1.0, -1.0)]:
        with pytest.raises(InvalidConfigurationError):
            LambdaGrid(bad)


def fake_fit(table):
    def fit(lam):
        mse, dof = table[lam]
        return PathPoint(mse=mse, dof=dof, support=frozenset(range(dof)))

    return fit


def test_single_point_grid():
    res = sweep(fake_fit({0.5: (0.2, 3)}), LambdaGrid((0.5,)), 100)
    assert res.chosen_lambda == 0.5 and len(res.path) == 1


def test_dominant_point_chosen():
    table = {1.0: (0.5, 6), 0.1: (0.1, 2), 0.01: (0.3, 8)}
    assert sweep(fake_fit(table), LambdaGrid.from_values(table), 200).chosen_lambda == 0.1


def test_ties_go_to_larger_lambda():
    table = {1.0: (0.2, 3), 0.1: (0.2, 3)}
    assert sweep(fake_fit(table), LambdaGrid.from_values(table), 50).chosen_lambda == 1.0


@given(st.lists(st.tuples(st.floats(1e-3, 1.0), st.integers(0, 30)), min_size=1, max_size=8),
       st.randoms(use_true_random=False))
def test_choice_independent_of_grid_order(entries, rnd):
    lams = [10.0 ** -k for k in range(len(entries))]
    recs = reduce_path({lam: PathPoint(mse, dof, frozenset()) for lam, (mse, dof) in zip(lams, entries)}, 100).path
    shuffled = list(recs)
    rnd.shuffle(shuffled)
    assert choose_lambda(shuffled).lam == choose_lambda(recs).lam


def test_failures_recorded_and_all_failing_raises():
    def fit(lam):
        if lam < 0.5:
            raise DivergenceError("boom", step=3)
        return PathPoint(0.1, 1, frozenset({1}))

    res = sweep(fit, LambdaGrid((1.0, 0.1)), 10)
    assert res.chosen_lambda == 1.0 and set(res.failures) == {0.1}
    with pytest.raises(SweepError):
        sweep(fit, LambdaGrid((0.2, 0.1)), 10)


def test_path_csv(tmp_path):
    res = sweep(fake_fit({1.0: (0.5, 1), 0.1: (0.2, 2)}), LambdaGrid((1.0, 0.1)), 10)
    rows = list(csv.DictReader(write_path_csv(res.path, tmp_path / "p.csv").open()))
    assert [float(r["lambda"]) for r in rows] == [1.0, 0.1]
    assert rows[1]["support"] == "0 1"
    assert float(rows[0]["bic"]) == pytest.approx(bic_score(0.5, 1, 10))
