import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lnnet.errors import DegenerateInputError, ShapeError, UndefinedRatioError
from lnnet.nonlinearity import (IllConditionedStepWarning, default_step, group_ratio_report, group_ratios_closed,
                                group_variances, hessian_measure_fd, hessian_measure_lng_closed,
                                hessian_measure_ln_closed, nonlinearity_report)
from lnnet.rng import SplitMix64


def oracle_fd(f, x, h):
    """Entry-by-entry Hessian of every output coordinate, loop form."""
    d = x.size
    total = 0.0
    e = np.eye(d) * h
    for a in range(d):
        for b in range(d):
            if a == b:
                H = (f(x + e[a]) - 2 * f(x) + f(x - e[a])) / (h * h)
            else:
                H = (f(x + e[a] + e[b]) - f(x + e[a] - e[b]) - f(x - e[a] + e[b]) + f(x - e[a] - e[b])) / (4 * h * h)
            total += np.sum(H ** 2)
    return total


def ln(x):
    z = x - x.mean()
    return np.sqrt(x.size) * z / np.linalg.norm(z)


class TestClosedForms:
    def test_known_values(self):
        assert hessian_measure_ln_closed([1.0, 2.0, 3.0, 4.0]) == pytest.approx(0.96)  # sigma^2 = 5/4
        # sigma^2 = 2/3 for (-1, 0, 1): 3 * 1 / (3 * 4/9) = 9/4
        assert hessian_measure_ln_closed([-1.0, 0.0, 1.0]) == pytest.approx(2.25)
        assert hessian_measure_ln_closed([0.0, 2.0]) == 0.0

    def test_unit_variance(self):
        x = np.array([1.0, -1.0, 1.0, -1.0])
        assert hessian_measure_ln_closed(x) == pytest.approx(1.5)
        x = np.array([1.0, -1.0] * 4)
        assert hessian_measure_ln_closed(x) == pytest.approx(3 * 6 / 8)

    def test_groups_of_two_vanish(self):
        assert hessian_measure_lng_closed([1.0, 3.0, -2.0, 5.0], 2) == 0.0

    def test_scaling(self):
        x = SplitMix64(1).normal(8)
        assert hessian_measure_ln_closed(2 * x) == pytest.approx(hessian_measure_ln_closed(x) / 16)
        assert hessian_measure_ln_closed(x + 7.0) == pytest.approx(hessian_measure_ln_closed(x))

    def test_single_group_is_ln(self):
        x = SplitMix64(2).normal(12)
        assert hessian_measure_lng_closed(x, 1) == hessian_measure_ln_closed(x)

    def test_group_sum(self):
        x = SplitMix64(3).normal(12)
        parts = x.reshape(3, 4)
        want = sum(hessian_measure_ln_closed(p) for p in parts)
        assert hessian_measure_lng_closed(x, 3) == pytest.approx(want)

    def test_errors(self):
        with pytest.raises(ShapeError):
            hessian_measure_lng_closed(np.ones(6), 4)
        with pytest.raises(DegenerateInputError):
            hessian_measure_lng_closed(np.ones(6), 6)
        with pytest.raises(DegenerateInputError):
            hessian_measure_ln_closed(np.ones(5))


class TestFiniteDifference:
    @pytest.mark.parametrize("d", [3, 4, 6])
    def test_matches_loop_oracle(self, d):
        x = SplitMix64(d).normal(d)
        h = 1e-4
        assert hessian_measure_fd(x, 1, h) == pytest.approx(oracle_fd(ln, x, h), rel=1e-6)

    @pytest.mark.parametrize("d", [3, 5, 8])
    def test_matches_closed(self, d):
        for seed in range(5):
            x = SplitMix64(100 * d + seed).normal(d)
            assert hessian_measure_fd(x) == pytest.approx(hessian_measure_ln_closed(x), rel=1e-3)

    def test_grouped(self):
        x = SplitMix64(9).normal(12)
        for g in (1, 2, 3, 4):
            assert hessian_measure_fd(x, g) == pytest.approx(hessian_measure_lng_closed(x, g), rel=1e-3)

    def test_d2_is_near_zero(self):
        assert hessian_measure_fd([0.3, 1.7]) < 1e-6

    def test_step_default(self):
        x = np.array([0.0, 1.0, 3.0])
        assert default_step(x) == pytest.approx(4e-4)
        tight = np.array([0.0, 1e-3, 2e-3, 100.0, 101.0, 102.0])
        assert default_step(tight, 2) == pytest.approx(1e-3 * np.std([0, 1e-3, 2e-3]))

    def test_large_step_warns(self):
        with pytest.warns(IllConditionedStepWarning):
            hessian_measure_fd([0.0, 1.0, 2.0], h=0.5)

    def test_default_step_quiet(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            hessian_measure_fd(SplitMix64(4).normal(16), 4)

    def test_bad_step(self):
        with pytest.raises(ValueError):
            hessian_measure_fd([0.0, 1.0, 2.0], h=0.0)


class TestRatios:
    def test_undefined(self):
        with pytest.raises(UndefinedRatioError):
            group_ratio_report([0.0, 1.0], 1)
        with pytest.raises(UndefinedRatioError):
            group_ratios_closed(np.ones((2, 3)), 1)

    def test_report_fields(self):
        x = SplitMix64(5).normal(16)
        rep = group_ratio_report(x, 4)
        assert rep.ratio == pytest.approx(rep.h_group / rep.h_layer)
        assert rep.inverse_quartic_ok and rep.variance_split_ok
        assert rep.report.group_count == 4 and rep.report.group_size == 4
        assert rep.report.rel_err < 1e-3
        assert set(rep.to_dict()) >= {"ratio", "report"}

    def test_vectorized_matches_scalar(self):
        X = SplitMix64(6).normal(16 * 50).reshape(16, 50)
        r = group_ratios_closed(X, 4)
        for k in range(50):
            assert r[k] == pytest.approx(group_ratio_report(X[:, k], 4).ratio)

    def test_report_variances(self):
        x = np.arange(8.0)
        rep = nonlinearity_report(x, 2)
        np.testing.assert_allclose(rep.per_group_variances, group_variances(x, 2))
        assert rep.global_variance == pytest.approx(np.var(x))


vectors = arrays(np.float64, 16, elements=st.floats(-10, 10, allow_nan=False))


@settings(max_examples=200, deadline=None)
@given(vectors)
def test_variance_split(x):
    parts = x.reshape(4, 4)
    if np.min(parts.std(axis=1)) < 1e-3:
        return
    assert np.var(x) >= parts.var(axis=1).mean() - 1e-9


@settings(max_examples=200, deadline=None)
@given(vectors, st.sampled_from([2, 4]))
def test_inverse_quartic(x, g):
    parts = x.reshape(g, -1)
    if np.min(parts.std(axis=1)) < 1e-3:
        return
    rep = group_ratio_report(x, g)
    assert rep.inverse_quartic_ok and rep.variance_split_ok


def test_group_ratio_above_one_on_average():
    X = SplitMix64(7).normal(16 * 1000).reshape(16, 1000)
    assert group_ratios_closed(X, 2).min() >= 1
    assert group_ratios_closed(X, 4).min() >= 2
