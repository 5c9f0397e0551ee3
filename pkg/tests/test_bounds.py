import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from codecselect import (
    BoundMethod,
    BoundViolationError,
    CriterionMatrix,
    DomainError,
    InsufficientSamplesError,
    ParameterError,
    build_rectangle,
    emd,
    emd_raw,
    empirical_variance_estimate,
    epsilon_asymptotic_emd,
    epsilon_finite_emd,
    epsilon_gaussian_chernoff,
    epsilon_hoeffding,
    hoeffding_dominates,
    hoeffding_dominates_asymptotic_exact,
    variance_interval,
)
from codecselect.bounds import compare_bounds, emd_values

from .oracles import bessel_variance, emd_bruteforce


def one_criterion(*rows):
    return CriterionMatrix.from_array(np.array(rows, dtype=float)[:, None, :])


class TestEmd:
    def test_constant_is_zero(self):
        assert emd(one_criterion([0.5] * 4), "c0") == 0.0

    def test_hand_enumeration(self):
        mat = one_criterion([0.2, 0.8, 0.4, 0.6], [0.5] * 4)
        assert emd(mat, "c0") == pytest.approx(0.2)

    def test_clamped_at_zero(self):
        mat = one_criterion([1.0, 0.0])
        assert emd_raw(mat, "c0") == pytest.approx(-0.5)
        assert emd(mat, "c0") == 0.0

    def test_odd_sample_drops_last(self):
        assert emd(one_criterion([0.0, 1.0, 123.0]), "c0") == pytest.approx(0.5)

    def test_needs_two_samples(self):
        with pytest.raises(InsufficientSamplesError):
            emd(one_criterion([0.3]), "c0")

    @given(
        st.integers(1, 4).flatmap(
            lambda h: st.integers(2, 9).flatmap(
                lambda m: st.lists(st.lists(st.floats(-5, 5), min_size=m, max_size=m), min_size=h, max_size=h)
            )
        )
    )
    @settings(max_examples=100, deadline=None)
    def test_matches_bruteforce(self, rows):
        assert emd_values(np.array(rows)) == pytest.approx(emd_bruteforce(rows), abs=1e-12)

    @given(
        st.lists(st.lists(st.floats(0, 1), min_size=6, max_size=6), min_size=1, max_size=4),
        st.lists(st.floats(-3, 3), min_size=4, max_size=4),
    )
    @settings(max_examples=100, deadline=None)
    def test_offset_invariance(self, rows, offsets):
        shifted = [[x + o for x in row] for row, o in zip(rows, offsets)]
        assert emd_values(np.array(shifted)) == pytest.approx(emd_values(np.array(rows)), abs=1e-9)


class TestEpsilons:
    def test_finite_emd_table_anchor(self):
        eps = epsilon_finite_emd(0.0, 16000, 2, 0.01)
        assert eps == pytest.approx(0.04105, abs=5e-6)
        assert 2 * eps == pytest.approx(0.082, abs=5e-4)

    def test_finite_emd_closed_form(self):
        assert epsilon_finite_emd(0.05, 200, 2, 0.01) == pytest.approx(0.467162, abs=1e-6)

    def test_finite_emd_sqrt_scaling(self):
        eta = lambda m: epsilon_finite_emd(0.0, m, 2, 0.01)
        assert eta(800) == pytest.approx(eta(200) / 2)

    def test_hoeffding_table_anchor(self):
        eps = epsilon_hoeffding(16000, 13, 2, 0.01)
        assert eps == pytest.approx(0.016352, abs=1e-6)
        assert 0.031 <= 2 * eps <= 0.034

    def test_hoeffding_unit(self):
        assert epsilon_hoeffding(1, 1, 1, 2 / math.e**2) == pytest.approx(1.0)

    def test_hoeffding_sqrt_scaling(self):
        assert epsilon_hoeffding(400, 3, 2, 0.1) == pytest.approx(epsilon_hoeffding(100, 3, 2, 0.1) / 2)

    def test_gaussian_chernoff(self):
        assert epsilon_gaussian_chernoff(0.0, 50, 3, 2, 0.01) == 0.0
        assert epsilon_gaussian_chernoff(0.5, 50, 3, 2, 0.01) == pytest.approx(epsilon_hoeffding(50, 3, 2, 0.01))
        eps = epsilon_gaussian_chernoff(0.107, 16000, 13, 2, 0.01)
        assert eps == pytest.approx(0.0035, abs=5e-5)
        assert 2 * eps == pytest.approx(0.007, abs=5e-4)

    def test_asymptotic(self):
        assert epsilon_asymptotic_emd(0.0, 0.0, 100, 1, 0.05) == 0.0
        assert epsilon_asymptotic_emd(0.1, 0.0, 77, 3, 0.05) == pytest.approx(0.141421, abs=1e-6)
        assert epsilon_asymptotic_emd(0.01, 0.02, 3200, 2, 0.01, tails="two") == pytest.approx(0.035730, abs=1e-6)

    def test_asymptotic_one_tail_narrower(self):
        one = epsilon_asymptotic_emd(0.0, 0.1, 500, 1, 0.05, tails="one")
        two = epsilon_asymptotic_emd(0.0, 0.1, 500, 1, 0.05, tails="two")
        assert two / one == pytest.approx(math.sqrt(math.log(3 / 0.05) / math.log(2 / 0.05)))

    @pytest.mark.parametrize("delta", [0.0, 1.0, 1.5, -0.1])
    def test_delta_validation(self, delta):
        with pytest.raises(ParameterError):
            epsilon_hoeffding(10, 2, 2, delta)
        with pytest.raises(ParameterError):
            epsilon_finite_emd(0.0, 10, 2, delta)

    def test_negative_sigma(self):
        with pytest.raises(ParameterError):
            epsilon_gaussian_chernoff(-0.1, 10, 2, 2, 0.1)

    @given(
        st.integers(2, 10_000),
        st.integers(1, 50),
        st.integers(1, 6),
        st.floats(0.001, 0.5),
        st.floats(0, 1),
        st.floats(0, 0.5),
    )
    @settings(max_examples=200, deadline=None)
    def test_monotonicity(self, m, n_h, n_c, delta, sigma_hat, d):
        fns = [
            lambda m, delta: epsilon_finite_emd(d, m, n_c, delta),
            lambda m, delta: epsilon_hoeffding(m, n_h, n_c, delta),
            lambda m, delta: epsilon_asymptotic_emd(d, 2 * sigma_hat**2 + 0.01, m, n_c, delta),
            lambda m, delta: epsilon_gaussian_chernoff(sigma_hat + 0.01, m, n_h, n_c, delta),
        ]
        for f in fns:
            assert f(m + 1, delta) < f(m, delta)
            assert f(m, delta / 2) > f(m, delta)
        gc = epsilon_gaussian_chernoff(sigma_hat, m, n_h, n_c, delta)
        hf = epsilon_hoeffding(m, n_h, n_c, delta)
        assert gc == pytest.approx(2 * sigma_hat * hf)
        if sigma_hat < 0.5:
            assert gc < hf


class TestVariance:
    def test_constant(self):
        est = empirical_variance_estimate(one_criterion([0.3] * 5), "c0")
        assert est.sigma_sq == 0.0 and est.per_codec == {"h0": 0.0}

    def test_two_points(self):
        est = empirical_variance_estimate(one_criterion([0.0, 1.0]), "c0")
        assert est.per_codec["h0"] == pytest.approx(0.5)
        assert est.sigma_sq == pytest.approx(1.0)

    def test_max_over_codecs(self):
        est = empirical_variance_estimate(one_criterion([0.0, 1.0], [0.5, 0.5]), "c0")
        assert est.sigma_sq == pytest.approx(1.0)

    @given(st.lists(st.lists(st.floats(-3, 3), min_size=5, max_size=5), min_size=1, max_size=4))
    @settings(max_examples=50, deadline=None)
    def test_bessel_bruteforce(self, rows):
        est = empirical_variance_estimate(one_criterion(*rows), "c0")
        assert est.sigma_sq == pytest.approx(2 * max(bessel_variance(r) for r in rows), abs=1e-9)

    def test_interval_examples(self):
        assert variance_interval((0.25, 0.25), (0.5, 0.5)) == (0.0, 0.0)
        lo, hi = variance_interval((0.3, 0.4), (0.5, 0.55))
        assert lo == 0.0 and hi == pytest.approx(0.15)
        lo, hi = variance_interval((0.5, 0.6), (0.0, 0.2))
        assert lo == pytest.approx(0.46) and hi == pytest.approx(0.6)

    def test_inconsistent_intervals(self):
        with pytest.raises(BoundViolationError):
            variance_interval((0.0, 0.1), (0.5, 0.6))

    @given(
        st.lists(st.floats(0, 1), min_size=3, max_size=30),
        st.floats(0, 0.2), st.floats(0, 0.2), st.floats(0, 0.2), st.floats(0, 0.2),
    )
    @settings(max_examples=100, deadline=None)
    def test_contains_true_variance(self, xs, a, b, c, d):
        # population moments of an empirical distribution play the true values
        mean = sum(xs) / len(xs)
        mean_sq = sum(x * x for x in xs) / len(xs)
        var = max(0.0, mean_sq - mean * mean)
        lo, hi = variance_interval((mean_sq - a, mean_sq + b), (mean - c, mean + d))
        assert lo - 1e-12 <= var <= hi + 1e-12


class TestDominance:
    def test_finite_cases(self):
        assert hoeffding_dominates(BoundMethod.FINITE_SAMPLE_EMD, 13, 0.01)
        assert not hoeffding_dominates(BoundMethod.FINITE_SAMPLE_EMD, 1e19, 0.01)
        for delta in (0.01, 0.5, 0.99):
            assert hoeffding_dominates("finite-emd", 1, delta)

    def test_asymptotic_requires_sigma(self):
        from codecselect import ConfigurationError

        with pytest.raises(ConfigurationError):
            hoeffding_dominates(BoundMethod.ASYMPTOTIC_EMD, 13, 0.01)

    @given(st.floats(0.01, 2.0), st.floats(0.001, 0.5), st.floats(0, 60))
    @settings(max_examples=200, deadline=None)
    def test_printed_asymptotic_threshold_implies_exact(self, sigma, delta, log_h):
        n_h = math.exp(log_h)
        if hoeffding_dominates(BoundMethod.ASYMPTOTIC_EMD, n_h, delta, sigma=sigma):
            assert hoeffding_dominates_asymptotic_exact(n_h, delta, sigma)

    @given(st.floats(0.01, 2.0), st.floats(0.001, 0.5), st.integers(1, 10**6), st.integers(2, 10**5))
    @settings(max_examples=200, deadline=None)
    def test_exact_asymptotic_predicate_matches_widths(self, sigma, delta, n_h, m):
        hoeff = epsilon_hoeffding(m, n_h, 1, delta)
        asym = epsilon_asymptotic_emd(0.0, sigma**2, m, 1, delta)
        if hoeffding_dominates_asymptotic_exact(n_h, delta, sigma):
            assert hoeff <= asym * (1 + 1e-12)
        else:
            assert hoeff >= asym * (1 - 1e-12)

    def test_compare_bounds_table_row(self):
        res = compare_bounds(16000, 13, 2, 0.01)
        w = res["widths"]
        assert w[BoundMethod.FINITE_SAMPLE_EMD] == pytest.approx(0.0821, abs=5e-4)
        assert 0.031 <= w[BoundMethod.HOEFFDING_UNION] <= 0.034
        assert w[BoundMethod.GAUSSIAN_CHERNOFF_UNION] == 0.0
        assert res["hoeffding_dominates_finite_emd"]


class TestBuildRectangle:
    def test_constant_gaussian_chernoff_is_point(self):
        mat = CriterionMatrix.from_array(np.full((3, 2, 10), 0.5))
        rect = build_rectangle(mat, BoundMethod.GAUSSIAN_CHERNOFF_UNION, 0.05)
        assert np.all(rect.lo == 0.5) and np.all(rect.hi == 0.5)

    def test_hoeffding_hand_example(self):
        mat = one_criterion([0.2, 0.8, 0.4, 0.6], [0.5] * 4)
        rect = build_rectangle(mat, BoundMethod.HOEFFDING_UNION, 0.5)
        assert rect.epsilon[0] == pytest.approx(math.sqrt(math.log(8) / 8))
        assert rect.epsilon[0] == pytest.approx(0.5098, abs=1e-4)
        assert rect["h0", "c0"] == (0.0, 1.0)

    def test_finite_emd_large_sample_width(self):
        # 13 codecs of constant values: EMD is exactly 0
        vals = np.tile(np.linspace(0.1, 0.9, 13)[:, None, None], (1, 2, 16000))
        rect = build_rectangle(CriterionMatrix.from_array(vals), BoundMethod.FINITE_SAMPLE_EMD, 0.01)
        assert np.allclose(rect.widths, 0.0821, atol=5e-4)

    def test_unbounded_cell_rejected_by_bounded_methods(self):
        vals = np.full((2, 1, 4), 0.5)
        vals[1, 0, 2] = 1.7
        mat = CriterionMatrix.from_array(vals)
        for method in (BoundMethod.FINITE_SAMPLE_EMD, BoundMethod.HOEFFDING_UNION):
            with pytest.raises(DomainError, match="codec='h1'.*sample='2'"):
                build_rectangle(mat, method, 0.1)
        rect = build_rectangle(mat, BoundMethod.ASYMPTOTIC_EMD, 0.1)
        assert rect.hi[1, 0] > 1.0  # no clipping for asymptotic methods

    def test_budget_slots_divide_delta(self):
        rng = np.random.default_rng(0)
        mat = CriterionMatrix.from_array(rng.uniform(size=(3, 2, 50)))
        for method in BoundMethod:
            a = build_rectangle(mat, method, 0.1, budget_slots=4)
            b = build_rectangle(mat, method, 0.025)
            np.testing.assert_allclose(a.epsilon, b.epsilon)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(1)
        vals = rng.uniform(size=(4, 3, 40))
        mat = CriterionMatrix.from_array(vals)
        perm = CriterionMatrix.from_array(vals[::-1][:, ::-1], codec_ids=["h3", "h2", "h1", "h0"],
                                          criterion_ids=["c2", "c1", "c0"])
        for method in BoundMethod:
            a = build_rectangle(mat, method, 0.1)
            b = build_rectangle(perm, method, 0.1)
            np.testing.assert_allclose(a.epsilon, b.epsilon[::-1])
