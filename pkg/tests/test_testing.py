from fractions import Fraction

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from oodlab import (
    DiagonalGaussian,
    FiniteDiscrete,
    Mixture,
    OneSidedAbove,
    OneSidedBelow,
    OutsideInterval,
    ProductBernoulli,
    RocResult,
    UniformDiscrete,
    bayes_error,
    exact_power_and_size,
    ks_critical_value,
    ks_distance,
    make_rng,
    power_at_size,
    recast_rule,
    roc_and_auc,
)

finite_floats = st.floats(allow_nan=False, allow_infinity=False, width=64)


class TestRecastRule:
    def test_below_is_identity(self):
        rule = OneSidedBelow(2.0)
        canon = recast_rule(rule)
        scores = np.array([1.0, 2.0, 3.0])
        assert_array_equal(rule.rejects(scores), [True, False, False])
        assert_array_equal(canon.rejects(scores), rule.rejects(scores))

    def test_above_is_negation(self):
        rule = OneSidedAbove(2.0)
        canon = recast_rule(rule)
        scores = np.array([1.0, 2.0, 3.0])
        assert_array_equal(rule.rejects(scores), [False, False, True])
        assert_array_equal(canon.rejects(scores), rule.rejects(scores))

    def test_interval_keeps_closed_endpoints(self):
        rule = OutsideInterval(1.0, 3.0)
        canon = recast_rule(rule)
        scores = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
        assert_array_equal(rule.rejects(scores), [True, False, False, False, True])
        assert_array_equal(canon.rejects(scores), rule.rejects(scores))

    def test_interval_boundary_ulps(self):
        """One ulp past either endpoint flips the decision in both forms."""
        lo, hi = 0.1, 0.3
        rule = OutsideInterval(lo, hi)
        canon = recast_rule(rule)
        probes = np.array(
            [
                np.nextafter(lo, -np.inf),
                lo,
                np.nextafter(lo, np.inf),
                np.nextafter(hi, -np.inf),
                hi,
                np.nextafter(hi, np.inf),
            ]
        )
        assert_array_equal(rule.rejects(probes), [True, False, False, False, False, True])
        assert_array_equal(canon.rejects(probes), rule.rejects(probes))

    def test_degenerate_interval(self):
        rule = OutsideInterval(2.0, 2.0)
        canon = recast_rule(rule)
        scores = np.array([1.9, 2.0, 2.1])
        assert_array_equal(rule.rejects(scores), [True, False, True])
        assert_array_equal(canon.rejects(scores), rule.rejects(scores))

    def test_interval_order_validated(self):
        with pytest.raises(ValueError):
            OutsideInterval(3.0, 1.0)

    def test_unknown_rule_type(self):
        with pytest.raises(TypeError):
            recast_rule("below 3")

    @given(
        threshold=finite_floats,
        scores=st.lists(finite_floats, min_size=1, max_size=50),
        kind=st.sampled_from(["below", "above"]),
    )
    @settings(max_examples=200, deadline=None)
    def test_one_sided_recast_agrees_everywhere(self, threshold, scores, kind):
        rule = OneSidedBelow(threshold) if kind == "below" else OneSidedAbove(threshold)
        canon = recast_rule(rule)
        s = np.asarray(scores)
        assert_array_equal(canon.rejects(s), rule.rejects(s))

    @given(
        bounds=st.tuples(finite_floats, finite_floats),
        scores=st.lists(finite_floats, min_size=1, max_size=50),
    )
    @settings(max_examples=200, deadline=None)
    def test_interval_recast_agrees_everywhere(self, bounds, scores):
        lo, hi = sorted(bounds)
        rule = OutsideInterval(lo, hi)
        canon = recast_rule(rule)
        s = np.asarray(scores)
        assert_array_equal(canon.rejects(s), rule.rejects(s))


class TestExactPowerAndSize:
    def test_fraction_masses_stay_exact(self):
        p = [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]
        q = [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]
        scores = [1.0, 2.0, 3.0]
        power, size = exact_power_and_size(p, q, scores, OneSidedBelow(2.5))
        assert power == Fraction(3, 4) and size == Fraction(3, 4)
        power, size = exact_power_and_size(p, q, scores, OneSidedAbove(1.5))
        assert power == Fraction(3, 4) and size == Fraction(1, 2)

    def test_empty_rejection_region(self):
        power, size = exact_power_and_size([1.0], [1.0], [0.0], OneSidedBelow(-1.0))
        assert power == 0 and size == 0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            exact_power_and_size([0.5, 0.5], [1.0], [0.0, 1.0], OneSidedBelow(0.5))


class TestRocAndAuc:
    def test_perfect_separation(self):
        roc = roc_and_auc(np.array([2.0, 3.0]), np.array([0.0, 1.0]))
        assert roc.auc == 1.0
        assert roc.power_at_size(0.0) == 1.0

    def test_full_confusion_from_ties(self):
        roc = roc_and_auc(np.array([1.0, 1.0]), np.array([1.0, 1.0]))
        assert roc.auc == 0.5

    def test_identical_score_sets_give_diagonal(self):
        s = np.array([0.0, 1.0, 2.0, 3.0])
        roc = roc_and_auc(s, s.copy())
        assert roc.auc == 0.5
        assert_array_equal(roc.sizes, roc.powers)

    def test_orientation_flip_mirrors_auc(self):
        rng = make_rng(0)
        a = rng.normal(size=100)
        b = rng.normal(size=100) + 1.0
        assert roc_and_auc(a, b).auc == pytest.approx(
            1.0 - roc_and_auc(a, b, larger_is_in=False).auc, abs=1e-12
        )

    def test_auc_matches_pair_counting(self):
        rng = make_rng(1)
        ins = rng.integers(0, 10, size=40).astype(np.float64)
        outs = rng.integers(0, 10, size=30).astype(np.float64)
        wins = (ins[:, None] > outs[None, :]).sum()
        ties = (ins[:, None] == outs[None, :]).sum()
        expected = (wins + 0.5 * ties) / (40 * 30)
        assert roc_and_auc(ins, outs).auc == pytest.approx(expected, rel=1e-14)

    def test_curve_starts_and_ends_at_corners(self):
        rng = make_rng(2)
        roc = roc_and_auc(rng.normal(size=25), rng.normal(size=35))
        assert (roc.sizes[0], roc.powers[0]) == (0.0, 0.0)
        assert (roc.sizes[-1], roc.powers[-1]) == (1.0, 1.0)

    def test_empty_inputs_rejected(self):
        with pytest.raises(ValueError):
            roc_and_auc(np.array([]), np.array([1.0]))

    def test_non_finite_scores_rejected(self):
        with pytest.raises(ValueError):
            roc_and_auc(np.array([np.nan]), np.array([1.0]))

    @given(
        ins=st.lists(st.integers(-20, 20), min_size=1, max_size=40),
        outs=st.lists(st.integers(-20, 20), min_size=1, max_size=40),
    )
    @settings(max_examples=150, deadline=None)
    def test_auc_invariant_under_monotone_transforms(self, ins, outs):
        """Doubling, exponentiating, or negate-and-flip leaves the curve alone."""
        a = np.asarray(ins, dtype=np.float64)
        b = np.asarray(outs, dtype=np.float64)
        base = roc_and_auc(a, b)

        doubled = roc_and_auc(2.0 * a, 2.0 * b)
        assert doubled.auc == base.auc
        assert_array_equal(doubled.sizes, base.sizes)
        assert_array_equal(doubled.powers, base.powers)

        exped = roc_and_auc(np.exp(a / 4.0), np.exp(b / 4.0))
        assert exped.auc == base.auc

        flipped = roc_and_auc(-a, -b, larger_is_in=False)
        assert flipped.auc == base.auc
        assert_array_equal(flipped.sizes, base.sizes)
        assert_array_equal(flipped.powers, base.powers)


class TestPowerAtSize:
    def test_interpolates_conservatively(self):
        s = np.array([0.0, 1.0, 2.0, 3.0])
        roc = roc_and_auc(s, s.copy())
        assert roc.power_at_size(0.5) == 0.5
        assert roc.power_at_size(0.6) == 0.5
        assert roc.power_at_size(1.0) == 1.0

    def test_free_function_matches_method(self):
        rng = make_rng(3)
        roc = roc_and_auc(rng.normal(size=50) + 1, rng.normal(size=50))
        for alpha in (0.0, 0.05, 0.31, 1.0):
            assert power_at_size(roc, alpha) == roc.power_at_size(alpha)

    def test_alpha_out_of_range(self):
        roc = roc_and_auc(np.array([1.0]), np.array([0.0]))
        with pytest.raises(ValueError):
            roc.power_at_size(-0.01)
        with pytest.raises(ValueError):
            roc.power_at_size(1.01)


class TestRocResultValidation:
    def test_rejects_shrinking_sizes(self):
        with pytest.raises(ValueError):
            RocResult(np.array([0.0, 0.5, 0.3, 1.0]), np.array([0.0, 0.5, 0.7, 1.0]), 0.5)

    def test_rejects_bad_endpoints(self):
        with pytest.raises(ValueError):
            RocResult(np.array([0.1, 1.0]), np.array([0.0, 1.0]), 0.5)
        with pytest.raises(ValueError):
            RocResult(np.array([0.0, 1.0]), np.array([0.0, 0.9]), 0.5)

    def test_rejects_inconsistent_area(self):
        with pytest.raises(ValueError):
            RocResult(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 0.75)

    def test_to_dict_is_json_friendly(self):
        roc = roc_and_auc(np.array([1.0, 2.0]), np.array([0.0, 0.5]))
        d = roc.to_dict()
        assert d["auc"] == 1.0
        assert isinstance(d["sizes"], list) and isinstance(d["powers"], list)


class TestBayesError:
    def test_identical_distributions_hit_half(self):
        d = FiniteDiscrete([0.2, 0.3, 0.5])
        assert bayes_error(d, d) == pytest.approx(0.5, abs=1e-15)

    def test_disjoint_supports_hit_zero(self):
        p = FiniteDiscrete([0.5, 0.5, 0.0, 0.0])
        q = FiniteDiscrete([0.0, 0.0, 0.5, 0.5])
        assert bayes_error(p, q) == 0.0

    def test_discrete_supports_may_differ_in_length(self):
        p = FiniteDiscrete([0.5, 0.5])
        q = UniformDiscrete(4)
        assert bayes_error(p, q) == pytest.approx(0.25, abs=1e-15)

    def test_unit_gap_gaussians_match_normal_cdf(self):
        p = DiagonalGaussian([0.0], [1.0])
        q = DiagonalGaussian([2.0], [1.0])
        assert bayes_error(p, q) == pytest.approx(0.15865525393145707, abs=1e-6)

    def test_symmetry(self):
        p = DiagonalGaussian([0.0], [1.0])
        q = DiagonalGaussian([1.5], [3.0])
        assert bayes_error(p, q) == pytest.approx(bayes_error(q, p), abs=1e-12)

    def test_two_dimensional_grid_agrees_with_closed_form(self):
        p = DiagonalGaussian([0.0, 0.0], [1.0, 1.0])
        q = DiagonalGaussian([2.0, 0.0], [1.0, 1.0])
        assert bayes_error(p, q) == pytest.approx(0.15865525393145707, abs=1e-4)

    def test_bernoulli_same_parameter_is_half(self):
        d = ProductBernoulli(dim=16, success_prob=0.3)
        assert bayes_error(d, d) == pytest.approx(0.5, abs=1e-12)

    def test_bernoulli_grouping_matches_enumeration(self):
        import itertools

        p = ProductBernoulli(dim=8, success_prob=0.75)
        q = ProductBernoulli(dim=8, success_prob=0.25)
        atoms = np.array(list(itertools.product([0, 1], repeat=8)), dtype=np.float64)
        brute = 0.5 * np.minimum(np.exp(p.log_prob(atoms)), np.exp(q.log_prob(atoms))).sum()
        assert bayes_error(p, q) == pytest.approx(brute, rel=1e-10)

    def test_bernoulli_high_dimension_stays_finite(self):
        p = ProductBernoulli(dim=2000, success_prob=0.6)
        q = ProductBernoulli(dim=2000, success_prob=0.4)
        err = bayes_error(p, q)
        assert 0.0 <= err < 1e-6

    def test_mixture_versus_component(self):
        a = DiagonalGaussian([0.0], [1.0])
        b = DiagonalGaussian([30.0], [1.0])
        mix = Mixture([a, b], weights=[0.5, 0.5])
        assert bayes_error(a, mix) == pytest.approx(0.25, abs=1e-4)

    def test_mismatched_spaces_rejected(self):
        with pytest.raises(ValueError):
            bayes_error(DiagonalGaussian([0.0], [1.0]), ProductBernoulli(1, 0.5))
        with pytest.raises(ValueError):
            bayes_error(DiagonalGaussian([0.0], [1.0]), DiagonalGaussian([0.0, 0.0], [1.0, 1.0]))


class TestKolmogorovSmirnov:
    def test_identical_samples_have_zero_distance(self):
        x = make_rng(4).normal(size=200)
        assert ks_distance(x, x.copy()) == 0.0

    def test_disjoint_samples_have_unit_distance(self):
        assert ks_distance(np.arange(10.0), np.arange(10.0) + 100.0) == 1.0

    def test_agrees_with_scipy(self):
        rng = make_rng(5)
        a = rng.normal(size=317)
        b = rng.normal(size=211) + 0.3
        expected = scipy.stats.ks_2samp(a, b, method="asymp").statistic
        assert ks_distance(a, b) == pytest.approx(expected, abs=1e-12)

    def test_agrees_with_scipy_under_heavy_ties(self):
        rng = make_rng(6)
        a = rng.integers(0, 5, size=150).astype(np.float64)
        b = rng.integers(0, 5, size=170).astype(np.float64)
        expected = scipy.stats.ks_2samp(a, b, method="asymp").statistic
        assert ks_distance(a, b) == pytest.approx(expected, abs=1e-12)

    def test_critical_value_frozen_cases(self):
        assert ks_critical_value(100000, 100000, alpha=0.01) == pytest.approx(
            0.007278954160144188, rel=1e-12
        )
        assert ks_critical_value(10000, 10000, alpha=0.01) == pytest.approx(
            0.023018074130013652, rel=1e-12
        )

    def test_critical_value_shrinks_with_sample_size(self):
        assert ks_critical_value(10000, 10000, 0.01) < ks_critical_value(100, 100, 0.01)

    def test_same_distribution_passes_at_scale(self):
        rng_a, rng_b = make_rng(7).spawn(2)
        a = rng_a.normal(size=20000)
        b = rng_b.normal(size=20000)
        assert ks_distance(a, b) < ks_critical_value(20000, 20000, alpha=0.01)

    def test_alpha_validated(self):
        for bad in (0.0, 1.0, -0.5):
            with pytest.raises(ValueError):
                ks_critical_value(10, 10, alpha=bad)

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            ks_distance(np.array([]), np.array([1.0]))
