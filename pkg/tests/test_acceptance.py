"""End-to-end acceptance gate.

Every test here exercises one headline behavior at full scale, checks it
against independently derived reference values at a pinned tolerance, and
enforces a wall-clock budget.  Each prints a single line::

    [acceptance] <name>: PASS (1.23s, budget 10s)

Run ``pytest tests/test_acceptance.py -v -s`` to see the lines on a passing
run; without ``-s`` pytest shows them only for failures.

Budgets cover the computation, not interpreter start-up: the heavy imports
(numpy, scipy, matplotlib's SVG backend) are pulled in at module import,
before any timer starts.
"""

import contextlib
import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oodlab.plots  # noqa: F401  (warm the SVG backend outside the timers)
from oodlab import (
    DiagonalGaussian,
    EpsilonTransferSpec,
    FiniteDiscrete,
    LevelSetCollapseSpec,
    LogLikelihoodStatistic,
    OneSidedAbove,
    OneSidedBelow,
    OutsideInterval,
    ProductBernoulli,
    TypicalSetSpec,
    auc_by_quadrature,
    bayes_error,
    cli,
    epsilon_transfer,
    exact_power_and_size,
    level_set_collapse,
    lr_optimal_model,
    make_rng,
    min_epsilon,
    overlap_bound_report,
    probability_level_sets,
    recast_rule,
    roc_and_auc,
    score_preservation_report,
    swap_set_comparison,
    typical_mass,
    typical_mass_mc,
    typical_membership,
    wrong_model_report,
)
from oodlab.training import mle_gradient, mle_objective, nt_gradient, nt_objective

# Reference values computed with independent tooling before the main build.
ORACLE_LOG_LIK = -13.815510557964274  # -ln(10^6)
TABLE_CELLS = ["-13.8155", "-13.8255", "-13.8165", "-13.8156"]
KS_CRITICAL_1E5 = 0.007278954160144188  # 0.01-level, n = m = 10^5
AUC_TRUE_ORACLE = 0.80817143220651  # adaptive quadrature, log p scoring
AUC_LR_ORACLE = 0.8311609820522187  # adaptive quadrature, ratio-model scoring
PHI_MINUS_ONE = 0.15865525393145707  # standard normal CDF at -1
LOG_RATIO_ORACLE = 27.465307216702744  # 25 * ln 3
MASS_EPS0_ORACLE = 0.09179969176683679  # C(100,75) 0.75^75 0.25^25
MASS_EPS01_ORACLE = 0.9724899918186543
MIN_EPSILON_ORACLE = 0.009900990099009901  # 10^4 / (10^6 + 10^4)


@contextlib.contextmanager
def criterion(name, budget_s):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[acceptance] {name}: FAIL")
        raise
    elapsed = time.perf_counter() - start
    line = f"[acceptance] {name}: PASS ({elapsed:.2f}s, budget {budget_s:.0f}s)"
    if elapsed > budget_s:
        print(line.replace("PASS", "FAIL (over budget)"))
        raise AssertionError(f"{name} took {elapsed:.2f}s, budget {budget_s}s")
    print(line)


def test_mass_transfer_table(tmp_path):
    """The CLI table matches the reference cells to four truncated decimals."""
    with criterion("mass-transfer table", budget_s=1.0):
        out = tmp_path / "table1"
        assert cli.main(["table1", "--out", str(out)]) == 0

        lines = (out / "table1.csv").read_text().splitlines()
        cells = [line.split(",")[-1] for line in lines[1:]]
        assert cells == TABLE_CELLS

        report = json.loads((out / "report.json").read_text())
        assert report["results"]["oracle_log_lik"] == pytest.approx(
            ORACLE_LOG_LIK, rel=1e-12
        )


def test_score_preserving_alternatives():
    """Folded and collapsed alternatives are invisible to score-based tests."""
    with criterion("score-preserving alternatives", budget_s=30.0):
        rep = score_preservation_report(n=100000, seed=7)
        assert rep.ks_critical_0p01 == pytest.approx(KS_CRITICAL_1E5, rel=1e-12)
        assert rep.ks_fold < rep.ks_critical_0p01
        assert rep.ks_collapse < rep.ks_critical_0p01
        assert 0.49 <= rep.auc_log_lik_fold <= 0.51
        assert 0.49 <= rep.auc_typicality_fold <= 0.51
        assert 0.49 <= rep.auc_log_lik_collapse <= 0.51
        assert 0.49 <= rep.auc_typicality_collapse <= 0.51


def test_level_set_power_equals_size():
    """Collapsing a level set changes the distribution but no threshold test
    can tell: power equals size exactly, verified in rational arithmetic."""
    with criterion("level-set power equals size", budget_s=1.0):
        base = FiniteDiscrete([0.1, 0.1, 0.1, 0.2, 0.25, 0.25])
        scores = base.log_prob(np.arange(base.support_size))
        p_exact = [Fraction(float(v)) for v in base.probs]
        groups = probability_level_sets(base.probs)

        for lam in (0.25, 0.5, 0.9):
            spec = LevelSetCollapseSpec(
                base=base, target_level_value=0.1, subset_a=(0,), lam=lam
            )
            alt = level_set_collapse(spec)
            assert len(spec.level_set) == 3

            # The alternative is genuinely different from the base.
            assert np.abs(alt.probs - base.probs).max() > 1e-3

            # Grouped masses agree to 1e-12 in floating point.
            for idx in groups.values():
                assert abs(alt.probs[idx].sum() - base.probs[idx].sum()) <= 1e-12

            # Exact reconstruction of the collapsed masses: the level set's
            # total is redistributed as lam-weighted shares, all in Fractions.
            lam_f = Fraction(float(lam))
            level = list(spec.level_set)
            in_a = set(spec.subset_a)
            mass_level = sum(p_exact[i] for i in level)
            weight = lam_f * len(in_a) + (len(level) - len(in_a))
            q_exact = list(p_exact)
            for i in level:
                share = lam_f if i in in_a else Fraction(1)
                q_exact[i] = mass_level * share / weight
            assert sum(q_exact) == sum(p_exact)

            # The shipped float output is exactly the rounded rational.
            for i, q_f in enumerate(q_exact):
                assert float(q_f) == float(alt.probs[i])

            # Exhaustive: every one-sided threshold rule in either direction
            # has power exactly equal to size, as exact rationals.
            thresholds = np.concatenate([np.unique(scores), [scores.max() + 1.0]])
            for t in thresholds:
                for rule in (OneSidedBelow(float(t)), OneSidedAbove(float(t))):
                    power, size = exact_power_and_size(p_exact, q_exact, scores, rule)
                    assert power == size
                    canon = recast_rule(rule)
                    power_c, size_c = exact_power_and_size(p_exact, q_exact, scores, canon)
                    assert (power_c, size_c) == (power, size)


def test_wrong_model_dominates():
    """A deliberately wrong density outscores the true model at detection."""
    with criterion("wrong model dominates", budget_s=10.0):
        p = DiagonalGaussian(mean=[0.0], variance=[1.0])
        q = DiagonalGaussian(mean=[2.0], variance=[4.0])

        model = lr_optimal_model(p, q)
        assert model.mean[0] == pytest.approx(-2.0 / 3.0, abs=1e-12)
        assert model.variance[0] == pytest.approx(4.0 / 3.0, abs=1e-12)

        # Deterministic quadrature references, pinned to frozen values.
        quad_true = auc_by_quadrature(p, q, LogLikelihoodStatistic(p), points=2**13)
        quad_lr = auc_by_quadrature(p, q, LogLikelihoodStatistic(model), points=2**13)
        assert quad_true == pytest.approx(AUC_TRUE_ORACLE, abs=1e-4)
        assert quad_lr == pytest.approx(AUC_LR_ORACLE, abs=1e-4)

        rep = wrong_model_report(p, q, n=100000, rng=make_rng(7))
        assert abs(rep.auc_true - quad_true) <= 0.005
        assert abs(rep.auc_lr_model - quad_lr) <= 0.005
        assert rep.auc_margin > 0


def test_overlap_error_floor():
    """No statistic, at any threshold, beats the support-overlap floor."""
    with criterion("support-overlap error floor", budget_s=30.0):
        p = DiagonalGaussian(mean=[0.0], variance=[1.0])
        q = DiagonalGaussian(mean=[2.0], variance=[1.0])
        assert bayes_error(p, q) == pytest.approx(PHI_MINUS_ONE, abs=1e-4)

        rep = overlap_bound_report(p, q, n=100000, seed=7)
        assert rep.all_within_bound
        assert len(rep.statistic_accuracy) == 4
        for name, acc in rep.statistic_accuracy.items():
            assert acc <= 1.0 - rep.bayes_error + 0.01, name


def test_bernoulli_typicality():
    """The most probable vector sits outside the narrow typical set, and
    swapping it in gains mass."""
    with criterion("product Bernoulli typical set", budget_s=10.0):
        narrow = TypicalSetSpec(dim=100, success_prob=0.75, epsilon=0.1)
        wide = TypicalSetSpec(dim=100, success_prob=0.75, epsilon=0.3)
        all_ones = np.ones(100)
        assert typical_membership(all_ones, narrow) is False
        assert typical_membership(all_ones, wide) is True

        swap = swap_set_comparison(narrow)
        assert abs(swap.log_prob_ratio - LOG_RATIO_ORACLE) <= 1e-12
        assert swap.mass_gain > 0
        assert swap.mass_gain == swap.prob_all_ones - swap.prob_three_quarters_ones
        assert swap.mass_after_swap == swap.mass_typical_set + swap.mass_gain

        zero_eps = TypicalSetSpec(dim=100, success_prob=0.75, epsilon=0.0)
        assert typical_mass(zero_eps) == pytest.approx(MASS_EPS0_ORACLE, rel=1e-12)
        exact = typical_mass(narrow)
        assert exact == pytest.approx(MASS_EPS01_ORACLE, rel=1e-12)

        mc = typical_mass_mc(narrow, n_samples=10**6, rng=make_rng(7))
        assert abs(mc - exact) <= 0.002


def test_clamped_pushdown_training(tmp_path):
    """Push-down training separates held-out OOD bins on every seed while
    giving up almost no in-distribution likelihood, and both objectives'
    gradients check out against finite differences."""
    with criterion("clamped push-down training", budget_s=20.0):
        out = tmp_path / "nt"
        assert cli.main(["nt-train", "--out", str(out)]) == 0
        results = json.loads((out / "report.json").read_text())["results"]

        assert len(results["per_seed"]) == 5
        assert results["all_nt_auc_one"] is True
        for row in results["per_seed"]:
            assert row["auc_nt"] == 1.0
            assert row["ll_gap"] <= 0.05

        # Finite-difference check of both objectives at random logits.
        rng = np.random.default_rng(123)
        freq_in = rng.dirichlet(np.ones(64))
        freq_ood = rng.dirichlet(np.ones(64))
        clamp = math.log(1e-9)
        h = 1e-6
        for trial in range(2):
            theta = rng.normal(scale=1.5, size=64)
            for objective, gradient in (
                (lambda th: mle_objective(th, freq_in), lambda th: mle_gradient(th, freq_in)),
                (
                    lambda th: nt_objective(th, freq_in, freq_ood, clamp),
                    lambda th: nt_gradient(th, freq_in, freq_ood, clamp),
                ),
            ):
                analytic = gradient(theta)
                numeric = np.empty_like(theta)
                for k in range(theta.size):
                    bumped = theta.copy()
                    bumped[k] += h
                    hi = objective(bumped)
                    bumped[k] -= 2 * h
                    lo = objective(bumped)
                    numeric[k] = (hi - lo) / (2 * h)
                scale = np.maximum(np.abs(analytic), 1e-3)
                assert np.max(np.abs(analytic - numeric) / scale) <= 1e-6


# ---------------------------------------------------------------------------
# Criterion 8: property suites
# ---------------------------------------------------------------------------


@given(
    ins=st.lists(st.integers(-20, 20), min_size=1, max_size=30),
    outs=st.lists(st.integers(-20, 20), min_size=1, max_size=30),
)
@settings(max_examples=100, deadline=None)
def _auc_monotone_invariance(ins, outs):
    a = np.asarray(ins, dtype=np.float64)
    b = np.asarray(outs, dtype=np.float64)
    base = roc_and_auc(a, b)
    assert roc_and_auc(2.0 * a, 2.0 * b).auc == base.auc
    assert roc_and_auc(np.exp(a / 4.0), np.exp(b / 4.0)).auc == base.auc
    flipped = roc_and_auc(-a, -b, larger_is_in=False)
    assert flipped.auc == base.auc


@given(weights=st.lists(st.floats(0.01, 10.0), min_size=1, max_size=30))
@settings(max_examples=50, deadline=None)
def _discrete_normalization(weights):
    w = np.asarray(weights)
    d = FiniteDiscrete(w / w.sum())
    total = np.exp(d.log_prob(np.arange(d.support_size))).sum()
    assert total == pytest.approx(1.0, abs=1e-12)


@given(dim=st.integers(1, 10), prob=st.floats(0.05, 0.95))
@settings(max_examples=40, deadline=None)
def _bernoulli_normalization(dim, prob):
    import itertools

    d = ProductBernoulli(dim=dim, success_prob=prob)
    atoms = np.array(list(itertools.product([0, 1], repeat=dim)), dtype=np.float64)
    assert np.exp(d.log_prob(atoms)).sum() == pytest.approx(1.0, abs=1e-10)


@given(
    quarter_dim=st.integers(1, 50),
    prob=st.floats(0.05, 0.95),
    eps_a=st.floats(0.0, 0.5),
    eps_b=st.floats(0.0, 0.5),
)
@settings(max_examples=100, deadline=None)
def _typical_mass_monotone(quarter_dim, prob, eps_a, eps_b):
    lo, hi = sorted((eps_a, eps_b))
    dim = 4 * quarter_dim
    assert typical_mass(TypicalSetSpec(dim, prob, lo)) <= (
        typical_mass(TypicalSetSpec(dim, prob, hi)) + 1e-12
    )


@given(
    supp_p=st.integers(1, 10**6),
    supp_q=st.integers(1, 10**6),
    epsilon=st.floats(1e-9, 1.0, exclude_max=True),
)
@settings(max_examples=200, deadline=None)
def _outranking_equivalence(supp_p, supp_q, epsilon):
    rep = epsilon_transfer(EpsilonTransferSpec(supp_p, supp_q, epsilon))
    assert rep.out_element_outranks_in == (
        Fraction(epsilon) > Fraction(supp_q, supp_p + supp_q)
    )


finite_floats = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(
    bounds=st.tuples(finite_floats, finite_floats),
    scores=st.lists(finite_floats, min_size=1, max_size=30),
)
@settings(max_examples=100, deadline=None)
def _recast_equivalence(bounds, scores):
    lo, hi = sorted(bounds)
    s = np.asarray(scores)
    for rule in (OneSidedBelow(lo), OneSidedAbove(hi), OutsideInterval(lo, hi)):
        assert np.array_equal(recast_rule(rule).rejects(s), rule.rejects(s))


def test_property_suites():
    """Invariance and equivalence laws hold across generated inputs."""
    with criterion("property suites", budget_s=60.0):
        _auc_monotone_invariance()
        _discrete_normalization()
        _bernoulli_normalization()

        # Continuous normalization, deterministic quadrature spot checks.
        for mean, var in ((0.0, 1.0), (-3.0, 0.25), (2.0, 9.0)):
            d = DiagonalGaussian([mean], [var])
            span = 10.0 * math.sqrt(var)
            xs = np.linspace(mean - span, mean + span, 2**13)[:, None]
            total = np.trapezoid(np.exp(d.log_prob(xs)), xs[:, 0])
            assert total == pytest.approx(1.0, abs=1e-6)

        _typical_mass_monotone()
        _outranking_equivalence()
        _recast_equivalence()

        # Epsilon grid around the outranking threshold, as floats.
        for sp, sq in ((10**6, 10**4), (1000, 10), (7, 5)):
            thr = min_epsilon(sp, sq)
            for rel in (-1e-3, -1e-6, 1e-6, 1e-3):
                eps = thr * (1.0 + rel)
                rep = epsilon_transfer(EpsilonTransferSpec(sp, sq, eps))
                assert rep.out_element_outranks_in == (eps > thr)
