"""Reproducible experiment drivers and closed-form constructions.

Everything here is deterministic given its inputs: samplers take explicit
seeds or generators, and the quadrature helpers use fixed grids.  The report
objects expose ``to_dict`` with JSON-compatible scalars so the command line
tool can serialize them byte-identically.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import binom

from oodlab.alternatives import (
    level_set_collapse,
    LevelSetCollapseSpec,
    probability_level_sets,
    quadrant_fold,
    radial_collapse,
)
from oodlab.distributions import (
    DiagonalGaussian,
    FiniteDiscrete,
    ProductBernoulli,
    UniformDiscrete,
)
from oodlab.rng import make_rng, split_rng
from oodlab.statistics import (
    DoseLiteStatistic,
    LikelihoodRatioStatistic,
    LogLikelihoodStatistic,
    TypicalityStatistic,
)
from oodlab.testing import (
    OneSidedAbove,
    OneSidedBelow,
    OutsideInterval,
    bayes_error,
    exact_power_and_size,
    ks_critical_value,
    ks_distance,
    roc_and_auc,
)

__all__ = [
    "NonIntegrableRatio",
    "lr_optimal_model",
    "auc_by_quadrature",
    "WrongModelReport",
    "wrong_model_report",
    "EpsilonTransferSpec",
    "EpsilonTransferReport",
    "epsilon_transfer",
    "min_epsilon",
    "TypicalSetSpec",
    "typical_membership",
    "typical_mass",
    "typical_mass_mc",
    "SwapSetReport",
    "swap_set_comparison",
    "ScorePreservationReport",
    "score_preservation_report",
    "LevelSetCaseReport",
    "level_set_report",
    "OverlapBoundReport",
    "overlap_bound_report",
    "best_threshold_accuracy",
]


class NonIntegrableRatio(Exception):
    """The density ratio p/q cannot be normalized into a distribution."""


# ---------------------------------------------------------------------------
# The likelihood-ratio-optimal wrong model
# ---------------------------------------------------------------------------


def lr_optimal_model(p, q):
    """Normalize the density ratio p/q into a distribution.

    The returned model scores samples identically (up to a monotone map) to
    the likelihood ratio between p and q, so thresholding its log-likelihood
    is the most powerful test of p against q at every level, even though the
    model itself can be arbitrarily far from p.

    Supported pairs: two :class:`DiagonalGaussian` of equal dimension, two
    :class:`ProductBernoulli` of equal dimension, or two discrete
    distributions over outcome indices.

    Raises
    ------
    NonIntegrableRatio
        If p/q has no finite normalizer: a Gaussian q not strictly wider
        than p in every coordinate, or a discrete q with zero mass somewhere
        inside p's support.
    """
    if isinstance(p, DiagonalGaussian) and isinstance(q, DiagonalGaussian):
        if p.dim != q.dim:
            raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
        if not np.all(q.variance > p.variance):
            raise NonIntegrableRatio(
                "the ratio of Gaussian densities is normalizable only when q is "
                "strictly wider than p in every coordinate"
            )
        # Per coordinate, p/q is an unnormalized Gaussian with
        # 1/v = 1/v_p - 1/v_q and mean v * (mu_p / v_p - mu_q / v_q).
        var = p.variance * q.variance / (q.variance - p.variance)
        mean = var * (p.mean / p.variance - q.mean / q.variance)
        return DiagonalGaussian(mean=mean, variance=var)

    if isinstance(p, ProductBernoulli) and isinstance(q, ProductBernoulli):
        if p.dim != q.dim:
            raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
        w1 = p.success_prob / q.success_prob
        w0 = (1.0 - p.success_prob) / (1.0 - q.success_prob)
        return ProductBernoulli(dim=p.dim, success_prob=w1 / (w0 + w1))

    index_types = (FiniteDiscrete, UniformDiscrete)
    if isinstance(p, index_types) and isinstance(q, index_types):
        size = max(p.sample_space[1], q.sample_space[1])
        pp = np.zeros(size)
        qq = np.zeros(size)
        pp[: p.sample_space[1]] = np.exp(p.log_prob(np.arange(p.sample_space[1])))
        qq[: q.sample_space[1]] = np.exp(q.log_prob(np.arange(q.sample_space[1])))
        if np.any((pp > 0) & (qq == 0)):
            raise NonIntegrableRatio("q has zero mass inside p's support")
        ratio = np.zeros(size)
        on = pp > 0
        ratio[on] = pp[on] / qq[on]
        return FiniteDiscrete(ratio / ratio.sum())

    raise ValueError(
        f"unsupported pair: {type(p).__name__} and {type(q).__name__}"
    )


def _weighted_auc(scores_in, w_in, scores_out, w_out):
    """Pr(score_in > score_out) + half the tie mass, under given weights."""
    order = np.argsort(scores_out, kind="stable")
    s_out = scores_out[order]
    cum = np.concatenate([[0.0], np.cumsum(w_out[order])])
    below = cum[np.searchsorted(s_out, scores_in, side="left")]
    upto = cum[np.searchsorted(s_out, scores_in, side="right")]
    return float(np.sum(w_in * (below + 0.5 * (upto - below))))


def auc_by_quadrature(p, q, statistic, points=2**12):
    """Deterministic AUC of a statistic separating p from q.

    For 1-D continuous distributions the score distribution under each side
    is discretized on a dense grid weighted by the density; for index-valued
    distributions the computation is exact over the whole support.

    Parameters
    ----------
    p, q : Distribution
        In-distribution and out-of-distribution sides.
    statistic : FittedStatistic
        Supplies ``evaluate`` and the ``larger_is_in`` orientation.
    points : int
        Grid resolution per side in the continuous case.

    Returns
    -------
    float
    """
    kind_p, size_p = p.sample_space
    kind_q, size_q = q.sample_space
    if kind_p == kind_q == "index":
        idx_p = np.arange(size_p)
        idx_q = np.arange(size_q)
        s_in = np.asarray(statistic.evaluate(idx_p), dtype=np.float64)
        s_out = np.asarray(statistic.evaluate(idx_q), dtype=np.float64)
        w_in = np.exp(p.log_prob(idx_p))
        w_out = np.exp(q.log_prob(idx_q))
    elif kind_p == kind_q == "continuous" and size_p == size_q == 1:
        from oodlab.testing import _continuous_bounds

        grids = []
        for dist in (p, q):
            lo, hi = _continuous_bounds(dist)
            xs = np.linspace(lo[0], hi[0], points)[:, None]
            w = np.exp(dist.log_prob(xs))
            grids.append((np.asarray(statistic.evaluate(xs), dtype=np.float64), w / w.sum()))
        (s_in, w_in), (s_out, w_out) = grids
    else:
        raise ValueError(
            "quadrature AUC supports index spaces or 1-D continuous spaces, "
            f"got {p.sample_space} and {q.sample_space}"
        )
    if not statistic.larger_is_in:
        s_in, s_out = -s_in, -s_out
    return _weighted_auc(s_in, w_in, s_out, w_out)


@dataclass(frozen=True, eq=False)
class WrongModelReport:
    """Monte Carlo comparison of true-model and ratio-model scoring."""

    n: int
    lr_model: object
    auc_true: float
    auc_lr_model: float
    roc_true: object
    roc_lr_model: object

    @property
    def auc_margin(self):
        return self.auc_lr_model - self.auc_true

    def to_dict(self):
        return {
            "n": self.n,
            "lr_model": self.lr_model.to_dict(),
            "auc_true": self.auc_true,
            "auc_lr_model": self.auc_lr_model,
            "auc_margin": self.auc_margin,
        }


def wrong_model_report(p, q, n, rng):
    """Score p-vs-q detection with the true model and with the ratio model.

    Draws ``n`` samples from each side, then computes the AUC obtained by
    thresholding ``log p`` (the true model's likelihood) and by thresholding
    the ratio model's likelihood.  The ratio model is a genuinely wrong
    density for p, yet its AUC dominates.

    Raises
    ------
    NonIntegrableRatio
        Propagated from :func:`lr_optimal_model`.
    """
    if n < 1:
        raise ValueError(f"need at least one sample per side, got {n}")
    model = lr_optimal_model(p, q)
    x = p.sample(rng, n)
    y = q.sample(rng, n)
    stat_true = LogLikelihoodStatistic(p)
    stat_model = LogLikelihoodStatistic(model)
    roc_true = roc_and_auc(stat_true.evaluate(x), stat_true.evaluate(y))
    roc_model = roc_and_auc(stat_model.evaluate(x), stat_model.evaluate(y))
    return WrongModelReport(
        n=int(n),
        lr_model=model,
        auc_true=roc_true.auc,
        auc_lr_model=roc_model.auc,
        roc_true=roc_true,
        roc_lr_model=roc_model,
    )


# ---------------------------------------------------------------------------
# Mass transfer onto a small off-support set
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EpsilonTransferSpec:
    """Move mass ``epsilon`` from a uniform support onto a disjoint set.

    The base distribution is uniform over ``supp_p`` outcomes; the modified
    model keeps ``1 - epsilon`` of the mass spread uniformly there and puts
    ``epsilon`` uniformly on ``supp_q`` fresh outcomes.
    """

    supp_p: int
    supp_q: int
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "supp_p", int(self.supp_p))
        object.__setattr__(self, "supp_q", int(self.supp_q))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        if self.supp_p < 1 or self.supp_q < 1:
            raise ValueError("both support sizes must be at least 1")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie strictly inside (0, 1), got {self.epsilon}")

    def to_dict(self):
        return {"supp_p": self.supp_p, "supp_q": self.supp_q, "epsilon": self.epsilon}


@dataclass(frozen=True)
class EpsilonTransferReport:
    """Closed-form consequences of an :class:`EpsilonTransferSpec`."""

    spec: EpsilonTransferSpec
    oracle_log_lik: float
    model_log_lik_in: float
    log_lik_gap: float
    prob_per_in_element: float
    prob_per_out_element: float
    out_element_outranks_in: bool

    def to_dict(self):
        return {
            "spec": self.spec.to_dict(),
            "oracle_log_lik": self.oracle_log_lik,
            "model_log_lik_in": self.model_log_lik_in,
            "log_lik_gap": self.log_lik_gap,
            "prob_per_in_element": self.prob_per_in_element,
            "prob_per_out_element": self.prob_per_out_element,
            "out_element_outranks_in": self.out_element_outranks_in,
        }


def epsilon_transfer(spec):
    """Evaluate the effect of transferring mass onto off-support outcomes.

    The in-distribution log-likelihood of the modified model is
    ``log(1 - epsilon) - log(supp_p)``, a drop of only ``log(1 - epsilon)``
    nats relative to the oracle, while each off-support outcome receives
    probability ``epsilon / supp_q``.  Whether those outcomes outrank every
    in-support outcome is decided in exact rational arithmetic.
    """
    sp, sq, eps = spec.supp_p, spec.supp_q, spec.epsilon
    oracle_ll = -float(np.log(sp))
    model_ll_in = float(np.log1p(-eps) - np.log(sp))
    per_in = (1.0 - eps) / sp
    per_out = eps / sq
    eps_exact = Fraction(eps)
    outranks = bool(eps_exact / sq > (1 - eps_exact) / sp)
    return EpsilonTransferReport(
        spec=spec,
        oracle_log_lik=oracle_ll,
        model_log_lik_in=model_ll_in,
        log_lik_gap=model_ll_in - oracle_ll,
        prob_per_in_element=per_in,
        prob_per_out_element=per_out,
        out_element_outranks_in=outranks,
    )


def min_epsilon(supp_p, supp_q):
    """Smallest mass transfer that makes off-support outcomes outrank.

    Any ``epsilon`` strictly above ``supp_q / (supp_p + supp_q)`` gives each
    of the ``supp_q`` fresh outcomes more probability than each of the
    ``supp_p`` original ones; anything at or below does not.
    """
    supp_p = int(supp_p)
    supp_q = int(supp_q)
    if supp_p < 1 or supp_q < 1:
        raise ValueError("both support sizes must be at least 1")
    return supp_q / (supp_p + supp_q)


# ---------------------------------------------------------------------------
# Typical sets of product Bernoulli distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TypicalSetSpec:
    """An entropy-typical set of a product Bernoulli distribution.

    Membership: a binary vector of length ``dim`` is typical when the gap
    between its per-coordinate negative log-likelihood and the entropy rate
    is at most ``epsilon`` nats.
    """

    dim: int
    success_prob: float
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "success_prob", float(self.success_prob))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        if self.dim < 1:
            raise ValueError(f"dim must be at least 1, got {self.dim}")
        if not 0.0 < self.success_prob < 1.0:
            raise ValueError(f"success_prob must lie in (0, 1), got {self.success_prob}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")

    def to_dict(self):
        return {"dim": self.dim, "success_prob": self.success_prob, "epsilon": self.epsilon}


def _rate_deviations(ones_counts, spec):
    """|mean NLL - entropy rate| for vectors with the given ones counts.

    For a vector with k ones the gap telescopes to
    ``(k/d - p) * (log(1 - p) - log p)``, which is used directly; the exact
    cancellation at ``k = p * d`` then survives floating point whenever
    ``p * d`` is itself exact.
    """
    k = np.asarray(ones_counts, dtype=np.float64)
    p = spec.success_prob
    slope = np.log1p(-p) - np.log(p)
    return np.abs((k / spec.dim - p) * slope)


def typical_membership(x, spec):
    """Decide typical-set membership of one binary vector (or a batch).

    Parameters
    ----------
    x : array_like, shape (dim,) or (n, dim), entries 0 or 1
    spec : TypicalSetSpec

    Returns
    -------
    bool, or an array of bool for a batch.
    """
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != spec.dim:
        raise ValueError(
            f"expected binary vectors of length {spec.dim}, got shape {np.shape(x)}"
        )
    if arr.size and not np.all((arr == 0.0) | (arr == 1.0)):
        raise ValueError("entries must be 0 or 1")
    inside = _rate_deviations(arr.sum(axis=1), spec) <= spec.epsilon
    return bool(inside[0]) if single else inside


def typical_mass(spec):
    """Exact probability mass of the typical set.

    Sums the binomial law over the ones counts whose rate deviation is
    within ``epsilon``; vectors with equal ones counts are exchangeable, so
    this covers the whole set without enumerating it.
    """
    ks = np.arange(spec.dim + 1)
    inside = _rate_deviations(ks, spec) <= spec.epsilon
    return float(binom.pmf(ks[inside], spec.dim, spec.success_prob).sum())


def typical_mass_mc(spec, n_samples, rng, chunk_size=65536):
    """Monte Carlo estimate of the typical set's mass.

    Draws from the matching product Bernoulli in chunks to bound memory and
    counts membership hits; deterministic given the generator state.
    """
    n_samples = int(n_samples)
    if n_samples < 1:
        raise ValueError(f"need at least one sample, got {n_samples}")
    dist = ProductBernoulli(dim=spec.dim, success_prob=spec.success_prob)
    hits = 0
    remaining = n_samples
    while remaining > 0:
        take = min(int(chunk_size), remaining)
        x = dist.sample(rng, take)
        hits += int(np.count_nonzero(typical_membership(x, spec)))
        remaining -= take
    return hits / n_samples


@dataclass(frozen=True)
class SwapSetReport:
    """Effect of swapping the all-ones vector into the typical set.

    The swap removes one fixed vector with ``3 d / 4`` ones from the typical
    set and adds the all-ones vector, yielding a set of identical
    cardinality.  When ``success_prob > 1/2`` the all-ones vector is the
    more probable of the two, so the swapped set carries strictly more mass
    despite containing the single most extreme point.
    """

    spec: TypicalSetSpec
    prob_all_ones: float
    prob_three_quarters_ones: float
    log_prob_ratio: float
    all_ones_is_typical: bool
    three_quarters_is_typical: bool
    mass_typical_set: float
    mass_after_swap: float
    mass_gain: float

    def to_dict(self):
        return {
            "spec": self.spec.to_dict(),
            "prob_all_ones": self.prob_all_ones,
            "prob_three_quarters_ones": self.prob_three_quarters_ones,
            "log_prob_ratio": self.log_prob_ratio,
            "all_ones_is_typical": self.all_ones_is_typical,
            "three_quarters_is_typical": self.three_quarters_is_typical,
            "mass_typical_set": self.mass_typical_set,
            "mass_after_swap": self.mass_after_swap,
            "mass_gain": self.mass_gain,
        }


def swap_set_comparison(spec):
    """Compare the typical set's mass with its all-ones swap variant.

    Requires ``dim`` divisible by 4 so that the reference vector with three
    quarters of its coordinates set to one exists.  The mass gain is
    computed as the probability difference of the two swapped vectors, which
    avoids catastrophic cancellation between two near-equal set masses.
    """
    if spec.dim % 4 != 0:
        raise ValueError(f"dim must be divisible by 4, got {spec.dim}")
    d = spec.dim
    p = spec.success_prob
    log_p = float(np.log(p))
    log_1mp = float(np.log1p(-p))
    log_prob_all_ones = d * log_p
    log_prob_three_q = (3 * d // 4) * log_p + (d // 4) * log_1mp
    # log ratio telescopes to (d/4) * log(p / (1 - p)).
    log_ratio = (d // 4) * (log_p - log_1mp)

    ones_all = np.float64(d)
    ones_three_q = np.float64(3 * d // 4)
    all_ones_in = bool(_rate_deviations(ones_all, spec) <= spec.epsilon)
    three_q_in = bool(_rate_deviations(ones_three_q, spec) <= spec.epsilon)

    mass = typical_mass(spec)
    prob_all = float(np.exp(log_prob_all_ones))
    prob_three_q = float(np.exp(log_prob_three_q))
    gain = prob_all - prob_three_q
    mass_swapped = mass + gain
    if p > 0.5 and three_q_in and not all_ones_in:
        assert mass_swapped > mass, "swap must gain mass when the all-ones vector dominates"
    return SwapSetReport(
        spec=spec,
        prob_all_ones=prob_all,
        prob_three_quarters_ones=prob_three_q,
        log_prob_ratio=log_ratio,
        all_ones_is_typical=all_ones_in,
        three_quarters_is_typical=three_q_in,
        mass_typical_set=mass,
        mass_after_swap=mass_swapped,
        mass_gain=gain,
    )


# ---------------------------------------------------------------------------
# Score-preserving alternatives against a bivariate standard normal
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ScorePreservationReport:
    """Sampled evidence that folded and collapsed alternatives score like P."""

    n: int
    seed: int
    ks_fold: float
    ks_collapse: float
    ks_critical_0p01: float
    auc_log_lik_fold: float
    auc_log_lik_collapse: float
    auc_typicality_fold: float
    auc_typicality_collapse: float
    auc_typicality_fresh: float
    scores_base: np.ndarray
    scores_fold: np.ndarray
    scores_collapse: np.ndarray

    def to_dict(self):
        return {
            "n": self.n,
            "seed": self.seed,
            "ks_fold": self.ks_fold,
            "ks_collapse": self.ks_collapse,
            "ks_critical_0p01": self.ks_critical_0p01,
            "auc_log_lik_fold": self.auc_log_lik_fold,
            "auc_log_lik_collapse": self.auc_log_lik_collapse,
            "auc_typicality_fold": self.auc_typicality_fold,
            "auc_typicality_collapse": self.auc_typicality_collapse,
            "auc_typicality_fresh": self.auc_typicality_fresh,
        }


def score_preservation_report(n, seed):
    """Draw alternatives by transforming fresh P samples and compare scores.

    The base distribution P is the bivariate standard normal.  Three
    independent P samples of size ``n`` are transformed into: themselves, a
    quadrant-folded set, and a radially collapsed set.  Log-likelihood score
    distributions are compared by the Kolmogorov distance, and a typicality
    statistic fitted on a further independent train split is scored by AUC
    against each alternative (plus a fresh P control).
    """
    if n < 2:
        raise ValueError(f"need n >= 2 samples, got {n}")
    base = DiagonalGaussian(mean=[0.0, 0.0], variance=[1.0, 1.0])
    rng = make_rng(seed)
    streams = split_rng(rng, 5)
    x_base = base.sample(streams[0], n)
    x_fold = quadrant_fold(base.sample(streams[1], n))
    x_collapse = radial_collapse(base.sample(streams[2], n))
    x_fresh = base.sample(streams[3], n)
    x_train = base.sample(streams[4], n)

    loglik = LogLikelihoodStatistic(base)
    s_base = loglik.evaluate(x_base)
    s_fold = loglik.evaluate(x_fold)
    s_collapse = loglik.evaluate(x_collapse)

    typicality = TypicalityStatistic.fit(base, x_train)
    t_base = typicality.evaluate(x_base)
    aucs = {
        name: roc_and_auc(t_base, typicality.evaluate(x), larger_is_in=False).auc
        for name, x in (("fold", x_fold), ("collapse", x_collapse), ("fresh", x_fresh))
    }

    return ScorePreservationReport(
        n=int(n),
        seed=int(seed),
        ks_fold=ks_distance(s_base, s_fold),
        ks_collapse=ks_distance(s_base, s_collapse),
        ks_critical_0p01=ks_critical_value(n, n, 0.01),
        auc_log_lik_fold=roc_and_auc(s_base, s_fold).auc,
        auc_log_lik_collapse=roc_and_auc(s_base, s_collapse).auc,
        auc_typicality_fold=aucs["fold"],
        auc_typicality_collapse=aucs["collapse"],
        auc_typicality_fresh=aucs["fresh"],
        scores_base=s_base,
        scores_fold=s_fold,
        scores_collapse=s_collapse,
    )


# ---------------------------------------------------------------------------
# Discrete level-set reweighting cases
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LevelSetCaseReport:
    """One reweighting factor's worth of level-set collapse diagnostics."""

    lam: float
    tv_distance: float
    max_group_mass_diff: float
    max_abs_power_minus_size: float

    def to_dict(self):
        return {
            "lam": self.lam,
            "tv_distance": self.tv_distance,
            "max_group_mass_diff": self.max_group_mass_diff,
            "max_abs_power_minus_size": self.max_abs_power_minus_size,
        }


def _threshold_grid(scores):
    """Thresholds hitting every distinct below-threshold rejection region."""
    distinct = np.unique(scores)
    mids = 0.5 * (distinct[:-1] + distinct[1:])
    return np.concatenate([[distinct[0] - 1.0], distinct, mids, [distinct[-1] + 1.0]])


def level_set_report(base, target_level_value, subset_a, lambdas):
    """Collapse one level set at several strengths and audit the results.

    For each reweighting factor the report records the total variation
    distance to the base (nonzero: the alternative is genuinely different),
    the worst-case grouped-mass discrepancy over probability level sets, and
    the worst |power - size| over every log-likelihood threshold rule,
    enumerated exhaustively over the finite support.
    """
    reports = []
    scores = base.log_prob(np.arange(base.support_size))
    base_groups = probability_level_sets(base.probs)
    for lam in lambdas:
        spec = LevelSetCollapseSpec(
            base=base, target_level_value=target_level_value, subset_a=tuple(subset_a), lam=lam
        )
        alt = level_set_collapse(spec)
        tv = 0.5 * float(np.abs(alt.probs - base.probs).sum())

        worst_group = 0.0
        for _, idx in base_groups.items():
            diff = abs(float(alt.probs[idx].sum()) - float(base.probs[idx].sum()))
            worst_group = max(worst_group, diff)

        worst_gap = 0.0
        for t in _threshold_grid(scores):
            for rule in (OneSidedBelow(t), OneSidedAbove(t)):
                power, size = exact_power_and_size(base.probs, alt.probs, scores, rule)
                worst_gap = max(worst_gap, abs(float(power) - float(size)))
        reports.append(
            LevelSetCaseReport(
                lam=float(lam),
                tv_distance=tv,
                max_group_mass_diff=worst_group,
                max_abs_power_minus_size=worst_gap,
            )
        )
    return reports


# ---------------------------------------------------------------------------
# The irreducible-error floor under overlapping supports
# ---------------------------------------------------------------------------


def best_threshold_accuracy(in_scores, out_scores):
    """Best achievable empirical accuracy over simple threshold rules.

    Sweeps one-sided rules in both orientations over every distinct score,
    and closed-interval rules (both accept-inside and accept-outside) over a
    quantile grid, assuming balanced classes.

    Returns
    -------
    float in [0.5, 1]
    """
    s_in = np.sort(np.asarray(in_scores, dtype=np.float64))
    s_out = np.sort(np.asarray(out_scores, dtype=np.float64))
    if s_in.size == 0 or s_out.size == 0:
        raise ValueError("both score samples must be nonempty")

    edges = np.unique(np.concatenate([s_in, s_out]))
    # Evaluate CDFs just left of each edge and at +inf.
    grid = np.append(edges, np.inf)
    f_in = np.searchsorted(s_in, grid, side="left") / s_in.size
    f_out = np.searchsorted(s_out, grid, side="left") / s_out.size
    one_sided = 0.5 * f_out + 0.5 * (1.0 - f_in)
    best = float(np.maximum(one_sided, 1.0 - one_sided).max())

    # Interval rules on a quantile grid; max over (lo, hi) pairs of the
    # accuracy of accepting inside [lo, hi].
    qs = np.linspace(0.0, 1.0, 257)
    cut = np.unique(np.quantile(edges, qs))
    c_in = np.searchsorted(s_in, cut, side="right") / s_in.size
    c_out = np.searchsorted(s_out, cut, side="right") / s_out.size
    in_mass = c_in[None, :] - c_in[:, None]
    out_mass = c_out[None, :] - c_out[:, None]
    upper = np.triu_indices(cut.size, k=1)
    inside_acc = 0.5 * in_mass[upper] + 0.5 * (1.0 - out_mass[upper])
    best = max(best, float(np.maximum(inside_acc, 1.0 - inside_acc).max()))
    return best


@dataclass(frozen=True, eq=False)
class OverlapBoundReport:
    """Empirical check that no statistic beats the overlap error floor."""

    n: int
    seed: int
    bayes_error: float
    accuracy_bound: float
    statistic_accuracy: dict
    statistic_auc: dict
    all_within_bound: bool

    def to_dict(self):
        return {
            "n": self.n,
            "seed": self.seed,
            "bayes_error": self.bayes_error,
            "accuracy_bound": self.accuracy_bound,
            "statistic_accuracy": dict(sorted(self.statistic_accuracy.items())),
            "statistic_auc": dict(sorted(self.statistic_auc.items())),
            "all_within_bound": self.all_within_bound,
        }


def overlap_bound_report(p, q, n, seed, train_n=2048, slack=0.01):
    """Pit every shipped statistic against the minimum-error floor.

    Draws ``n`` samples per side, fits each statistic on an independent
    train split from p, and records the best threshold accuracy each
    achieves.  All of them must stay below ``1 - bayes_error(p, q) + slack``
    no matter how the threshold is chosen, as long as the supports overlap.
    """
    if n < 2:
        raise ValueError(f"need n >= 2 samples, got {n}")
    rng = make_rng(seed)
    streams = split_rng(rng, 3)
    x_in = p.sample(streams[0], n)
    x_out = q.sample(streams[1], n)
    x_train = p.sample(streams[2], int(train_n))

    statistics = {
        "log_likelihood": LogLikelihoodStatistic(p),
        "typicality": TypicalityStatistic.fit(p, x_train),
        "likelihood_ratio": LikelihoodRatioStatistic(p, q),
        "dose_lite": DoseLiteStatistic.fit(p, x_train),
    }

    floor = bayes_error(p, q)
    bound = 1.0 - floor + slack
    accuracies = {}
    aucs = {}
    for name, stat in statistics.items():
        s_in = np.asarray(stat.evaluate(x_in), dtype=np.float64)
        s_out = np.asarray(stat.evaluate(x_out), dtype=np.float64)
        accuracies[name] = best_threshold_accuracy(s_in, s_out)
        aucs[name] = roc_and_auc(s_in, s_out, larger_is_in=stat.larger_is_in).auc

    return OverlapBoundReport(
        n=int(n),
        seed=int(seed),
        bayes_error=floor,
        accuracy_bound=bound,
        statistic_accuracy=accuracies,
        statistic_auc=aucs,
        all_within_bound=all(a <= bound for a in accuracies.values()),
    )
