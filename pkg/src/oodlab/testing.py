"""Hypothesis-testing utilities: rejection rules, ROC curves, error bounds.

Scores are canonicalized so that *smaller means reject*: every rejection
rule can be recast as "reject when t(score) < threshold" for a monotone-ish
transform t (:func:`recast_rule`), and ROC computation accepts an
orientation flag instead of requiring callers to pre-negate scores.

AUC is computed by the rank statistic (ties count one half), which equals
the trapezoid area under the (size, power) curve; the :class:`RocResult`
constructor cross-checks the two.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

__all__ = [
    "OneSidedBelow",
    "OneSidedAbove",
    "OutsideInterval",
    "CanonicalRule",
    "recast_rule",
    "RocResult",
    "roc_and_auc",
    "power_at_size",
    "exact_power_and_size",
    "bayes_error",
    "ks_distance",
    "ks_critical_value",
]


# ---------------------------------------------------------------------------
# Rejection rules and their canonical below-threshold form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OneSidedBelow:
    """Reject when the score falls strictly below ``threshold``."""

    threshold: float

    def rejects(self, scores):
        return np.asarray(scores) < self.threshold


@dataclass(frozen=True)
class OneSidedAbove:
    """Reject when the score rises strictly above ``threshold``."""

    threshold: float

    def rejects(self, scores):
        return np.asarray(scores) > self.threshold


@dataclass(frozen=True)
class OutsideInterval:
    """Reject when the score leaves the closed interval [lower, upper]."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"need lower <= upper, got [{self.lower}, {self.upper}]")

    def rejects(self, scores):
        s = np.asarray(scores)
        return (s < self.lower) | (s > self.upper)


@dataclass(frozen=True)
class IdentityTransform:
    name: str = field(default="identity", init=False)

    def apply(self, scores):
        return np.asarray(scores, dtype=np.float64)


@dataclass(frozen=True)
class NegationTransform:
    name: str = field(default="negation", init=False)

    def apply(self, scores):
        return -np.asarray(scores, dtype=np.float64)


@dataclass(frozen=True)
class IntervalDeviationTransform:
    """Negated overshoot outside [lower, upper]; nonnegative inside."""

    lower: float
    upper: float
    name: str = field(default="interval_deviation", init=False)

    def apply(self, scores):
        s = np.asarray(scores, dtype=np.float64)
        # Differences of extreme finite scores may overflow; the result
        # saturates at +/-inf with the correct sign, so the canonical
        # comparison is still exact.
        with np.errstate(over="ignore"):
            return -np.maximum(self.lower - s, s - self.upper)


@dataclass(frozen=True)
class CanonicalRule:
    """Rule in the canonical form: reject when ``transform(score) < threshold``."""

    transform: object
    threshold: float

    def rejects(self, scores):
        return self.transform.apply(scores) < self.threshold


def recast_rule(rule):
    """Rewrite any rejection rule in the canonical below-threshold form.

    The returned :class:`CanonicalRule` rejects exactly the same score set,
    including boundary scores, in exact floating-point arithmetic.

    Raises
    ------
    TypeError
        If the rule type is not one of the three shipped forms.
    """
    if isinstance(rule, OneSidedBelow):
        return CanonicalRule(IdentityTransform(), rule.threshold)
    if isinstance(rule, OneSidedAbove):
        return CanonicalRule(NegationTransform(), -rule.threshold)
    if isinstance(rule, OutsideInterval):
        # score < lower or score > upper  iff  max(lower - s, s - upper) > 0.
        return CanonicalRule(IntervalDeviationTransform(rule.lower, rule.upper), 0.0)
    raise TypeError(f"cannot recast rule of type {type(rule).__name__}")


def exact_power_and_size(p_probs, q_probs, scores, rule):
    """Exhaustively accumulate rejection mass under null and alternative.

    Sums are taken with plain Python addition, so passing
    :class:`fractions.Fraction` masses keeps the result exact.

    Parameters
    ----------
    p_probs, q_probs : sequences of masses over the same outcome indices
    scores : sequence of float, per-outcome statistic values
    rule : rejection rule with a ``rejects`` method

    Returns
    -------
    (power, size) : rejection mass under ``q_probs`` and under ``p_probs``.
    """
    if not len(p_probs) == len(q_probs) == len(scores):
        raise ValueError("p_probs, q_probs, and scores must have equal length")
    size = sum(p for p, s in zip(p_probs, scores) if rule.rejects(s))
    power = sum(q for q, s in zip(q_probs, scores) if rule.rejects(s))
    return power, size


# ---------------------------------------------------------------------------
# ROC curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RocResult:
    """A size/power curve with its area.

    ``sizes`` and ``powers`` trace the ROC from (0, 0) to (1, 1) as the
    rejection threshold sweeps upward through the observed scores; ``auc``
    is the probability that a random in-distribution score beats a random
    out-of-distribution score, counting ties one half.
    """

    sizes: np.ndarray
    powers: np.ndarray
    auc: float

    def __post_init__(self):
        sizes = np.asarray(self.sizes, dtype=np.float64)
        powers = np.asarray(self.powers, dtype=np.float64)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "powers", powers)
        if sizes.ndim != 1 or sizes.shape != powers.shape or sizes.size < 2:
            raise ValueError("sizes and powers must be equal-length 1-D arrays of length >= 2")
        for name, arr in (("sizes", sizes), ("powers", powers)):
            if arr[0] != 0.0 or arr[-1] != 1.0:
                raise ValueError(f"{name} must start at 0 and end at 1")
            if np.any(np.diff(arr) < 0):
                raise ValueError(f"{name} must be nondecreasing")
            if arr.min() < 0 or arr.max() > 1:
                raise ValueError(f"{name} must stay within [0, 1]")
        area = float(np.trapezoid(powers, sizes))
        if abs(area - self.auc) > 1e-9:
            raise ValueError(
                f"auc {self.auc!r} disagrees with the curve's trapezoid area {area!r}"
            )

    def power_at_size(self, alpha):
        return power_at_size(self, alpha)

    def to_dict(self):
        return {"sizes": self.sizes.tolist(), "powers": self.powers.tolist(), "auc": self.auc}


def _canonical_scores(scores, larger_is_in, name):
    arr = np.asarray(scores, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-D array")
    if np.any(np.isnan(arr)):
        raise ValueError(f"{name} contains NaN")
    return arr if larger_is_in else -arr


def roc_and_auc(in_scores, out_scores, larger_is_in=True):
    """ROC curve and AUC for separating two score samples.

    Parameters
    ----------
    in_scores, out_scores : array_like of float
        Scores of in-distribution and out-of-distribution samples.  Infinite
        values are legal (off-support log-likelihoods), NaN is not.
    larger_is_in : bool
        Orientation of the scores; when False they are negated first.

    Returns
    -------
    RocResult
        The curve is evaluated at every distinct score, rejecting
        canonical scores strictly below each threshold; AUC comes from the
        rank statistic and matches the curve's trapezoid area.
    """
    s_in = _canonical_scores(in_scores, larger_is_in, "in_scores")
    s_out = _canonical_scores(out_scores, larger_is_in, "out_scores")
    n, m = s_in.size, s_out.size

    merged = np.concatenate([s_in, s_out])
    ranks = rankdata(merged, method="average")
    # Rank-sum AUC: Pr(in > out) + 0.5 * Pr(in == out).
    auc = (float(ranks[:n].sum()) - 0.5 * n * (n + 1)) / (n * m)

    s_in_sorted = np.sort(s_in)
    s_out_sorted = np.sort(s_out)
    thresholds = np.unique(merged)
    sizes = np.searchsorted(s_in_sorted, thresholds, side="left") / n
    powers = np.searchsorted(s_out_sorted, thresholds, side="left") / m
    sizes = np.append(sizes, 1.0)
    powers = np.append(powers, 1.0)
    return RocResult(sizes=sizes, powers=powers, auc=auc)


def power_at_size(roc, alpha):
    """Largest power over curve points whose size stays within ``alpha``.

    Parameters
    ----------
    roc : RocResult
    alpha : float in [0, 1]

    Returns
    -------
    float
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    idx = int(np.searchsorted(roc.sizes, alpha, side="right")) - 1
    if idx < 0:
        return 0.0
    return float(roc.powers[: idx + 1].max())


# ---------------------------------------------------------------------------
# Distribution-level error bounds and sample distances
# ---------------------------------------------------------------------------


def _continuous_bounds(dist):
    """Axis-aligned bounding box holding all but ~1e-22 of the mass."""
    from oodlab.distributions import DiagonalGaussian, Mixture

    if isinstance(dist, DiagonalGaussian):
        spread = 10.0 * np.sqrt(dist.variance)
        return dist.mean - spread, dist.mean + spread
    if isinstance(dist, Mixture):
        bounds = [_continuous_bounds(c) for c in dist.components]
        lo = np.min([b[0] for b in bounds], axis=0)
        hi = np.max([b[1] for b in bounds], axis=0)
        return lo, hi
    raise ValueError(f"no quadrature bounds available for {type(dist).__name__}")


def _pdf_on_grid(dist, xs):
    with np.errstate(over="ignore"):
        return np.exp(dist.log_prob(xs))


def bayes_error(p, q):
    """Minimum achievable error of an equal-prior classifier between p and q.

    Computes ``0.5 * integral of min(p, q)``, exactly for discrete supports
    and by dense trapezoid quadrature for continuous distributions in one or
    two dimensions.  The result lower-bounds the average of false-alarm and
    miss rates of every deterministic rule, however clever its statistic.

    Returns
    -------
    float in [0, 0.5]
    """
    kind_p, size_p = p.sample_space
    kind_q, size_q = q.sample_space
    if kind_p != kind_q:
        raise ValueError(f"sample spaces differ: {p.sample_space} vs {q.sample_space}")

    if kind_p == "index":
        # Outcome sets may differ in size; missing indices carry zero mass.
        size = max(size_p, size_q)
        pp = np.zeros(size)
        qq = np.zeros(size)
        pp[: size_p] = np.exp(p.log_prob(np.arange(size_p)))
        qq[: size_q] = np.exp(q.log_prob(np.arange(size_q)))
        return 0.5 * float(np.minimum(pp, qq).sum())

    if kind_p == "binary":
        if size_p != size_q:
            raise ValueError("binary sample spaces must share the dimension")
        d = size_p
        from scipy.special import gammaln

        ks = np.arange(d + 1)
        # Group atoms by their number of ones; each group is exchangeable.
        log_count = gammaln(d + 1) - gammaln(ks + 1) - gammaln(d - ks + 1)
        lp = ks * np.log(p.success_prob) + (d - ks) * np.log1p(-p.success_prob)
        lq = ks * np.log(q.success_prob) + (d - ks) * np.log1p(-q.success_prob)
        return 0.5 * float(np.sum(np.exp(log_count + np.minimum(lp, lq))))

    if size_p != size_q:
        raise ValueError("continuous sample spaces must share the dimension")
    dim = size_p
    lo_p, hi_p = _continuous_bounds(p)
    lo_q, hi_q = _continuous_bounds(q)
    lo = np.minimum(lo_p, lo_q)
    hi = np.maximum(hi_p, hi_q)
    if dim == 1:
        xs = np.linspace(lo[0], hi[0], 2**14)[:, None]
        integrand = np.minimum(_pdf_on_grid(p, xs), _pdf_on_grid(q, xs))
        return 0.5 * float(np.trapezoid(integrand, xs[:, 0]))
    if dim == 2:
        axis0 = np.linspace(lo[0], hi[0], 2**11)
        axis1 = np.linspace(lo[1], hi[1], 2**11)
        g0, g1 = np.meshgrid(axis0, axis1, indexing="ij")
        pts = np.stack([g0.ravel(), g1.ravel()], axis=1)
        integrand = np.minimum(_pdf_on_grid(p, pts), _pdf_on_grid(q, pts)).reshape(g0.shape)
        inner = np.trapezoid(integrand, axis1, axis=1)
        return 0.5 * float(np.trapezoid(inner, axis0))
    raise ValueError(f"quadrature supports 1 or 2 dimensions, got {dim}")


def ks_distance(a, b):
    """Two-sample Kolmogorov distance, ``sup_t |F_a(t) - F_b(t)|``.

    Both inputs must be nonempty 1-D samples.  Runs in O((n + m) log(n + m)).
    """
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(cdf_a - cdf_b).max())


def ks_critical_value(n, m, alpha):
    """Asymptotic two-sample Kolmogorov critical value at level ``alpha``.

    ``c(alpha) * sqrt((n + m) / (n * m))`` with
    ``c(alpha) = sqrt(-ln(alpha / 2) / 2)``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if n < 1 or m < 1:
        raise ValueError("both sample sizes must be positive")
    c = np.sqrt(-np.log(alpha / 2.0) / 2.0)
    return float(c * np.sqrt((n + m) / (n * m)))
