"""Scalar test statistics fitted to a density model.

A fitted statistic maps a sample to a score, together with a fixed
orientation flag ``larger_is_in`` saying which direction of the score favors
the in-distribution hypothesis.  Keeping the orientation on the statistic
lets downstream ROC code canonicalize scores without per-call-site sign
conventions.

Provided statistics:

* :class:`LogLikelihoodStatistic`, the raw model log-likelihood,
* :class:`TypicalityStatistic`, distance between a sample's negative
  log-likelihood and an entropy estimate of the model,
* :class:`LikelihoodRatioStatistic`, log-likelihood difference against a
  second model,
* :class:`DoseLiteStatistic`, a kernel density estimate over the model's
  train-set log-likelihoods, scoring how typical a sample's likelihood is.
"""

from abc import ABC, abstractmethod

import numpy as np
from scipy.special import logsumexp

__all__ = [
    "FittedStatistic",
    "LogLikelihoodStatistic",
    "TypicalityStatistic",
    "LikelihoodRatioStatistic",
    "DoseLiteStatistic",
    "estimate_entropy",
    "bits_per_dimension",
    "silverman_bandwidth",
]

_LN2 = float(np.log(2.0))


def estimate_entropy(model, samples):
    """Monte Carlo entropy estimate, the mean negative log-likelihood.

    Parameters
    ----------
    model : Distribution
    samples : array_like
        Nonempty batch of samples from ``model``'s sample space.

    Returns
    -------
    float
    """
    lls = np.atleast_1d(np.asarray(model.log_prob(samples), dtype=np.float64))
    if lls.size == 0:
        raise ValueError("cannot estimate entropy from an empty sample")
    return -float(lls.mean())


def bits_per_dimension(log_prob_nats, dims):
    """Convert a log-likelihood in nats to bits per dimension.

    Parameters
    ----------
    log_prob_nats : float or array_like
    dims : int
        Number of dimensions the likelihood is spread over, at least 1.

    Returns
    -------
    float or ndarray
        ``-log_prob_nats / (dims * ln 2)``.
    """
    dims = int(dims)
    if dims < 1:
        raise ValueError(f"dims must be at least 1, got {dims}")
    out = -np.asarray(log_prob_nats, dtype=np.float64) / (dims * _LN2)
    return float(out) if out.ndim == 0 else out


def silverman_bandwidth(values):
    """Silverman's rule-of-thumb bandwidth for a 1-D Gaussian KDE.

    ``0.9 * min(std, iqr / 1.34) * n ** (-1/5)``, using the sample standard
    deviation (ddof=1 for n > 1).  Degenerate inputs yield 0; callers should
    treat that as "no usable bandwidth".
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("values must be a nonempty 1-D array")
    if v.size == 1:
        return 0.0
    sd = float(np.std(v, ddof=1))
    q75, q25 = np.percentile(v, [75.0, 25.0])
    spread = min(sd, (q75 - q25) / 1.34)
    return 0.9 * spread * v.size ** (-0.2)


class FittedStatistic(ABC):
    """A scalar score with a fixed in-distribution orientation.

    Attributes
    ----------
    larger_is_in : bool
        True when larger scores point toward the in-distribution hypothesis.
    """

    larger_is_in = True

    @abstractmethod
    def evaluate(self, x):
        """Score a single sample (returns float) or a batch (returns 1-D array)."""

    def __call__(self, x):
        return self.evaluate(x)


class LogLikelihoodStatistic(FittedStatistic):
    """The model's own log-likelihood; larger means more in-distribution."""

    larger_is_in = True

    def __init__(self, model):
        self.model = model

    def evaluate(self, x):
        return self.model.log_prob(x)


class TypicalityStatistic(FittedStatistic):
    """Absolute gap between negative log-likelihood and an entropy estimate.

    Scores ``|(-log p(x)) - H_hat|``; samples whose likelihood matches the
    model's typical likelihood score near 0, so smaller is more
    in-distribution.
    """

    larger_is_in = False

    def __init__(self, model, entropy_estimate):
        self.model = model
        self.entropy_estimate = float(entropy_estimate)

    @classmethod
    def fit(cls, model, train_samples):
        """Estimate the entropy from ``train_samples`` and build the statistic."""
        return cls(model, estimate_entropy(model, train_samples))

    def evaluate(self, x):
        ll = self.model.log_prob(x)
        return np.abs(-ll - self.entropy_estimate) if np.ndim(ll) else abs(-ll - self.entropy_estimate)


class LikelihoodRatioStatistic(FittedStatistic):
    """Log-likelihood difference ``log p(x) - log q(x)`` against a rival model."""

    larger_is_in = True

    def __init__(self, model, alt_model):
        if model.sample_space != alt_model.sample_space:
            raise ValueError(
                f"models must share a sample space, got {model.sample_space} "
                f"and {alt_model.sample_space}"
            )
        self.model = model
        self.alt_model = alt_model

    def evaluate(self, x):
        return self.model.log_prob(x) - self.alt_model.log_prob(x)


class DoseLiteStatistic(FittedStatistic):
    """Density of a sample's log-likelihood among train log-likelihoods.

    A 1-D Gaussian KDE is fitted over the model's log-likelihoods on the
    training set.  A new sample is scored by the KDE log-density of its own
    log-likelihood, so samples whose likelihood is unusual in either
    direction score low.  Larger is more in-distribution.
    """

    larger_is_in = True

    # Evaluation is exact but chunked so the (eval x train) kernel matrix
    # never materializes at full size.
    _CHUNK_ELEMENTS = 2**21

    def __init__(self, model, train_log_liks, bandwidth):
        train_log_liks = np.asarray(train_log_liks, dtype=np.float64)
        if train_log_liks.ndim != 1 or train_log_liks.size == 0:
            raise ValueError("train_log_liks must be a nonempty 1-D array")
        bandwidth = float(bandwidth)
        if not bandwidth > 0:
            raise ValueError(
                f"bandwidth must be positive, got {bandwidth}; pass an explicit "
                "bandwidth when the train log-likelihoods are degenerate"
            )
        self.model = model
        self.train_log_liks = train_log_liks
        self.bandwidth = bandwidth
        n = train_log_liks.size
        self._log_norm = -float(np.log(n * bandwidth * np.sqrt(2.0 * np.pi)))

    @classmethod
    def fit(cls, model, train_samples, bandwidth=None):
        """Fit the KDE over ``model``'s log-likelihoods on ``train_samples``.

        When ``bandwidth`` is omitted it is chosen by Silverman's rule; if
        that rule degenerates to 0 (for instance when all train
        log-likelihoods coincide) a :class:`ValueError` asks for an explicit
        bandwidth.
        """
        lls = np.atleast_1d(np.asarray(model.log_prob(train_samples), dtype=np.float64))
        if bandwidth is None:
            bandwidth = silverman_bandwidth(lls)
        return cls(model, lls, bandwidth)

    def _kde_log_density(self, values):
        out = np.empty(values.shape[0])
        step = max(1, self._CHUNK_ELEMENTS // self.train_log_liks.size)
        inv_h = 1.0 / self.bandwidth
        for start in range(0, values.shape[0], step):
            chunk = values[start : start + step]
            # Stable log-sum-exp with the kernel matrix built in place.
            z = np.subtract.outer(chunk, self.train_log_liks)
            z *= inv_h
            np.square(z, out=z)
            z *= -0.5
            peak = z.max(axis=1, keepdims=True)
            np.subtract(z, peak, out=z)
            np.exp(z, out=z)
            out[start : start + step] = np.log(z.sum(axis=1)) + peak[:, 0]
        return out + self._log_norm

    def evaluate(self, x):
        ll = self.model.log_prob(x)
        single = np.ndim(ll) == 0
        scores = self._kde_log_density(np.atleast_1d(np.asarray(ll, dtype=np.float64)))
        return float(scores[0]) if single else scores
