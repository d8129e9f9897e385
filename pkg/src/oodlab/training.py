"""Categorical density models on a fixed grid of bins, fit by gradient ascent.

The model is a softmax over per-bin logits.  Two fitting modes are provided:

* :func:`grid_mle_fit` maximizes the mean in-distribution log-likelihood,
* :func:`grid_nt_fit` additionally pushes down the likelihood of a batch of
  out-of-distribution bins, with the push-down clamped at a floor so the
  penalty stalls once those bins are unlikely enough.

Both run full-batch gradient ascent from the uniform initialization, so fits
are deterministic functions of the count vectors and the configuration.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

__all__ = [
    "GridDensityModel",
    "TrainConfig",
    "FitResult",
    "GridEvalReport",
    "grid_mle_fit",
    "grid_nt_fit",
    "evaluate_grid",
    "mle_objective",
    "mle_gradient",
    "nt_objective",
    "nt_gradient",
]


@dataclass(frozen=True, eq=False)
class GridDensityModel:
    """Softmax-parameterized categorical distribution over grid bins."""

    logits: np.ndarray

    def __post_init__(self):
        logits = np.asarray(self.logits, dtype=np.float64)
        if logits.ndim != 1 or logits.size < 2:
            raise ValueError("logits must be a 1-D array with at least two bins")
        if not np.all(np.isfinite(logits)):
            raise ValueError("logits must be finite")
        logits = logits.copy()
        logits.flags.writeable = False
        object.__setattr__(self, "logits", logits)

    @property
    def n_bins(self):
        return self.logits.size

    def log_probabilities(self):
        return self.logits - logsumexp(self.logits)

    def probabilities(self):
        return np.exp(self.log_probabilities())


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters shared by both grid fitting modes.

    ``clamp_c`` is the floor (in log-probability nats) where the
    out-of-distribution push-down stalls; ``None`` or an infinite value
    disables the clamp.  ``seed`` tags the dataset the config was built for;
    the fits themselves are deterministic and draw no randomness.
    """

    learning_rate: float
    steps: int
    clamp_c: float = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "learning_rate", float(self.learning_rate))
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "seed", int(self.seed))
        if self.clamp_c is not None:
            object.__setattr__(self, "clamp_c", float(self.clamp_c))
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be nonnegative, got {self.learning_rate}")
        if self.steps < 0:
            raise ValueError(f"steps must be nonnegative, got {self.steps}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")

    def to_dict(self):
        return {
            "learning_rate": self.learning_rate,
            "steps": self.steps,
            "clamp_c": self.clamp_c,
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class FitResult:
    """A fitted model plus the objective value before and after each step."""

    model: GridDensityModel
    objective_trace: np.ndarray


def _check_counts(counts, name, n_bins=None):
    arr = np.asarray(counts)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError(f"{name} must be a 1-D array with at least two bins")
    if np.any(arr < 0) or not np.all(arr == np.floor(arr)):
        raise ValueError(f"{name} must contain nonnegative integers")
    if n_bins is not None and arr.size != n_bins:
        raise ValueError(f"{name} has {arr.size} bins, expected {n_bins}")
    return arr.astype(np.float64)


def _frequencies(counts, name, require_mass):
    total = counts.sum()
    if require_mass and total <= 0:
        raise ValueError(f"{name} must contain at least one observation")
    return counts / total if total > 0 else np.zeros_like(counts)


def _effective_clamp(clamp_c):
    if clamp_c is None or not np.isfinite(clamp_c):
        return None
    return float(clamp_c)


def mle_objective(logits, freq_in):
    """Mean in-distribution log-likelihood under the softmax model."""
    logp = logits - logsumexp(logits)
    return float(freq_in @ logp)


def mle_gradient(logits, freq_in):
    logp = logits - logsumexp(logits)
    return freq_in - np.exp(logp)


def nt_objective(logits, freq_in, freq_ood, clamp_c):
    """MLE objective minus the clamped out-of-distribution log-likelihood.

    The penalty on each out-of-distribution bin is its log-probability
    floored at ``clamp_c``: once a bin drops below the floor its penalty is
    constant, so gradient ascent stops pushing it further down.
    """
    logp = logits - logsumexp(logits)
    clamp = _effective_clamp(clamp_c)
    penalty = logp if clamp is None else np.maximum(logp, clamp)
    return float(freq_in @ logp - freq_ood @ penalty)


def nt_gradient(logits, freq_in, freq_ood, clamp_c):
    logp = logits - logsumexp(logits)
    p = np.exp(logp)
    clamp = _effective_clamp(clamp_c)
    active = np.ones_like(logp) if clamp is None else (logp > clamp).astype(np.float64)
    weighted = freq_ood * active
    return (freq_in - p) - (weighted - p * weighted.sum())


def _ascend(objective, gradient, n_bins, config):
    theta = np.zeros(n_bins)
    trace = np.empty(config.steps + 1)
    trace[0] = objective(theta)
    for step in range(config.steps):
        theta = theta + config.learning_rate * gradient(theta)
        trace[step + 1] = objective(theta)
    return FitResult(model=GridDensityModel(theta), objective_trace=trace)


def grid_mle_fit(counts_in, config):
    """Fit the grid model to in-distribution counts by maximum likelihood.

    Full-batch gradient ascent from uniform logits; with ``steps = 0`` or
    ``learning_rate = 0`` the uniform model is returned unchanged.

    Returns
    -------
    FitResult
    """
    counts = _check_counts(counts_in, "counts_in")
    f = _frequencies(counts, "counts_in", require_mass=True)
    return _ascend(
        lambda th: mle_objective(th, f),
        lambda th: mle_gradient(th, f),
        counts.size,
        config,
    )


def grid_nt_fit(counts_in, counts_ood, config):
    """Fit the grid model with a clamped out-of-distribution push-down.

    ``counts_ood`` may be all zeros, in which case the trajectory coincides
    exactly with :func:`grid_mle_fit` on the same in-distribution counts.

    Returns
    -------
    FitResult
    """
    counts = _check_counts(counts_in, "counts_in")
    ood = _check_counts(counts_ood, "counts_ood", n_bins=counts.size)
    f = _frequencies(counts, "counts_in", require_mass=True)
    g = _frequencies(ood, "counts_ood", require_mass=False)
    return _ascend(
        lambda th: nt_objective(th, f, g, config.clamp_c),
        lambda th: nt_gradient(th, f, g, config.clamp_c),
        counts.size,
        config,
    )


@dataclass(frozen=True)
class GridEvalReport:
    """Held-out scoring of a fitted grid model."""

    auc: float
    mean_log_lik_in: float
    mean_log_lik_ood: float

    def to_dict(self):
        return {
            "auc": self.auc,
            "mean_log_lik_in": self.mean_log_lik_in,
            "mean_log_lik_ood": self.mean_log_lik_ood,
        }


def evaluate_grid(model, test_in, test_ood):
    """Score a fitted model on held-out in- and out-of-distribution counts.

    The AUC treats each observed bin occurrence as one sample scored by the
    model's log-probability of its bin, larger meaning more in-distribution.

    Parameters
    ----------
    model : GridDensityModel
    test_in, test_ood : count vectors over the model's bins, each with at
        least one observation.

    Returns
    -------
    GridEvalReport
    """
    t_in = _check_counts(test_in, "test_in", n_bins=model.n_bins)
    t_ood = _check_counts(test_ood, "test_ood", n_bins=model.n_bins)
    if t_in.sum() <= 0 or t_ood.sum() <= 0:
        raise ValueError("both test count vectors need at least one observation")
    logp = model.log_probabilities()
    scores_in = np.repeat(logp, t_in.astype(np.int64))
    scores_ood = np.repeat(logp, t_ood.astype(np.int64))
    from oodlab.testing import roc_and_auc

    roc = roc_and_auc(scores_in, scores_ood, larger_is_in=True)
    return GridEvalReport(
        auc=roc.auc,
        mean_log_lik_in=float(logp @ t_in / t_in.sum()),
        mean_log_lik_ood=float(logp @ t_ood / t_ood.sum()),
    )
