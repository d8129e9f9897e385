"""Tractable distributions with exact log-densities, samplers, and entropies.

Five families are provided:

* :class:`DiagonalGaussian` over ``R^d`` with independent coordinates,
* :class:`ProductBernoulli` over binary vectors ``{0, 1}^d``,
* :class:`FiniteDiscrete` over outcome indices ``{0, ..., K - 1}``,
* :class:`UniformDiscrete`, the equal-mass special case of the above,
* :class:`Mixture`, a finite mixture of components on a shared sample space.

All log quantities are in nats.  Samplers take an explicit
:class:`numpy.random.Generator` so that results are reproducible; see
:mod:`oodlab.rng`.  Every distribution serializes to a plain dict of JSON
types via :meth:`Distribution.to_dict` and comes back bit-identical through
:func:`distribution_from_dict`.
"""

from abc import ABC, abstractmethod

import numpy as np
from scipy.special import logsumexp

__all__ = [
    "Distribution",
    "DiagonalGaussian",
    "ProductBernoulli",
    "FiniteDiscrete",
    "UniformDiscrete",
    "Mixture",
    "UnsupportedAnalyticEntropy",
    "distribution_from_dict",
]

_LOG_2PI = float(np.log(2.0 * np.pi))

# Registry filled at class-definition time, used by distribution_from_dict.
_VARIANTS = {}


class UnsupportedAnalyticEntropy(Exception):
    """Raised when a distribution has no closed-form entropy."""


def _register(name):
    def deco(cls):
        cls.variant = name
        _VARIANTS[name] = cls
        return cls

    return deco


class Distribution(ABC):
    """Common interface for the distribution families in this module."""

    @property
    @abstractmethod
    def sample_space(self):
        """Describe the sample space as a ``(kind, size)`` pair.

        ``kind`` is one of ``"continuous"`` (vectors in ``R^size``),
        ``"binary"`` (vectors in ``{0, 1}^size``), or ``"index"``
        (integers in ``{0, ..., size - 1}``).
        """

    @abstractmethod
    def log_prob(self, x):
        """Log-density or log-mass of ``x`` in nats.

        Accepts a single point or a batch (leading axis).  Returns a float
        for a single point and a 1-D array for a batch.  Points outside the
        sample space raise :class:`ValueError`.
        """

    @abstractmethod
    def sample(self, rng, n):
        """Draw ``n`` independent samples using ``rng``.

        Returns an array whose leading axis has length ``n``; ``n = 0``
        yields an empty array of the correct shape and dtype.
        """

    @abstractmethod
    def entropy(self):
        """Differential or discrete entropy in nats.

        Raises
        ------
        UnsupportedAnalyticEntropy
            If no closed form exists for this family.
        """

    @abstractmethod
    def to_dict(self):
        """Serialize to a dict of JSON-compatible types."""

    def __repr__(self):
        fields = ", ".join(f"{k}={v!r}" for k, v in self.to_dict().items() if k != "variant")
        return f"{type(self).__name__}({fields})"


def _check_vector_batch(x, dim, name):
    """Coerce ``x`` to a float batch of shape ``(n, dim)``.

    Returns the batch and a flag telling whether the input was a single
    point, so callers can unwrap scalar results.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        if arr.shape[0] != dim:
            raise ValueError(f"{name}: expected a point of dimension {dim}, got shape {arr.shape}")
        return arr[None, :], True
    if arr.ndim == 2:
        if arr.shape[1] != dim:
            raise ValueError(f"{name}: expected batch shape (n, {dim}), got {arr.shape}")
        return arr, False
    raise ValueError(f"{name}: expected 1-D point or 2-D batch, got ndim {arr.ndim}")


def _check_index_batch(x, size, name):
    arr = np.asarray(x)
    single = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if arr.ndim != 1:
        raise ValueError(f"{name}: expected scalar index or 1-D batch, got ndim {arr.ndim}")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.floor(arr)):
            raise ValueError(f"{name}: indices must be integers")
        arr = arr.astype(np.int64)
    arr = arr.astype(np.int64, copy=False)
    if arr.size and (arr.min() < 0 or arr.max() >= size):
        raise ValueError(f"{name}: index out of range for support size {size}")
    return arr, single


@_register("diagonal_gaussian")
class DiagonalGaussian(Distribution):
    """Gaussian on ``R^d`` with diagonal covariance.

    Parameters
    ----------
    mean : array_like of float, shape (d,)
    variance : array_like of float, shape (d,)
        Per-coordinate variances, all strictly positive.
    """

    def __init__(self, mean, variance):
        mean = np.atleast_1d(np.asarray(mean, dtype=np.float64))
        variance = np.atleast_1d(np.asarray(variance, dtype=np.float64))
        if mean.ndim != 1 or variance.ndim != 1:
            raise ValueError("mean and variance must be 1-D")
        if mean.shape != variance.shape:
            raise ValueError(
                f"mean and variance must have equal length, got {mean.shape} and {variance.shape}"
            )
        if mean.size == 0:
            raise ValueError("dimension must be at least 1")
        if not np.all(variance > 0):
            raise ValueError("all variances must be strictly positive")
        self.mean = mean
        self.variance = variance
        self.mean.flags.writeable = False
        self.variance.flags.writeable = False
        # Normalization constant of the joint density, precomputed once.
        self._log_norm = -0.5 * float(np.sum(np.log(2.0 * np.pi * variance)))

    @property
    def dim(self):
        return self.mean.shape[0]

    @property
    def sample_space(self):
        return ("continuous", self.dim)

    def log_prob(self, x):
        batch, single = _check_vector_batch(x, self.dim, "DiagonalGaussian.log_prob")
        z2 = np.sum((batch - self.mean) ** 2 / self.variance, axis=1)
        out = self._log_norm - 0.5 * z2
        return float(out[0]) if single else out

    def sample(self, rng, n):
        if n < 0:
            raise ValueError(f"sample count must be nonnegative, got {n}")
        std = np.sqrt(self.variance)
        return rng.normal(loc=self.mean, scale=std, size=(int(n), self.dim))

    def entropy(self):
        return 0.5 * float(np.sum(1.0 + np.log(2.0 * np.pi * self.variance)))

    def to_dict(self):
        return {
            "variant": self.variant,
            "mean": self.mean.tolist(),
            "variance": self.variance.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(mean=d["mean"], variance=d["variance"])


@_register("product_bernoulli")
class ProductBernoulli(Distribution):
    """Independent Bernoulli coordinates on ``{0, 1}^d``.

    Parameters
    ----------
    dim : int
        Number of coordinates, at least 1.
    success_prob : float
        Shared success probability, strictly inside ``(0, 1)``.
    """

    def __init__(self, dim, success_prob):
        dim = int(dim)
        success_prob = float(success_prob)
        if dim < 1:
            raise ValueError(f"dimension must be at least 1, got {dim}")
        if not 0.0 < success_prob < 1.0:
            raise ValueError(f"success_prob must lie in (0, 1), got {success_prob}")
        self.dim = dim
        self.success_prob = success_prob
        self._log_p = float(np.log(success_prob))
        self._log_1mp = float(np.log1p(-success_prob))

    @property
    def sample_space(self):
        return ("binary", self.dim)

    def log_prob(self, x):
        batch, single = _check_vector_batch(x, self.dim, "ProductBernoulli.log_prob")
        if batch.size and not np.all((batch == 0.0) | (batch == 1.0)):
            raise ValueError("ProductBernoulli.log_prob: entries must be 0 or 1")
        ones = batch.sum(axis=1)
        out = ones * self._log_p + (self.dim - ones) * self._log_1mp
        return float(out[0]) if single else out

    def sample(self, rng, n):
        if n < 0:
            raise ValueError(f"sample count must be nonnegative, got {n}")
        u = rng.random(size=(int(n), self.dim))
        return (u < self.success_prob).astype(np.int64)

    def entropy(self):
        p = self.success_prob
        return -self.dim * (p * self._log_p + (1.0 - p) * self._log_1mp)

    def to_dict(self):
        return {"variant": self.variant, "dim": self.dim, "success_prob": self.success_prob}

    @classmethod
    def from_dict(cls, d):
        return cls(dim=d["dim"], success_prob=d["success_prob"])


@_register("finite_discrete")
class FiniteDiscrete(Distribution):
    """Arbitrary distribution over outcome indices ``{0, ..., K - 1}``.

    Parameters
    ----------
    probs : array_like of float, shape (K,)
        Nonnegative masses summing to 1 within 1e-12.
    """

    def __init__(self, probs):
        probs = np.atleast_1d(np.asarray(probs, dtype=np.float64))
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a nonempty 1-D array")
        if not np.all(probs >= 0):
            raise ValueError("probabilities must be nonnegative")
        total = float(probs.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities must sum to 1 within 1e-12, got {total!r}")
        self.probs = probs
        self.probs.flags.writeable = False
        with np.errstate(divide="ignore"):
            self._log_probs = np.log(probs)

    @property
    def support_size(self):
        return self.probs.shape[0]

    @property
    def sample_space(self):
        return ("index", self.support_size)

    def log_prob(self, x):
        idx, single = _check_index_batch(x, self.support_size, "FiniteDiscrete.log_prob")
        out = self._log_probs[idx]
        return float(out[0]) if single else out

    def sample(self, rng, n):
        if n < 0:
            raise ValueError(f"sample count must be nonnegative, got {n}")
        n = int(n)
        if n == 0:
            return np.empty(0, dtype=np.int64)
        return rng.choice(self.support_size, size=n, p=self.probs).astype(np.int64)

    def entropy(self):
        p = self.probs[self.probs > 0]
        return -float(np.sum(p * np.log(p)))

    def to_dict(self):
        return {"variant": self.variant, "probs": self.probs.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(probs=d["probs"])


@_register("uniform_discrete")
class UniformDiscrete(Distribution):
    """Uniform distribution over ``{0, ..., K - 1}``."""

    def __init__(self, support_size):
        support_size = int(support_size)
        if support_size < 1:
            raise ValueError(f"support size must be at least 1, got {support_size}")
        self.support_size = support_size
        self._log_mass = -float(np.log(support_size))

    @property
    def sample_space(self):
        return ("index", self.support_size)

    def log_prob(self, x):
        idx, single = _check_index_batch(x, self.support_size, "UniformDiscrete.log_prob")
        out = np.full(idx.shape, self._log_mass)
        return float(out[0]) if single else out

    def sample(self, rng, n):
        if n < 0:
            raise ValueError(f"sample count must be nonnegative, got {n}")
        return rng.integers(0, self.support_size, size=int(n), dtype=np.int64)

    def entropy(self):
        return float(np.log(self.support_size))

    def to_dict(self):
        return {"variant": self.variant, "support_size": self.support_size}

    @classmethod
    def from_dict(cls, d):
        return cls(support_size=d["support_size"])

    def as_finite_discrete(self):
        """Expand to an explicit :class:`FiniteDiscrete` with equal masses."""
        return FiniteDiscrete(np.full(self.support_size, 1.0 / self.support_size))


@_register("mixture")
class Mixture(Distribution):
    """Finite mixture of components sharing one sample space.

    Parameters
    ----------
    components : sequence of Distribution
    weights : array_like of float
        Mixing weights, nonnegative and summing to 1 within 1e-12.
    """

    def __init__(self, components, weights):
        components = list(components)
        weights = np.atleast_1d(np.asarray(weights, dtype=np.float64))
        if len(components) == 0:
            raise ValueError("mixture needs at least one component")
        if weights.shape != (len(components),):
            raise ValueError(
                f"got {len(components)} components but {weights.size} weights"
            )
        if not np.all(weights >= 0):
            raise ValueError("mixture weights must be nonnegative")
        total = float(weights.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"mixture weights must sum to 1 within 1e-12, got {total!r}")
        spaces = {c.sample_space for c in components}
        if len(spaces) != 1:
            raise ValueError(f"components must share one sample space, got {sorted(spaces)}")
        self.components = components
        self.weights = weights
        self.weights.flags.writeable = False
        with np.errstate(divide="ignore"):
            self._log_weights = np.log(weights)

    @property
    def sample_space(self):
        return self.components[0].sample_space

    def log_prob(self, x):
        per_comp = [np.asarray(c.log_prob(x), dtype=np.float64) for c in self.components]
        single = per_comp[0].ndim == 0
        # Stack along a new leading axis so weights line up with components
        # for single points (scalar per-component results) and batches alike.
        stacked = np.stack([np.atleast_1d(v) for v in per_comp], axis=0)
        out = logsumexp(stacked + self._log_weights[:, None], axis=0)
        return float(out[0]) if single else out

    def sample(self, rng, n):
        if n < 0:
            raise ValueError(f"sample count must be nonnegative, got {n}")
        n = int(n)
        labels = rng.choice(len(self.components), size=n, p=self.weights) if n else np.empty(0, dtype=np.int64)
        probe = self.components[0].sample(rng, 0)
        out = np.empty((n,) + probe.shape[1:], dtype=probe.dtype)
        for k, comp in enumerate(self.components):
            mask = labels == k
            count = int(mask.sum())
            if count:
                out[mask] = comp.sample(rng, count)
        return out

    def entropy(self):
        raise UnsupportedAnalyticEntropy(
            "mixtures have no closed-form entropy; estimate it from samples instead"
        )

    def to_dict(self):
        return {
            "variant": self.variant,
            "weights": self.weights.tolist(),
            "components": [c.to_dict() for c in self.components],
        }

    @classmethod
    def from_dict(cls, d):
        comps = [distribution_from_dict(cd) for cd in d["components"]]
        return cls(components=comps, weights=d["weights"])


def distribution_from_dict(d):
    """Rebuild any distribution serialized by :meth:`Distribution.to_dict`.

    Raises
    ------
    ValueError
        If the dict carries an unknown ``variant`` tag.
    """
    try:
        variant = d["variant"]
    except (TypeError, KeyError):
        raise ValueError("expected a dict with a 'variant' key")
    try:
        cls = _VARIANTS[variant]
    except KeyError:
        raise ValueError(f"unknown distribution variant {variant!r}")
    return cls.from_dict(d)
