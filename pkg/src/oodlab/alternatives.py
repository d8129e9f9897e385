"""Alternative distributions that a log-mass statistic cannot tell apart.

Each construction here takes a base distribution P and produces a different
distribution Q such that the distribution of ``log p(x)`` is the same whether
``x ~ P`` or ``x ~ Q``.  Any test that thresholds the base model's
log-likelihood therefore has power equal to its size against these
alternatives.

Two continuous maps act on bivariate standard-normal samples by moving points
along level curves of the density (:func:`quadrant_fold`,
:func:`radial_collapse`), and one discrete construction reweights mass inside
a single probability level set (:func:`level_set_collapse`).
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from oodlab.distributions import FiniteDiscrete

__all__ = [
    "quadrant_fold",
    "radial_collapse",
    "LevelSetCollapseSpec",
    "level_set_collapse",
    "probability_level_sets",
]

# Probability values are grouped into level sets after rounding to this many
# decimals, which tolerates the usual float noise in user-provided masses.
LEVEL_DECIMALS = 12


def _as_planar_batch(x, name):
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"{name}: expected shape (2,) or (n, 2), got {np.shape(x)}")
    return arr, single


def quadrant_fold(x):
    """Fold the plane's mixed-sign quadrants onto the agreeing-sign ones.

    Points with ``x1 * x2 < 0`` have the sign of their second coordinate
    flipped; all other points (including those on the axes) are unchanged.
    Coordinate magnitudes are preserved, so any density that depends on the
    point only through ``(|x1|, |x2|)`` takes the same value before and
    after the fold.

    Parameters
    ----------
    x : array_like, shape (2,) or (n, 2)

    Returns
    -------
    ndarray with the same shape as the input.
    """
    arr, single = _as_planar_batch(x, "quadrant_fold")
    out = arr.copy()
    mixed = arr[:, 0] * arr[:, 1] < 0
    out[mixed, 1] = -out[mixed, 1]
    return out[0] if single else out


def radial_collapse(x):
    """Slide each point along its circle of constant norm onto the diagonal.

    Maps ``(x1, x2)`` to ``(z, z)`` where ``z = sqrt((x1^2 + x2^2) / 2)``,
    so the squared norm, and with it any isotropic density value, is
    preserved while the output support shrinks to a single ray.

    Parameters
    ----------
    x : array_like, shape (2,) or (n, 2)

    Returns
    -------
    ndarray with the same shape as the input.
    """
    arr, single = _as_planar_batch(x, "radial_collapse")
    z = np.sqrt(0.5 * (arr[:, 0] ** 2 + arr[:, 1] ** 2))
    out = np.stack([z, z], axis=1)
    return out[0] if single else out


def probability_level_sets(probs, decimals=LEVEL_DECIMALS):
    """Group outcome indices by probability value.

    Parameters
    ----------
    probs : array_like of float
    decimals : int
        Probabilities are rounded to this many decimals before grouping.

    Returns
    -------
    dict mapping rounded probability to a sorted ndarray of indices.
    """
    probs = np.asarray(probs, dtype=np.float64)
    keys = np.round(probs, decimals)
    groups = {}
    for idx, key in enumerate(keys):
        groups.setdefault(float(key), []).append(idx)
    return {k: np.asarray(v, dtype=np.int64) for k, v in groups.items()}


@dataclass(frozen=True, eq=False)
class LevelSetCollapseSpec:
    """Recipe for reweighting mass inside one probability level set.

    Attributes
    ----------
    base : FiniteDiscrete
        Distribution whose level set is reweighted.
    target_level_value : float
        Probability value identifying the level set (matched after rounding
        to :data:`LEVEL_DECIMALS` decimals).
    subset_a : tuple of int
        Nonempty proper subset of the level set whose elements are
        down-weighted by ``lam`` relative to the rest.
    lam : float
        Reweighting factor, strictly between 0 and 1.
    """

    base: FiniteDiscrete
    target_level_value: float
    subset_a: tuple
    lam: float

    def __post_init__(self):
        if not isinstance(self.base, FiniteDiscrete):
            raise ValueError("base must be a FiniteDiscrete distribution")
        object.__setattr__(self, "subset_a", tuple(int(i) for i in self.subset_a))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "target_level_value", float(self.target_level_value))
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"lam must lie strictly inside (0, 1), got {self.lam}")
        groups = probability_level_sets(self.base.probs)
        key = float(np.round(self.target_level_value, LEVEL_DECIMALS))
        if key not in groups:
            raise ValueError(
                f"no outcome has probability {self.target_level_value!r} "
                f"(rounded to {LEVEL_DECIMALS} decimals)"
            )
        level = groups[key]
        if level.size < 2:
            raise ValueError("the targeted level set must contain at least two outcomes")
        a = self.subset_a
        if len(set(a)) != len(a):
            raise ValueError("subset_a contains duplicate indices")
        level_set = set(level.tolist())
        if not a:
            raise ValueError("subset_a must be nonempty")
        if not set(a) <= level_set:
            raise ValueError("subset_a must be contained in the targeted level set")
        if set(a) == level_set:
            raise ValueError("subset_a must be a proper subset of the level set")
        object.__setattr__(self, "level_set", tuple(int(i) for i in level))

    def to_dict(self):
        return {
            "base": self.base.to_dict(),
            "target_level_value": self.target_level_value,
            "subset_a": list(self.subset_a),
            "lam": self.lam,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            base=FiniteDiscrete(d["base"]["probs"]),
            target_level_value=d["target_level_value"],
            subset_a=tuple(d["subset_a"]),
            lam=d["lam"],
        )


def level_set_collapse(spec):
    """Build the reweighted distribution described by ``spec``.

    Within the targeted level set L, mass is redistributed so that elements
    of ``subset_a`` carry ``lam`` times the (conditional) weight of the
    remaining elements, while the total mass of L is preserved.  Outcomes
    outside L keep their base probability bit for bit.

    The arithmetic runs on exact rationals and is rounded to float64 only at
    the end, so each level set's total mass matches the base to within a few
    ulps.

    Parameters
    ----------
    spec : LevelSetCollapseSpec

    Returns
    -------
    FiniteDiscrete
    """
    base = spec.base
    level = np.asarray(spec.level_set, dtype=np.int64)
    in_a = np.isin(level, np.asarray(spec.subset_a, dtype=np.int64))

    mass_level = sum(Fraction(float(base.probs[i])) for i in level)
    lam = Fraction(spec.lam)
    n_a = int(in_a.sum())
    n_rest = int(level.size - n_a)
    total_weight = lam * n_a + n_rest

    q = base.probs.copy()
    q_a = mass_level * lam / total_weight
    q_rest = mass_level / total_weight
    q[level[in_a]] = float(q_a)
    q[level[~in_a]] = float(q_rest)
    return FiniteDiscrete(q)
