"""Counter-based random number generation helpers.

Every sampler in the package consumes a :class:`numpy.random.Generator`
backed by the Philox bit generator.  Philox is counter based, so streams
created from the same seed are bit-identical across platforms and runs,
and independent substreams can be split off without statistical coupling.
"""

import numpy as np

__all__ = ["make_rng", "split_rng"]


def make_rng(seed):
    """Create a Philox-backed generator from an integer seed.

    Parameters
    ----------
    seed : int
        Nonnegative seed.  Equal seeds yield bit-identical streams.

    Returns
    -------
    numpy.random.Generator
    """
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def split_rng(rng, n):
    """Split ``n`` independent child generators off an existing one.

    The parent generator is advanced by the spawn, so repeated calls
    produce fresh, non-overlapping children.

    Parameters
    ----------
    rng : numpy.random.Generator
    n : int
        Number of children, must be positive.

    Returns
    -------
    list of numpy.random.Generator
    """
    if n < 1:
        raise ValueError(f"cannot split into {n} generators")
    return rng.spawn(n)
