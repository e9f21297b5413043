"""Weighted index sampling by inverse CDF over cumulative weights.

Random streams come from numpy's PCG64 bit generator seeded directly with the
64-bit run seed (``numpy.random.Generator(numpy.random.PCG64(seed))``). Each
draw consumes one ``Generator.random()`` double ``u`` in [0, 1); the returned
index is the first ``k`` with ``cumulative[k] > u * total``.
"""

from __future__ import annotations

import numpy as np

from .errors import AllWeightsZero, DimensionMismatch

__all__ = ["WeightedSampler", "SeededRng", "make_rng", "build_sampler", "sample", "trial_seed"]

SeededRng = np.random.Generator

RNG_ALGORITHM = "numpy.PCG64"


def make_rng(seed: int) -> np.random.Generator:
    """Generator for one solver run. Same seed, same stream."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def trial_seed(base_seed: int, trial: int) -> int:
    return int(base_seed) + int(trial)


class WeightedSampler:
    """Draw index ``k`` with probability ``weights[k] / sum(weights)``.

    Parameters
    ----------
    weights : array_like, shape (N,)
        Nonnegative weights, at least one strictly positive.
    """

    __slots__ = ("cumulative", "total", "_last")

    def __init__(self, weights):
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or w.shape[0] < 1:
            raise DimensionMismatch(f"weights must be a non-empty 1-d array, got shape {w.shape}")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        cumulative = np.cumsum(w)
        total = float(cumulative[-1])
        if total <= 0.0:
            raise AllWeightsZero("all sampling weights are zero")
        cumulative.flags.writeable = False
        self.cumulative = cumulative
        self.total = total
        # u * total can round up to total; such draws map to the last index
        # carrying mass, never to a trailing zero-weight slot.
        self._last = int(np.flatnonzero(w > 0)[-1])

    def __len__(self):
        return self.cumulative.shape[0]

    @property
    def probabilities(self) -> np.ndarray:
        return np.diff(self.cumulative, prepend=0.0) / self.total

    def index_of(self, u):
        """Map uniform variate(s) in [0, 1) to indices."""
        idx = np.searchsorted(self.cumulative, np.asarray(u) * self.total, side="right")
        return np.minimum(idx, self._last)

    def sample(self, rng: np.random.Generator) -> int:
        return int(self.index_of(rng.random()))

    def sample_many(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.index_of(rng.random(size))


def build_sampler(weights) -> WeightedSampler:
    return WeightedSampler(weights)


def sample(s: WeightedSampler, rng: np.random.Generator) -> int:
    return s.sample(rng)
