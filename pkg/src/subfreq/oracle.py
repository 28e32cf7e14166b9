"""Exact projected statistics computed by a full scan of the data.

Everything here is linear in ``n * d`` and serves as ground truth for the
sampling and sketching estimators and for the hard-instance generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from .dataset import ColumnQuery, Dataset, encode_pattern, pattern_ids


@dataclass(frozen=True)
class FrequencyVector:
    """Sparse frequency vector ``f(A, C)``: pattern id -> positive count.

    ``width`` is ``|C|`` and ``q`` the alphabet size, so the dense vector has
    ``q ** width`` entries.
    """

    counts: Dict[int, int]
    q: int
    width: int
    total: int = field(init=False)

    def __post_init__(self):
        if any(v < 1 for v in self.counts.values()):
            raise ValueError("stored counts must be positive")
        object.__setattr__(self, "total", int(sum(self.counts.values())))

    @property
    def domain_size(self) -> int:
        return self.q**self.width

    def __len__(self):
        return len(self.counts)

    def ids(self) -> np.ndarray:
        return np.array(sorted(self.counts), dtype=np.int64)

    def values(self) -> np.ndarray:
        """Counts ordered by increasing pattern id."""
        return np.array([self.counts[i] for i in sorted(self.counts)], dtype=np.int64)

    def dense(self) -> np.ndarray:
        out = np.zeros(self.domain_size, dtype=np.int64)
        for i, v in self.counts.items():
            out[i] = v
        return out


def frequency_vector(a: Dataset, c: ColumnQuery) -> FrequencyVector:
    ids = pattern_ids(a, c)
    uniq, cnt = np.unique(ids, return_counts=True)
    counts = {int(i): int(v) for i, v in zip(uniq, cnt)}
    return FrequencyVector(counts, a.q, len(c))


def moment_of_counts(counts: np.ndarray, p: float) -> float:
    """``sum(counts ** p)`` over positive counts, with ``p = 0`` counting entries."""
    if p < 0:
        raise ValueError(f"moment order must be non-negative, got {p}")
    counts = np.asarray(counts)
    if p == 0:
        return float(np.count_nonzero(counts))
    if p == 1:
        return float(counts.sum())
    if float(p).is_integer():
        # exact integer arithmetic avoids rounding on large counts
        return float(sum(int(v) ** int(p) for v in counts.tolist()))
    return float(np.sum(counts.astype(np.float64) ** p))


def moment(f: FrequencyVector, p: float) -> float:
    """Frequency moment ``F_p = sum_i f_i ** p``."""
    return moment_of_counts(f.values(), p)


def point_frequency(f: FrequencyVector, b: Sequence[int]) -> int:
    if len(b) != f.width:
        raise ValueError(f"pattern has length {len(b)}, query has {f.width} columns")
    return f.counts.get(encode_pattern(b, f.q), 0)


def heavy_hitters(f: FrequencyVector, p: float, phi: float) -> set:
    """Ids whose count is at least ``phi * ||f||_p``, with ``||f||_0 = F_0``."""
    if not f.counts:
        raise ValueError("heavy hitters of an empty frequency vector")
    if p < 0:
        raise ValueError(f"p must be non-negative, got {p}")
    if not 0 < phi <= 1:
        raise ValueError(f"phi must lie in (0, 1], got {phi}")
    norm = moment(f, 0) if p == 0 else moment(f, p) ** (1.0 / p)
    threshold = phi * norm
    return {i for i, v in f.counts.items() if v >= threshold}


def lp_probabilities(f: FrequencyVector, p: float) -> Tuple[np.ndarray, np.ndarray]:
    """Ids in increasing order and their exact ``l_p`` sampling probabilities."""
    ids = f.ids()
    weights = f.values().astype(np.float64) ** p
    return ids, weights / weights.sum()


def lp_sample(f: FrequencyVector, p: float, rng: np.random.Generator) -> Tuple[int, float]:
    """Draw one pattern id with probability ``f_i**p / F_p``.

    Inverse-CDF over ids in increasing order, so the seed fixes the outcome.
    Returns the id together with its exact probability.
    """
    if not f.counts:
        raise ValueError("cannot sample from an empty frequency vector")
    ids, probs = lp_probabilities(f, p)
    cdf = np.cumsum(probs)
    u = rng.random()
    k = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
    k = min(k, len(ids) - 1)
    return int(ids[k]), float(probs[k])


def lp_sample_many(f: FrequencyVector, p: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent draws of :func:`lp_sample`, returned as ids."""
    ids, probs = lp_probabilities(f, p)
    cdf = np.cumsum(probs)
    u = rng.random(size)
    k = np.minimum(np.searchsorted(cdf, u * cdf[-1], side="right"), len(ids) - 1)
    return ids[k]


def lp_norm(f: FrequencyVector, p: float) -> float:
    if p <= 0:
        raise ValueError("l_p norm needs p > 0")
    return moment(f, p) ** (1.0 / p)


def distinct_count(a: Dataset, c: ColumnQuery) -> int:
    """Shortcut for ``F_0(A, C)``."""
    return int(np.unique(pattern_ids(a, c)).size)


__all__ = [
    "FrequencyVector",
    "frequency_vector",
    "moment",
    "moment_of_counts",
    "point_frequency",
    "heavy_hitters",
    "lp_probabilities",
    "lp_sample",
    "lp_sample_many",
    "lp_norm",
    "distinct_count",
]
