"""Streaming summaries used as per-subset sketches in the net.

* :class:`ExactMoment` keeps the full frequency table (``beta = 1``).
* :class:`BottomK` estimates distinct counts from the ``k`` smallest hash
  values of a pairwise independent hash, median over independent copies.
* :class:`SignHashF2` is the sign-hash second-moment sketch with 4-wise
  independent signs, median of means.

All hashing is polynomial over the Mersenne prime ``2**61 - 1`` evaluated in
vectorised ``uint64`` arithmetic.
"""

from __future__ import annotations

import math
from typing import Dict, Optional

import numpy as np

from .oracle import moment_of_counts

MERSENNE_61 = (1 << 61) - 1
_P = np.uint64(MERSENNE_61)
_MASK32 = np.uint64(0xFFFFFFFF)
_MASK29 = np.uint64((1 << 29) - 1)
_S61 = np.uint64(61)
_S32 = np.uint64(32)
_S29 = np.uint64(29)
_S3 = np.uint64(3)


def _reduce(x: np.ndarray) -> np.ndarray:
    # x < 2**64  ->  x mod p
    x = (x & _P) + (x >> _S61)
    return np.where(x >= _P, x - _P, x)


def mulmod61(a, b) -> np.ndarray:
    """``a * b mod (2**61 - 1)`` elementwise for ``uint64`` inputs below the prime."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    a_hi, a_lo = a >> _S32, a & _MASK32
    b_hi, b_lo = b >> _S32, b & _MASK32
    hh = a_hi * b_hi  # < 2**58, weight 2**64 == 8 (mod p)
    mid = a_hi * b_lo + a_lo * b_hi  # < 2**62, weight 2**32
    ll = a_lo * b_lo  # < 2**64
    # mid * 2**32 = (mid >> 29) * 2**61 + (mid & (2**29 - 1)) * 2**32
    total = (hh << _S3) + (mid >> _S29) + ((mid & _MASK29) << _S32) + (ll & _P) + (ll >> _S61)
    return _reduce(total)


class PolyHash:
    """Degree ``k - 1`` polynomial hash: a ``k``-wise independent family mod ``2**61 - 1``."""

    def __init__(self, independence: int, rng: np.random.Generator):
        if independence < 1:
            raise ValueError("independence must be at least 1")
        coeffs = rng.integers(0, MERSENNE_61, size=independence, dtype=np.uint64)
        # leading coefficient non-zero keeps the degree exact
        if independence > 1 and coeffs[0] == 0:
            coeffs[0] = 1
        self.coeffs = coeffs

    def __call__(self, x) -> np.ndarray:
        x = _reduce(np.asarray(x).astype(np.uint64))
        acc = np.full(x.shape, self.coeffs[0], dtype=np.uint64)
        for c in self.coeffs[1:]:
            acc = _reduce(mulmod61(acc, x) + c)
        return acc

    def unit(self, x) -> np.ndarray:
        """Hash values scaled into ``[0, 1)``."""
        return self(x).astype(np.float64) / float(MERSENNE_61)


class ExactMoment:
    """Full frequency table; answers any moment exactly."""

    beta = 1.0

    def __init__(self, p: float):
        self.p = p
        self.counts: Dict[int, int] = {}

    def update(self, ids: np.ndarray) -> None:
        uniq, cnt = np.unique(ids, return_counts=True)
        for i, c in zip(uniq.tolist(), cnt.tolist()):
            self.counts[i] = self.counts.get(i, 0) + c

    def estimate(self) -> float:
        return moment_of_counts(np.fromiter(self.counts.values(), dtype=np.int64), self.p)


class BottomK:
    """Distinct-count sketch keeping the ``k`` smallest hash values.

    The estimate of one copy is ``(k - 1) / v_k`` where ``v_k`` is the
    ``k``-th smallest unit hash value, or the exact number of distinct hash
    values while fewer than ``k`` have been seen.  ``copies`` independent
    hashes are combined by the median.
    """

    def __init__(self, k: int, copies: int, rng: np.random.Generator):
        if k < 2:
            raise ValueError("k must be at least 2")
        self.k = k
        self.hashes = [PolyHash(2, rng) for _ in range(copies)]
        self.mins = [np.empty(0, dtype=np.float64) for _ in range(copies)]

    @classmethod
    def for_accuracy(cls, eps: float, fail_prob: float, rng: np.random.Generator) -> "BottomK":
        return cls(math.ceil(16 / eps**2), median_copies(fail_prob), rng)

    def update(self, ids: np.ndarray) -> None:
        ids = np.unique(ids)
        for j, h in enumerate(self.hashes):
            merged = np.union1d(self.mins[j], h.unit(ids))
            self.mins[j] = merged[: self.k]

    def estimate_copy(self, j: int) -> float:
        vals = self.mins[j]
        if len(vals) < self.k:
            return float(len(vals))
        return (self.k - 1) / vals[self.k - 1]

    def estimate(self) -> float:
        return float(np.median([self.estimate_copy(j) for j in range(len(self.hashes))]))


class SignHashF2:
    """Second-moment sketch: counters ``Z = sum_i s(i) f_i`` with random signs.

    ``groups`` groups of ``per_group`` counters; the estimate is the median
    over groups of the mean of ``Z**2`` within a group.
    """

    def __init__(self, per_group: int, groups: int, rng: np.random.Generator):
        self.per_group = per_group
        self.groups = groups
        self.hashes = [PolyHash(4, rng) for _ in range(per_group * groups)]
        self.z = np.zeros(per_group * groups, dtype=np.float64)

    @classmethod
    def for_accuracy(cls, eps: float, fail_prob: float, rng: np.random.Generator) -> "SignHashF2":
        return cls(math.ceil(8 / eps**2), median_copies(fail_prob), rng)

    def update(self, ids: np.ndarray) -> None:
        uniq, cnt = np.unique(ids, return_counts=True)
        cnt = cnt.astype(np.float64)
        for j, h in enumerate(self.hashes):
            signs = 1.0 - 2.0 * (h(uniq) & np.uint64(1)).astype(np.float64)
            self.z[j] += float(signs @ cnt)

    def estimate(self) -> float:
        sq = (self.z**2).reshape(self.groups, self.per_group)
        return float(np.median(sq.mean(axis=1)))


def median_copies(fail_prob: float) -> int:
    """Copies needed so a median of 1/4-failing estimators fails w.p. ``<= fail_prob``."""
    if not 0 < fail_prob < 1:
        raise ValueError(f"failure probability must lie in (0, 1), got {fail_prob}")
    m = math.ceil(8 * math.log(1 / fail_prob))
    return max(1, m | 1)


def make_sketch(kind: str, p: float, eps: Optional[float], fail_prob: Optional[float],
                rng: np.random.Generator):
    if kind == "exact":
        return ExactMoment(p)
    if kind == "bottomk":
        return BottomK.for_accuracy(eps, fail_prob, rng)
    if kind == "signhash":
        return SignHashF2.for_accuracy(eps, fail_prob, rng)
    raise ValueError(f"unknown sketch kind {kind!r}")
