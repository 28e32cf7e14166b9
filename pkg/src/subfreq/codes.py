"""Constant-weight binary codes and the child-word (star) operator.

Words are rows of ``uint8`` arrays.  ``star(y, q)`` lifts a binary word to
every ``q``-ary word whose support lies inside ``supp(y)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Optional

import numpy as np

from .dataset import Dataset
from .errors import CapacityError, CodeSamplingError

DEFAULT_MAX_WORDS = 1 << 21

# all-pairs certification is skipped above this many words when the value is known
PAIRWISE_CHECK_LIMIT = 4096


def intersections(words: np.ndarray, others: Optional[np.ndarray] = None,
                  block: int = 2048) -> Iterable[np.ndarray]:
    """Yield blocks of the matrix ``|x & y|`` between rows of ``words`` and ``others``."""
    w = np.asarray(words, dtype=np.float32)
    o = w if others is None else np.asarray(others, dtype=np.float32)
    for start in range(0, len(w), block):
        yield start, np.rint(w[start:start + block] @ o.T).astype(np.int64)


def max_pairwise_intersection(words: np.ndarray) -> int:
    """Largest ``|x & y|`` over distinct rows ``x != y`` (0 for fewer than two)."""
    if len(words) < 2:
        return 0
    best = 0
    for start, block in intersections(words):
        rows = np.arange(block.shape[0])
        block[rows, rows + start] = -1
        best = max(best, int(block.max()))
    return best


@dataclass(frozen=True, eq=False)
class Code:
    words: np.ndarray
    weight: int
    max_intersection: int

    @property
    def d(self) -> int:
        return self.words.shape[1]

    def __len__(self):
        return len(self.words)

    def as_dataset(self) -> Dataset:
        if len(self.words) == 0:
            return Dataset.empty(self.d, 2)
        return Dataset(self.words, 2)


def _freeze(words: np.ndarray) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype=np.uint8)
    words.setflags(write=False)
    return words


def make_code(words: np.ndarray, known_max_intersection: Optional[int] = None) -> Code:
    """Wrap ``words`` as a :class:`Code`, certifying weight and intersections."""
    words = np.asarray(words, dtype=np.uint8)
    if words.ndim != 2:
        raise ValueError("words must form a 2-D array")
    weights = words.sum(axis=1)
    if len(words) and not np.all(weights == weights[0]):
        raise ValueError("words do not share a common weight")
    weight = int(weights[0]) if len(words) else 0
    if known_max_intersection is None or len(words) <= PAIRWISE_CHECK_LIMIT:
        mi = max_pairwise_intersection(words)
        if known_max_intersection is not None and mi != known_max_intersection:
            raise AssertionError(f"intersection {mi} != expected {known_max_intersection}")
    else:
        mi = known_max_intersection
    return Code(_freeze(words), weight, mi)


def enumerate_constant_weight(d: int, k: int, max_words: int = DEFAULT_MAX_WORDS) -> Code:
    """All ``C(d, k)`` weight-``k`` words of length ``d``, ascending as bit strings."""
    if not 0 <= k <= d:
        raise ValueError(f"need 0 <= k <= d, got d={d}, k={k}")
    count = math.comb(d, k)
    if count > max_words:
        raise CapacityError(f"B({d},{k}) has {count} words; cap is {max_words}")
    words = np.zeros((count, d), dtype=np.uint8)
    # combinations() runs through supports in descending bit-string order
    for i, support in enumerate(combinations(range(d), k)):
        words[count - 1 - i, list(support)] = 1
    # distinct words of equal weight k share at most k - 1 ones
    known = k - 1 if count > 1 else 0
    return make_code(words, known)


def existence_size_cap(d: int, gamma: float) -> int:
    """``floor(2 ** (gamma**2 d / ln 2))``: the code size the existence argument supports."""
    return math.floor(2.0 ** (gamma**2 * d / math.log(2)))


def sample_random_code(d: int, eps: float, gamma: float, target_size: int,
                       rng: np.random.Generator, budget: Optional[int] = None) -> Code:
    """Random subset of ``B(d, floor(eps d))`` with small pairwise overlaps.

    Uniform weight-``k`` words are drawn and kept when they overlap every kept
    word in at most ``floor((eps**2 + gamma) d)`` positions.  Raises
    :class:`CodeSamplingError` after ``budget`` draws (default
    ``100 * target_size``) without reaching ``target_size``.
    """
    k = math.floor(eps * d)
    limit = math.floor((eps**2 + gamma) * d)
    if k < 1 or limit < 1:
        raise ValueError(f"floor(eps d) = {k} and floor((eps^2 + gamma) d) = {limit} must be >= 1")
    if target_size < 1:
        raise ValueError("target_size must be positive")
    cap = existence_size_cap(d, gamma)
    if target_size > cap:
        warnings.warn(
            f"target size {target_size} exceeds floor(2^(gamma^2 d / ln 2)) = {cap}; "
            "success is not covered by the existence argument",
            stacklevel=2,
        )
    budget = 100 * target_size if budget is None else budget
    kept = np.zeros((target_size, d), dtype=np.uint8)
    size = 0
    for _ in range(budget):
        if size == target_size:
            break
        word = np.zeros(d, dtype=np.uint8)
        word[rng.choice(d, size=k, replace=False)] = 1
        if size and int((kept[:size].astype(np.int64) @ word).max()) > limit:
            continue
        if size and k <= limit and np.any(np.all(kept[:size] == word, axis=1)):
            continue
        kept[size] = word
        size += 1
    if size < target_size:
        raise CodeSamplingError(
            f"reached {size} of {target_size} words after {budget} draws "
            f"(d={d}, weight={k}, overlap limit={limit})",
            achieved=size,
        )
    code = make_code(kept)
    if code.max_intersection > limit and len(code) > 1:
        raise AssertionError("sampled code violates its overlap limit")
    return code


def support(y: np.ndarray) -> np.ndarray:
    return np.flatnonzero(np.asarray(y))


def star(y, q: int, max_words: int = DEFAULT_MAX_WORDS) -> np.ndarray:
    """All ``q**weight(y)`` words over ``[q]`` supported inside ``supp(y)``.

    Rows are ordered by counting in base ``q`` over the support positions.
    """
    y = np.asarray(y)
    if y.ndim != 1 or np.any((y != 0) & (y != 1)):
        raise ValueError("star() needs a binary word")
    supp = support(y)
    count = q ** len(supp)
    if count > max_words:
        raise CapacityError(f"star of a weight-{len(supp)} word over q={q} has {count} words")
    out = np.zeros((count, len(y)), dtype=np.int64)
    if len(supp):
        out[:, supp] = np.array(list(product(range(q), repeat=len(supp))), dtype=np.int64)
    return out


def star_set(words, q: int, max_words: int = DEFAULT_MAX_WORDS) -> np.ndarray:
    """Union of :func:`star` over ``words`` with duplicates removed, sorted rows."""
    words = [np.asarray(w) for w in words]
    if not words:
        return np.zeros((0, 0), dtype=np.int64)
    total = sum(q ** int(np.count_nonzero(w)) for w in words)
    if total > max_words:
        raise CapacityError(f"star set would hold up to {total} words; cap is {max_words}")
    return np.unique(np.vstack([star(w, q, max_words) for w in words]), axis=0)
