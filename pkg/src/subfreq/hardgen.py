"""Generators for the adversarial inputs behind the projected-query lower bounds.

Every generator follows the same pattern: a binary code is fixed, a set ``T``
of codewords is expanded into rows with :func:`~subfreq.codes.star_set`, and
a test word ``y`` (inside or outside ``T``) determines the column query.  The
returned :class:`HardInstance` carries the count thresholds that separate the
two cases so they can be checked against the exact oracle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .codes import enumerate_constant_weight, sample_random_code, star_set, support
from .dataset import ColumnQuery, Dataset, PathLike, save_dataset
from .oracle import frequency_vector, heavy_hitters, lp_norm, moment

PROBLEMS = ("f0", "hh", "fp", "lpsample")


class NoSeparationWarning(UserWarning):
    """The chosen parameters give a separation factor of at most 1."""


class InstanceCheckError(AssertionError):
    """An oracle statistic landed on the wrong side of its predicted threshold."""


@dataclass(frozen=True, eq=False)
class HardInstance:
    """A generated input plus what the oracle should observe on it.

    ``thresholds`` is ``(low, high)``: the tracked statistic is at least
    ``high`` when ``y`` is in ``T`` and at most ``low`` otherwise.
    """

    dataset: Dataset
    query: ColumnQuery
    case_in: bool
    problem: str
    params: Dict[str, object]
    thresholds: Tuple[float, float]
    witness: Tuple[int, ...] = ()
    code_set: Optional[np.ndarray] = field(default=None, repr=False)
    test_word: Optional[np.ndarray] = field(default=None, repr=False)

    def statistic(self) -> float:
        """The oracle value the thresholds refer to."""
        f = frequency_vector(self.dataset, self.query)
        kind = self.params["statistic"]
        if kind == "F0":
            return moment(f, 0)
        if kind == "Fp":
            return moment(f, float(self.params["p"]))
        if kind == "witness_count":
            return float(sum(f.counts.get(i, 0) for i in self.witness))
        if kind == "witness_lp_mass":
            p = float(self.params["p"])
            hit = sum(f.counts.get(i, 0) ** p for i in self.witness if i in f.counts)
            return hit / moment(f, p)
        raise ValueError(f"unknown statistic {kind!r}")

    def holds(self) -> bool:
        low, high = self.thresholds
        value = self.statistic()
        return value >= high if self.case_in else value <= low

    def verify(self) -> "HardInstance":
        if not self.holds():
            low, high = self.thresholds
            side = f">= {high}" if self.case_in else f"<= {low}"
            raise InstanceCheckError(
                f"{self.problem} instance ({'in' if self.case_in else 'out'}): "
                f"{self.params['statistic']} = {self.statistic()} is not {side}"
            )
        return self

    def metadata(self) -> Dict[str, object]:
        low, high = self.thresholds
        meta = {
            "problem": self.problem,
            "case": "in" if self.case_in else "out",
            "query": self.query.format(),
            "statistic": self.params["statistic"],
            "threshold_low": _fmt(low),
            "threshold_high": _fmt(high),
            # whether the two cases' ranges are disjoint at these parameters
            "separated": _fmt(bool(low < high)),
            "witness": ",".join(str(i) for i in self.witness),
            "n": self.dataset.n,
            "d": self.dataset.d,
            "q": self.dataset.q,
        }
        for key, value in self.params.items():
            if key != "statistic":
                meta[key] = _fmt(value)
        return meta

    def save(self, path: PathLike) -> str:
        """Write the dataset to ``path`` and metadata to ``path + '.meta'``."""
        save_dataset(self.dataset, path)
        meta_path = f"{path}.meta"
        with open(meta_path, "w", encoding="ascii") as fh:
            fh.write(format_metadata(self.metadata()))
        return meta_path


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if value.is_integer() and abs(value) < 2**53:
            return str(int(value))
        return repr(value)
    return str(value)


def format_metadata(meta: Dict[str, object]) -> str:
    return "".join(f"{k}={v}\n" for k, v in meta.items())


def parse_metadata(text: str) -> Dict[str, str]:
    out = {}
    for line in text.splitlines():
        if line.strip():
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def _choose_t(code_words: np.ndarray, t_size: int, include_y: bool,
              rng: np.random.Generator):
    """Pick ``y`` and a size-``t_size`` set ``T`` with ``y`` swapped in or left out."""
    m = len(code_words)
    if t_size < 1:
        raise ValueError("t_size must be at least 1")
    if t_size > m - 1:
        raise ValueError(f"t_size={t_size} too large for a code of {m} words (need <= {m - 1})")
    y_idx = int(rng.integers(m))
    rest = np.delete(np.arange(m), y_idx)
    chosen = rng.choice(rest, size=t_size, replace=False)
    if include_y:
        chosen[int(rng.integers(t_size))] = y_idx
    chosen = np.sort(chosen)
    return code_words[chosen], code_words[y_idx]


def _contains(words: np.ndarray, y: np.ndarray) -> bool:
    return bool(np.any(np.all(words == y, axis=1)))


def f0_instance(t_words, y, q: int, verify: bool = False) -> HardInstance:
    """Distinct-count instance from an explicit set ``T`` and test word ``y``.

    Rows are ``star_set(T, q)``; the query is ``supp(y)``.  With ``k = |y|``
    the count is at least ``q**k`` if ``y`` is in ``T`` and at most
    ``k q**(k-1)`` otherwise, provided words of ``T`` share at most ``k - 1``
    ones with ``y``.
    """
    t_words = np.atleast_2d(np.asarray(t_words, dtype=np.uint8))
    y = np.asarray(y, dtype=np.uint8)
    k = int(y.sum())
    weights = t_words.sum(axis=1)
    if not np.all(weights == k):
        raise ValueError("words of T must have the same weight as y")
    if k < 1:
        raise ValueError("test word must have positive weight")
    if q <= k:
        warnings.warn(f"q={q} <= k={k}: separation factor q/k = {q / k:.3g} gives no gap",
                      NoSeparationWarning, stacklevel=2)
    rows = star_set(t_words, q)
    inst = HardInstance(
        dataset=Dataset(rows, q),
        query=ColumnQuery(tuple(int(i) for i in support(y))),
        case_in=_contains(t_words, y),
        problem="f0",
        params={"statistic": "F0", "d": len(y), "k": k, "Q": q, "t_size": len(t_words),
                "sep_factor": q / k},
        thresholds=(float(k * q ** (k - 1)), float(q**k)),
        code_set=t_words,
        test_word=y,
    )
    return inst.verify() if verify else inst


def gen_f0(d: int, k: int, q: int, t_size: int, include_y: bool,
           rng: np.random.Generator, verify: bool = False) -> HardInstance:
    """Distinct-count instance over the code ``B(d, k)`` with random ``T``."""
    if not 1 <= k < d:
        raise ValueError(f"need 1 <= k < d, got d={d}, k={k}")
    code = enumerate_constant_weight(d, k)
    t_words, y = _choose_t(code.words, t_size, include_y, rng)
    return f0_instance(t_words, y, q, verify)


def gen_f0_center(d: int, q: int, t_size: int, include_y: bool,
                  rng: np.random.Generator, verify: bool = False) -> HardInstance:
    """:func:`gen_f0` with ``k = d/2``; the separation factor is ``2q/d``."""
    if d % 2:
        raise ValueError(f"d must be even, got {d}")
    if 2 * q < d:
        raise ValueError(f"need q >= d/2, got q={q}, d={d}")
    inst = gen_f0(d, d // 2, q, t_size, include_y, rng, verify)
    inst.params["sep_factor"] = 2 * q / d
    return inst


def symbol_width(q: int, q_target: int) -> int:
    """Smallest ``w`` with ``q_target ** w >= q``."""
    w = 1
    while q_target**w < q:
        w += 1
    return w


def reduce_alphabet(a: Dataset, q_target: int) -> Dataset:
    """Replace each symbol by its base-``q_target`` digits, most significant first."""
    if not 2 <= q_target <= a.q:
        raise ValueError(f"need 2 <= q_target <= {a.q}, got {q_target}")
    w = symbol_width(a.q, q_target)
    digits = np.empty((a.n, a.d, w), dtype=np.int64)
    rest = a.rows.copy()
    for j in range(w - 1, -1, -1):
        rest, digits[:, :, j] = np.divmod(rest, q_target)
    return Dataset(digits.reshape(a.n, a.d * w), q_target)


def expand_query(c: ColumnQuery, width: int) -> ColumnQuery:
    """Columns of the reduced dataset that encode the original columns ``c``."""
    return ColumnQuery(tuple(width * j + r for j in c.columns for r in range(width)))


def _random_code_setup(d, eps, gamma, t_size, include_y, rng):
    k = math.floor(eps * d)
    limit = math.floor((eps**2 + gamma) * d)
    code = sample_random_code(d, eps, gamma, t_size + 1, rng)
    t_words, y = _choose_t(code.words, t_size, include_y, rng)
    params = {"d": d, "eps": eps, "gamma": gamma, "k": k, "overlap_limit": limit,
              "t_size": t_size}
    return t_words, y, k, limit, params


def gen_hh(d: int, eps: float, gamma: float, t_size: int, include_y: bool,
           rng: np.random.Generator, verify: bool = False,
           p: float = 2.0, phi: float = 0.25) -> HardInstance:
    """Heavy-hitter instance: ``2**k`` all-ones rows plus ``star_set(T, 2)``.

    The query is the complement of ``supp(y)`` and the witness is the all-zero
    pattern there.  Its count is at least ``2**k`` when ``y`` is in ``T`` and
    at most ``|T| 2**limit`` otherwise.  Whether it is actually a
    ``phi``-``l_p`` heavy hitter is reported in ``params`` but not enforced.
    """
    t_words, y, k, limit, params = _random_code_setup(d, eps, gamma, t_size, include_y, rng)
    ones = np.ones((2**k, d), dtype=np.int64)
    rows = np.vstack([ones, star_set(t_words, 2)])
    a = Dataset(rows, 2)
    s = ColumnQuery(tuple(j for j in range(d) if not y[j]))
    f = frequency_vector(a, s)
    zero_id = 0
    ones_id = 2 ** len(s) - 1
    params.update({
        "statistic": "witness_count",
        "ones_block": 2**k,
        "ones_count": f.counts.get(ones_id, 0),
        "p": p,
        "phi": phi,
        "hh_ratio": f.counts.get(zero_id, 0) / lp_norm(f, p),
        "hh_status": zero_id in heavy_hitters(f, p, phi),
    })
    inst = HardInstance(
        dataset=a,
        query=s,
        case_in=_contains(t_words, y),
        problem="hh",
        params=params,
        thresholds=(float(t_size * 2**limit), float(2**k)),
        witness=(zero_id,),
        code_set=t_words,
        test_word=y,
    )
    return inst.verify() if verify else inst


def check_fp_parameters(p: float, eps: float, c: float) -> None:
    """Require ``c < eps (1/p - 1)``, the overlap condition for ``p < 1``."""
    if not 0 < p < 1:
        raise ValueError(f"the overlap condition applies to 0 < p < 1, got p={p}")
    bound = eps * (1 / p - 1)
    if not c < bound:
        raise ValueError(
            f"overlap fraction c={c:.6g} violates c < eps*(1/p - 1) = {bound:.6g} "
            f"(eps={eps}, p={p})"
        )


def fp_case1_bound(d: int, eps: float, c: float, p: float) -> float:
    """``2**(c d p + eps d p + (2 + log2(1/c)) (1 - p) c d) * d**(1 - p)``.

    The upper bound on ``F_p`` for an absent test word with the hidden
    constants made explicit through ``C(d, cd) <= 2**((2 + log2(1/c)) c d)``.
    """
    a = 2 + math.log2(1 / c)
    return 2.0 ** (c * d * p + eps * d * p + a * (1 - p) * c * d) * d ** (1 - p)


def fp_overlap_bound(t_size: int, k: int, limit: int, d: int, p: float) -> float:
    """Hölder bound ``|T|**p 2**(k p) r**(1-p)`` with ``r = sum_{i<=limit} C(d, i)``."""
    r = sum(math.comb(d, i) for i in range(limit + 1))
    return t_size**p * 2.0 ** (k * p) * r ** (1 - p)


def gen_fp(d: int, eps: float, gamma: float, t_size: int, include_y: bool, p: float,
           rng: np.random.Generator, verify: bool = False) -> HardInstance:
    """Frequency-moment instance.

    For ``p > 1`` this is the :func:`gen_hh` instance with ``F_p``
    thresholds.  For ``p < 1`` the rows are ``star_set(T, 2)`` alone, the
    query is ``supp(y)``, and ``F_p`` is at least ``2**k`` when ``y`` is in ``T``.
    """
    if p <= 0 or p == 1:
        raise ValueError(f"need p > 0 and p != 1, got {p}")
    if p > 1:
        base = gen_hh(d, eps, gamma, t_size, include_y, rng, p=p)
        k, limit = base.params["k"], base.params["overlap_limit"]
        params = dict(base.params, statistic="Fp", p=p)
        # in: witness and all-ones block each reach 2**k
        high = 2.0 * 2.0 ** (k * p)
        # out: ones block, plus every other pattern capped at |T| 2**limit
        max_count = t_size * 2**limit
        low = 2.0 ** (k * p) + max_count ** (p - 1) * t_size * 2**k
        inst = HardInstance(base.dataset, base.query, base.case_in, "fp", params,
                            (float(low), float(high)), base.witness, base.code_set,
                            base.test_word)
        return inst.verify() if verify else inst

    t_words, y, k, limit, params = _random_code_setup(d, eps, gamma, t_size, include_y, rng)
    c = limit / d
    check_fp_parameters(p, eps, c)
    params.update({"statistic": "Fp", "p": p, "c": c,
                   "case1_bound": fp_case1_bound(d, eps, c, p)})
    inst = HardInstance(
        dataset=Dataset(star_set(t_words, 2), 2),
        query=ColumnQuery(tuple(int(i) for i in support(y))),
        case_in=_contains(t_words, y),
        problem="fp",
        params=params,
        thresholds=(fp_overlap_bound(t_size, k, limit, d, p), float(2**k)),
        code_set=t_words,
        test_word=y,
    )
    return inst.verify() if verify else inst


def heavy_support_patterns(k: int) -> Tuple[int, ...]:
    """Ids of binary length-``k`` patterns with at least ``k/2`` ones."""
    need = math.ceil(k / 2)
    return tuple(i for i in range(2**k) if bin(i).count("1") >= need)


def gen_lpsample(d: int, eps: float, gamma: float, t_size: int, include_y: bool, p: float,
                 rng: np.random.Generator, verify: bool = False) -> HardInstance:
    """Sampling instance.

    ``p < 1``: the :func:`gen_fp` rows with witness set ``M'`` of query
    patterns having at least ``k/2`` ones.  An exact sampler lands in ``M'``
    with probability at least 1/4 when ``y`` is in ``T`` and never otherwise,
    which needs ``k/2 > limit``.  ``p > 1``: the :func:`gen_hh` instance
    with the all-zero witness.
    """
    if p <= 0 or p == 1:
        raise ValueError(f"need p > 0 and p != 1, got {p}")
    if p > 1:
        base = gen_hh(d, eps, gamma, t_size, include_y, rng, p=p)
        params = dict(base.params, additive_delta=0.0)
        inst = HardInstance(base.dataset, base.query, base.case_in, "lpsample", params,
                            base.thresholds, base.witness, base.code_set, base.test_word)
        return inst.verify() if verify else inst

    k = math.floor(eps * d)
    limit = math.floor((eps**2 + gamma) * d)
    if not k / 2 > limit:
        raise ValueError(
            f"witness patterns need floor(eps d)/2 > floor((eps^2 + gamma) d), "
            f"got {k}/2 <= {limit}"
        )
    base = gen_fp(d, eps, gamma, t_size, include_y, p, rng)
    witness = heavy_support_patterns(k)
    params = dict(base.params, statistic="witness_lp_mass", witness_size=len(witness),
                  additive_delta=0.0)
    inst = HardInstance(base.dataset, base.query, base.case_in, "lpsample", params,
                        (0.0, 0.25), witness, base.code_set, base.test_word)
    return inst.verify() if verify else inst


def generate(problem: str, rng: np.random.Generator, *, d: int, case_in: bool,
             k: Optional[int] = None, q: Optional[int] = None, eps: Optional[float] = None,
             gamma: Optional[float] = None, t_size: Optional[int] = None,
             p: Optional[float] = None, verify: bool = False) -> HardInstance:
    """Dispatch by problem name, filling defaults the way the command line does."""
    if problem == "f0":
        if k is None or q is None:
            raise ValueError("f0 instances need k and q")
        if t_size is None:
            t_size = max(1, math.comb(d, k) // 2)
        return gen_f0(d, k, q, t_size, case_in, rng, verify)
    if eps is None or gamma is None:
        raise ValueError(f"{problem} instances need eps and gamma")
    t_size = 8 if t_size is None else t_size
    if problem == "hh":
        return gen_hh(d, eps, gamma, t_size, case_in, rng, verify, p=2.0 if p is None else p)
    if p is None:
        raise ValueError(f"{problem} instances need p")
    if problem == "fp":
        return gen_fp(d, eps, gamma, t_size, case_in, p, rng, verify)
    if problem == "lpsample":
        return gen_lpsample(d, eps, gamma, t_size, case_in, p, rng, verify)
    raise ValueError(f"problem must be one of {PROBLEMS}, got {problem!r}")


def words_from_strings(words: Sequence[str]) -> np.ndarray:
    """``["1100", "0011"]`` -> 2-D ``uint8`` array."""
    return np.array([[int(ch) for ch in w] for w in words], dtype=np.uint8)
