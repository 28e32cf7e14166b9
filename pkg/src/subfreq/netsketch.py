"""Answering projection queries from a net of pre-sketched column subsets.

The net keeps every subset whose size is at most ``lo = floor(d/2 - alpha d)``
or at least ``hi = ceil(d/2 + alpha d)``.  A query falling in the middle band
is rounded to a nearby member (drop or add a few columns) and answered from
that member's sketch; the answer is off by at most the rounding distortion
times the sketch's own factor ``beta``.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain, combinations
from typing import Dict, List, Optional, Sequence

import numpy as np

from .dataset import ColumnQuery, Dataset, check_capacity, pattern_ids
from .errors import CapacityError
from .oracle import frequency_vector, moment
from .sketches import make_sketch

DEFAULT_MAX_MEMBERS = 1 << 21

SKETCH_KINDS = ("exact", "bottomk", "signhash")


def entropy(x: float) -> float:
    """Binary entropy in bits, ``H(0) = H(1) = 0``."""
    if not 0 <= x <= 1:
        raise ValueError(f"entropy argument must lie in [0, 1], got {x}")
    if x == 0 or x == 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def _as_fraction(alpha: float) -> Fraction:
    # decimal inputs such as 0.15 must give exact band edges
    return Fraction(alpha).limit_denominator(10**9)


def net_thresholds(d: int, alpha: float):
    """``(lo, hi)``: members have size ``<= lo`` or ``>= hi``."""
    a = _as_fraction(alpha)
    half = Fraction(d, 2)
    return math.floor(half - a * d), math.ceil(half + a * d)


def net_size(d: int, alpha: float) -> int:
    lo, hi = net_thresholds(d, alpha)
    return sum(math.comb(d, s) for s in range(d + 1) if s <= lo or s >= hi)


def net_size_bound(d: int, alpha: float) -> float:
    """``2 ** (H(1/2 - alpha) d + 1)``."""
    return 2.0 ** (entropy(0.5 - alpha) * d + 1)


def net_size_bound_exact(d: int, alpha: float, size: Optional[int] = None) -> bool:
    """Whether the integer net size obeys ``size <= 2 ** (H(1/2 - alpha) d + 1)``.

    The comparison is made in logarithms with 60 significant digits, so
    float rounding cannot flip the outcome near equality.
    """
    size = net_size(d, alpha) if size is None else size
    with localcontext() as ctx:
        ctx.prec = 60
        a = _as_fraction(alpha)
        x = Decimal(1) / 2 - Decimal(a.numerator) / Decimal(a.denominator)
        ln2 = Decimal(2).ln()
        if x <= 0 or x >= 1:
            h = Decimal(0)
        else:
            h = -(x * x.ln() + (1 - x) * (1 - x).ln()) / ln2
        return Decimal(size).ln() / ln2 <= h * d + 1


def max_shift(d: int, alpha: float) -> int:
    """Largest ``|C symmetric-difference C'|`` produced by :func:`round_query`."""
    lo, hi = net_thresholds(d, alpha)
    down = d // 2 - lo
    up = hi - (d // 2 + 1)
    return max(down, up, 0)


@dataclass(frozen=True)
class AlphaNet:
    d: int
    alpha: float
    lo: int
    hi: int
    members: tuple = field(repr=False)

    def __len__(self):
        return len(self.members)

    def __contains__(self, c) -> bool:
        return self.is_member(len(c))

    def is_member(self, size: int) -> bool:
        return size <= self.lo or size >= self.hi

    @property
    def shift(self) -> int:
        return max_shift(self.d, self.alpha)


def build_net(d: int, alpha: float, max_members: int = DEFAULT_MAX_MEMBERS) -> AlphaNet:
    """Enumerate the net, ordered by subset size then lexicographically."""
    if not 0 < alpha < 0.5:
        raise ValueError(f"alpha must lie in (0, 1/2), got {alpha}")
    if d < 2:
        raise ValueError(f"d must be at least 2, got {d}")
    lo, hi = net_thresholds(d, alpha)
    size = net_size(d, alpha)
    if size > max_members:
        raise CapacityError(
            f"alpha-net for d={d}, alpha={alpha} has {size} members "
            f"(bound 2^(H(1/2-alpha)d+1) = {net_size_bound(d, alpha):.4g}); cap is {max_members}"
        )
    sizes = [s for s in range(d + 1) if s <= lo or s >= hi]
    members = tuple(chain.from_iterable(combinations(range(d), s) for s in sizes))
    return AlphaNet(d, alpha, lo, hi, members)


def round_query(net: AlphaNet, c: ColumnQuery) -> ColumnQuery:
    """Nearest net member that is a subset or superset of ``c``.

    Queries of size at most ``d/2`` lose their largest indices down to ``lo``;
    larger ones gain the smallest absent indices up to ``hi``.
    """
    c.check(net.d)
    k = len(c)
    if net.is_member(k):
        return c
    if 2 * k <= net.d:
        return ColumnQuery(c.columns[: net.lo])
    present = set(c.columns)
    extra = [j for j in range(net.d) if j not in present][: net.hi - k]
    return ColumnQuery.of(c.columns + tuple(extra))


def rounding_distortion(p: float, alpha: float, d: int, q: int = 2) -> float:
    """Worst-case factor between ``F_p`` on a query and on its rounded neighbour.

    Each added or removed column splits or merges pattern classes at most
    ``q`` ways, so over ``s`` columns ``F_0`` moves by ``q**s`` and ``F_p`` by
    ``q**(s |1 - p|)``.  ``s`` is the largest shift :func:`round_query` makes,
    which equals ``alpha d`` whenever that is an integer.
    """
    if p < 0:
        raise ValueError(f"p must be non-negative, got {p}")
    if p == 1:
        return 1.0
    s = max_shift(d, alpha)
    exponent = s if p == 0 else s * abs(1 - p)
    return float(q) ** exponent


def tradeoff_table(d: int, alphas: Sequence[float]) -> List[tuple]:
    """Rows ``(alpha, 2**(H(1/2-alpha) d) / 2**d, 2**(alpha d))``."""
    rows = []
    for a in alphas:
        if not 0 < a < 0.5:
            raise ValueError(f"alpha must lie in (0, 1/2), got {a}")
        rel = 2.0 ** ((entropy(0.5 - a) - 1.0) * d)
        rows.append((a, rel, 2.0 ** (a * d)))
    return rows


def figure_alphas(grid_size: int) -> List[float]:
    """``grid_size`` evenly spaced points strictly inside ``(0, 1/2)``."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    return [round(0.5 * i / (grid_size + 1), 12) for i in range(1, grid_size + 1)]


def emit_figure_data(d: int, grid_size: int = 49) -> List[tuple]:
    """Tradeoff rows with an extra ``log2`` approximation column."""
    return [(a, rel, f, math.log2(f)) for a, rel, f in tradeoff_table(d, figure_alphas(grid_size))]


@dataclass(frozen=True)
class SketchSpec:
    kind: str = "exact"
    eps: Optional[float] = None
    fail_prob: Optional[float] = None

    def __post_init__(self):
        if self.kind not in SKETCH_KINDS:
            raise ValueError(f"sketch kind must be one of {SKETCH_KINDS}, got {self.kind!r}")
        if self.kind != "exact":
            if self.eps is None or not 0 < self.eps < 1:
                raise ValueError(f"{self.kind} sketch needs eps in (0, 1)")
            if self.fail_prob is None or not 0 < self.fail_prob < 1:
                raise ValueError(f"{self.kind} sketch needs fail_prob in (0, 1)")

    @property
    def beta(self) -> float:
        if self.kind == "exact":
            return 1.0
        if self.kind == "bottomk":
            return 1.0 + self.eps
        # median of means only controls |Z - F2| <= eps F2, so the low side is 1 - eps
        return 1.0 / (1.0 - self.eps)

    @classmethod
    def for_net(cls, kind: str, net_members: int, eps=None, delta=None) -> "SketchSpec":
        """Spread a total failure budget ``delta`` evenly over the net members."""
        if kind == "exact":
            return cls(kind)
        return cls(kind, eps, delta / net_members)


@dataclass(frozen=True)
class Certificate:
    used_subset: ColumnQuery
    beta: float
    distortion: float

    @property
    def factor(self) -> float:
        return self.beta * self.distortion


@dataclass(frozen=True, eq=False)
class SketchNet:
    net: AlphaNet
    spec: SketchSpec
    p: float
    n: int
    q: int
    sketches: Dict[tuple, object] = field(repr=False)


def _check_kind(spec: SketchSpec, p: float) -> None:
    if p < 0:
        raise ValueError(f"p must be non-negative, got {p}")
    if spec.kind == "bottomk" and p != 0:
        raise ValueError("bottomk sketches answer F0 only (p = 0)")
    if spec.kind == "signhash" and p != 2:
        raise ValueError("signhash sketches answer F2 only (p = 2)")


def build_sketchnet(a: Dataset, net: AlphaNet, spec: SketchSpec, p: float,
                    rng: np.random.Generator) -> SketchNet:
    """One sketch per net member, each fed the pattern ids of ``a`` on that member.

    Member ``i`` draws its hash functions from a generator seeded by
    ``(root, i)``, with ``root`` taken once from ``rng``; builds are therefore
    reproducible and independent of the order members are processed in.
    """
    if a.d != net.d:
        raise ValueError(f"dataset has d={a.d}, net has d={net.d}")
    _check_kind(spec, p)
    check_capacity(net.d, a.q)
    root = int(rng.integers(0, 2**63))
    sketches = {}
    if p == 1:
        # F1 is n for every query; nothing to sketch
        return SketchNet(net, spec, p, a.n, a.q, sketches)
    for i, cols in enumerate(net.members):
        member_rng = np.random.default_rng(np.random.SeedSequence(root, spawn_key=(i,)))
        sk = make_sketch(spec.kind, p, spec.eps, spec.fail_prob, member_rng)
        sk.update(pattern_ids(a, ColumnQuery(cols)))
        sketches[cols] = sk
    return SketchNet(net, spec, p, a.n, a.q, sketches)


def query(snet: SketchNet, c: ColumnQuery):
    """Estimate ``F_p(A, C)``; returns ``(estimate, Certificate)``.

    With probability at least ``1 - delta`` the estimate lies within a factor
    ``certificate.factor`` of the true value.
    """
    c.check(snet.net.d)
    if snet.p == 1:
        return float(snet.n), Certificate(c, 1.0, 1.0)
    used = round_query(snet.net, c)
    distortion = 1.0 if used == c else rounding_distortion(snet.p, snet.net.alpha, snet.net.d, snet.q)
    est = snet.sketches[used.columns].estimate()
    return float(est), Certificate(used, snet.spec.beta, distortion)


def exact_member_moments(a: Dataset, net: AlphaNet, p: float) -> Dict[tuple, float]:
    """Oracle ``F_p`` on every member; a slow reference for tests."""
    return {cols: moment(frequency_vector(a, ColumnQuery(cols)), p) for cols in net.members}
