"""Uniform row sampling: a query-independent summary for point frequencies.

Rows are drawn with replacement before any query is known.  For a query
``C`` and pattern ``b`` the count ``g`` of matching sampled rows, scaled by
``n / t``, estimates ``f_b`` within ``eps * n`` with probability ``1 - delta``
once ``t >= eps**-2 * ln(2 / delta)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dataset import (
    ColumnQuery,
    Dataset,
    PathLike,
    encode_pattern,
    encode_rows,
    format_dataset,
    parse_dataset,
)


def sample_size(eps: float, delta: float) -> int:
    """Smallest ``t`` with ``2 * exp(-eps**2 * t) <= delta``."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return max(1, math.ceil(math.log(2.0 / delta) / eps**2))


@dataclass(frozen=True, eq=False)
class RowSample:
    """``t`` full rows drawn uniformly with replacement from ``n`` source rows."""

    rows: Dataset
    n: int

    @property
    def t(self) -> int:
        return self.rows.n

    @property
    def rate(self) -> float:
        return self.t / self.n

    @property
    def d(self) -> int:
        return self.rows.d

    @property
    def q(self) -> int:
        return self.rows.q


def build_sample(a: Dataset, t: int, rng: np.random.Generator) -> RowSample:
    if a.n < 1:
        raise ValueError("cannot sample from an empty dataset")
    if t < 1:
        raise ValueError(f"sample size must be positive, got {t}")
    idx = rng.integers(0, a.n, size=t)
    return RowSample(Dataset(a.rows[idx], a.q), a.n)


def _sample_ids(s: RowSample, c: ColumnQuery) -> np.ndarray:
    c.check(s.d)
    return encode_rows(s.rows.rows[:, list(c.columns)], s.q)


def estimate_frequency(s: RowSample, c: ColumnQuery, b: Sequence[int]) -> float:
    """Scaled sample count ``g / (t / n)`` of pattern ``b`` on columns ``c``."""
    if len(b) != len(c):
        raise ValueError(f"pattern has length {len(b)}, query has {len(c)} columns")
    target = encode_pattern(b, s.q)
    g = int(np.count_nonzero(_sample_ids(s, c) == target))
    return g / s.rate


def estimate_frequencies(s: RowSample, c: ColumnQuery) -> dict:
    """Estimated frequency of every pattern that occurs in the sample."""
    ids, counts = np.unique(_sample_ids(s, c), return_counts=True)
    return {int(i): int(g) / s.rate for i, g in zip(ids, counts)}


def sample_heavy_hitters(s: RowSample, c: ColumnQuery, phi: float, eps: float,
                         norm: Optional[float] = None) -> set:
    """Sampled patterns whose estimate reaches ``(phi - eps) * norm``.

    ``norm`` defaults to ``n = ||f||_1``.  With ``t = sample_size(eps, delta)``
    every true ``phi``-heavy hitter is reported and nothing below
    ``(phi - 2 eps) * n``, each with probability at least ``1 - delta`` per
    pattern.  For ``p < 1`` the sample does not reveal ``||f||_p``; a caller
    who knows it (or a lower bound on it, since ``||f||_p >= n``) passes it
    as ``norm``.
    """
    if not 0 < eps < phi:
        raise ValueError(f"need 0 < eps < phi, got eps={eps}, phi={phi}")
    norm = s.n if norm is None else norm
    if norm <= 0:
        raise ValueError(f"norm must be positive, got {norm}")
    threshold = (phi - eps) * norm
    return {i for i, est in estimate_frequencies(s, c).items() if est >= threshold}


_PROVENANCE = re.compile(r"^#\s*subfreq-sample\s+(.*)$")


def format_sample(s: RowSample, seed=None) -> str:
    fields = f"n={s.n} t={s.t}"
    if seed is not None:
        fields += f" seed={seed}"
    return format_dataset(s.rows, comments=[f"subfreq-sample {fields}"])


def save_sample(s: RowSample, path: PathLike, seed=None) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_sample(s, seed))


def load_sample(path: PathLike) -> RowSample:
    """Read a sample written by :func:`save_sample`; the header line carries ``n``."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    meta = {}
    for line in lines:
        m = _PROVENANCE.match(line.strip())
        if m:
            meta = dict(tok.split("=", 1) for tok in m.group(1).split())
            break
    if "n" not in meta:
        raise ValueError(f"{path}: missing '# subfreq-sample n=...' provenance line")
    return RowSample(parse_dataset(lines), int(meta["n"]))
