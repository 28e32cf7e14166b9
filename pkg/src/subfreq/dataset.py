"""Input arrays over a finite alphabet, column queries and pattern indexing.

A dataset is an ``n x d`` array with symbols in ``{0, ..., q-1}``.  A column
query selects an ordered subset of the ``d`` columns; each projected row is a
word of length ``|C|`` which is mapped to an integer id by reading it as a
base-``q`` number, most significant symbol first.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import CapacityError, DatasetFormatError

PathLike = Union[str, "os.PathLike[str]"]

# Pattern ids are stored in signed 64-bit integers.
MAX_PATTERN_ID = 2**63


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable ``n x d`` array over the alphabet ``[q]``."""

    rows: np.ndarray
    q: int

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.int64, copy=True)
        if rows.ndim == 1 and rows.size == 0:
            rows = rows.reshape(0, 0)
        if rows.ndim != 2:
            raise ValueError(f"rows must be two-dimensional, got shape {rows.shape}")
        if self.q < 2:
            raise ValueError(f"alphabet size must be at least 2, got {self.q}")
        if rows.size and (rows.min() < 0 or rows.max() >= self.q):
            raise ValueError(f"symbols must lie in [0, {self.q})")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @classmethod
    def empty(cls, d: int, q: int) -> "Dataset":
        return cls(np.zeros((0, d), dtype=np.int64), q)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.q == other.q
            and self.rows.shape == other.rows.shape
            and bool(np.array_equal(self.rows, other.rows))
        )

    def __repr__(self):
        return f"Dataset(n={self.n}, d={self.d}, q={self.q})"


@dataclass(frozen=True)
class ColumnQuery:
    """Strictly increasing tuple of 0-indexed column positions."""

    columns: tuple

    def __post_init__(self):
        cols = tuple(int(c) for c in self.columns)
        if any(c < 0 for c in cols):
            raise ValueError(f"column indices must be non-negative: {cols}")
        if any(a >= b for a, b in zip(cols, cols[1:])):
            raise ValueError(f"column indices must be unique and sorted: {cols}")
        object.__setattr__(self, "columns", cols)

    @classmethod
    def of(cls, columns: Iterable[int]) -> "ColumnQuery":
        """Build a query from any iterable of indices, sorting and deduplicating."""
        return cls(tuple(sorted(set(int(c) for c in columns))))

    @classmethod
    def parse(cls, text: str) -> "ColumnQuery":
        """Parse the comma-separated form used on the command line, e.g. ``"0,1,5"``."""
        text = text.strip()
        if not text:
            return cls(())
        try:
            cols = [int(tok) for tok in text.split(",")]
        except ValueError:
            raise ValueError(f"malformed column list: {text!r}") from None
        if len(set(cols)) != len(cols):
            raise ValueError(f"repeated column in {text!r}")
        return cls(tuple(sorted(cols)))

    def __len__(self):
        return len(self.columns)

    def __iter__(self):
        return iter(self.columns)

    def __contains__(self, item):
        return item in self.columns

    def format(self) -> str:
        return ",".join(str(c) for c in self.columns)

    def check(self, d: int) -> None:
        if self.columns and self.columns[-1] >= d:
            raise ValueError(f"column {self.columns[-1]} out of range for d={d}")


def check_capacity(width: int, q: int) -> None:
    """Raise :class:`CapacityError` if ``q**width`` ids do not fit in 63 bits."""
    if q**width > MAX_PATTERN_ID:
        raise CapacityError(
            f"pattern ids over {width} columns with q={q} need more than 63 bits"
        )


def project(a: Dataset, c: ColumnQuery) -> Dataset:
    """Restrict every row of ``a`` to the columns of ``c``."""
    c.check(a.d)
    return Dataset(a.rows[:, list(c.columns)], a.q)


def encode_pattern(word: Sequence[int], q: int) -> int:
    """Base-``q`` value of ``word``, most significant symbol first."""
    value = 0
    for s in word:
        s = int(s)
        if not 0 <= s < q:
            raise ValueError(f"symbol {s} outside alphabet [0, {q})")
        value = value * q + s
    return value


def decode_pattern(value: int, length: int, q: int) -> tuple:
    """Inverse of :func:`encode_pattern` for words of the given length."""
    if value < 0 or value >= q**length:
        raise ValueError(f"id {value} out of range for length {length}, q={q}")
    word = [0] * length
    for i in range(length - 1, -1, -1):
        value, word[i] = divmod(value, q)
    return tuple(word)


def encode_rows(rows: np.ndarray, q: int) -> np.ndarray:
    """Vectorised :func:`encode_pattern` over the rows of a 2-D array."""
    rows = np.asarray(rows, dtype=np.int64)
    check_capacity(rows.shape[1], q)
    ids = np.zeros(rows.shape[0], dtype=np.int64)
    for j in range(rows.shape[1]):
        ids = ids * q + rows[:, j]
    return ids


def pattern_ids(a: Dataset, c: ColumnQuery) -> np.ndarray:
    """Pattern id of every row of ``a`` projected onto ``c``."""
    c.check(a.d)
    check_capacity(len(c), a.q)
    return encode_rows(a.rows[:, list(c.columns)], a.q)


def _parse_ints(line: str, lineno: int) -> list:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise DatasetFormatError("non-integer token", lineno) from None


def parse_dataset(lines: Iterable[str]) -> Dataset:
    """Parse the text format: header ``n d q`` then ``n`` rows of ``d`` symbols.

    Blank lines and lines starting with ``#`` are ignored.
    """
    header = None
    body = []
    lineno = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            fields = _parse_ints(line, lineno)
            if len(fields) != 3:
                raise DatasetFormatError("header must be 'n d q'", lineno)
            n, d, q = fields
            if n < 0 or d < 0 or q < 2:
                raise DatasetFormatError(f"invalid header values n={n} d={d} q={q}", lineno)
            header = (n, d, q)
            continue
        n, d, q = header
        row = _parse_ints(line, lineno)
        if len(row) != d:
            raise DatasetFormatError(f"expected {d} symbols, found {len(row)}", lineno)
        for s in row:
            if not 0 <= s < q:
                raise DatasetFormatError(f"symbol {s} outside alphabet [0, {q})", lineno)
        if len(body) == n:
            raise DatasetFormatError(f"more than the declared {n} rows", lineno)
        body.append(row)
    if header is None:
        raise DatasetFormatError("missing header", max(lineno, 1))
    n, d, q = header
    if len(body) != n:
        raise DatasetFormatError(f"declared {n} rows, found {len(body)}", lineno)
    if n == 0:
        return Dataset.empty(d, q)
    return Dataset(np.array(body, dtype=np.int64), q)


def load_dataset(path: PathLike) -> Dataset:
    with open(path, "r", encoding="ascii") as fh:
        return parse_dataset(fh)


def format_dataset(a: Dataset, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"{a.n} {a.d} {a.q}")
    lines.extend(" ".join(str(int(s)) for s in row) for row in a.rows)
    return "\n".join(lines) + "\n"


def save_dataset(a: Dataset, path: PathLike, comments: Sequence[str] = ()) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_dataset(a, comments))
