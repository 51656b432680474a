"""Finite index stems: 0-1 words, increasing index blocks, injective prefixes.

Subsequence and rearrangement stems produced by the witness constructions
are unions of long arithmetic progressions, so they are stored as runs
(start, step, count) instead of materialized tuples.  This keeps
multi-million-entry stems cheap to build, serialize and re-verify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

_CHUNK = 1 << 20


@dataclass(frozen=True)
class IndexRun:
    """Arithmetic progression start, start+step, ... of `count` terms."""

    start: int
    step: int
    count: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("run count must be >= 1")
        if self.step == 0:
            raise ValueError("run step must be nonzero")
        if self.min_value < 1:
            raise ValueError("index runs live on positive integers")

    @property
    def last(self) -> int:
        return self.start + (self.count - 1) * self.step

    @property
    def min_value(self) -> int:
        return min(self.start, self.last)

    @property
    def max_value(self) -> int:
        return max(self.start, self.last)

    def value_at(self, offset: int) -> int:
        return self.start + offset * self.step

    def to_numpy(self) -> np.ndarray:
        stop = self.start + self.count * self.step
        return np.arange(self.start, stop, self.step, dtype=np.int64)

    def head(self, count: int) -> "IndexRun":
        return IndexRun(self.start, self.step, count)


def compress_values(values: Sequence[int] | np.ndarray) -> tuple[IndexRun, ...]:
    """Split a sequence of indices into arithmetic runs.

    Groups are cut wherever the consecutive difference changes, which is
    deterministic and linear; repeated values surface as zero steps and
    are rejected by IndexRun.
    """
    arr = np.asarray(values, dtype=np.int64)
    n = int(arr.size)
    if n == 0:
        return ()
    if n == 1:
        return (IndexRun(int(arr[0]), 1, 1),)
    diffs = np.diff(arr)
    if n == 2:
        return (IndexRun(int(arr[0]), int(diffs[0]), 2),)
    splits = np.flatnonzero(diffs[1:] != diffs[:-1]) + 2
    bounds = [0, *splits.tolist(), n]
    runs = []
    for s, e in zip(bounds[:-1], bounds[1:]):
        count = e - s
        step = int(diffs[s]) if count > 1 else 1
        runs.append(IndexRun(int(arr[s]), step, count))
    return tuple(runs)


def _normalized(run: IndexRun) -> tuple[int, int, int]:
    """(first, positive step, count) describing the same value set."""
    if run.step > 0:
        return run.start, run.step, run.count
    return run.last, -run.step, run.count


def runs_intersect(a: IndexRun, b: IndexRun) -> bool:
    """Exact emptiness test for the intersection of two progressions."""
    a0, da, na = _normalized(a)
    b0, db, nb = _normalized(b)
    lo = max(a0, b0)
    hi = min(a0 + (na - 1) * da, b0 + (nb - 1) * db)
    if lo > hi:
        return False
    g = math.gcd(da, db)
    if (b0 - a0) % g:
        return False
    m = db // g
    t0 = ((b0 - a0) // g * pow(da // g, -1, m)) % m if m > 1 else 0
    x0 = a0 + da * t0
    period = da // g * db
    if x0 < lo:
        x0 += (lo - x0 + period - 1) // period * period
    return x0 <= hi


class _RunStem:
    """Shared run-backed storage for subsequence and rearrangement stems."""

    __slots__ = ("runs",)

    runs: tuple[IndexRun, ...]

    def __init__(self, runs: Iterable[IndexRun]) -> None:
        object.__setattr__(self, "runs", tuple(runs))
        self._validate()

    def _validate(self) -> None:
        raise NotImplementedError

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("stems are immutable")

    def __len__(self) -> int:
        return sum(r.count for r in self.runs)

    def __bool__(self) -> bool:
        return bool(self.runs)

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        if self.runs == other.runs:
            return True
        if len(self) != len(other):
            return False
        return bool(np.array_equal(self.to_numpy(), other.to_numpy()))

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.runs))

    def __repr__(self) -> str:
        if len(self) <= 12:
            return f"{type(self).__name__}{tuple(self.values())}"
        head = ", ".join(str(v) for v in self.to_numpy(8))
        return f"{type(self).__name__}({head}, ... len={len(self)})"

    @property
    def max_value(self) -> int:
        return max((r.max_value for r in self.runs), default=0)

    def values(self) -> Iterator[int]:
        for run in self.runs:
            value = run.start
            for _ in range(run.count):
                yield value
                value += run.step

    def value_at(self, position: int) -> int:
        """1-based lookup."""
        if position < 1:
            raise IndexError(position)
        offset = position - 1
        for run in self.runs:
            if offset < run.count:
                return run.value_at(offset)
            offset -= run.count
        raise IndexError(position)

    def iter_chunks(self, chunk: int = _CHUNK) -> Iterator[np.ndarray]:
        for run in self.runs:
            if run.count <= chunk:
                yield run.to_numpy()
                continue
            for lo in range(0, run.count, chunk):
                n = min(chunk, run.count - lo)
                first = run.value_at(lo)
                yield np.arange(
                    first, first + n * run.step, run.step, dtype=np.int64
                )

    def to_numpy(self, limit: int | None = None) -> np.ndarray:
        limit = len(self) if limit is None else min(limit, len(self))
        parts: list[np.ndarray] = []
        taken = 0
        for run in self.runs:
            if taken >= limit:
                break
            take = min(run.count, limit - taken)
            parts.append(run.head(take).to_numpy())
            taken += take
        if not parts:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(parts)

    def _prefix_runs(self, length: int) -> tuple[IndexRun, ...]:
        if length < 0 or length > len(self):
            raise IndexError(length)
        out: list[IndexRun] = []
        left = length
        for run in self.runs:
            if left == 0:
                break
            take = min(run.count, left)
            out.append(run.head(take))
            left -= take
        return tuple(out)

    def slice_runs(self, start: int, end: int) -> tuple[IndexRun, ...]:
        """Runs covering positions start..end inclusive (1-based)."""
        if start < 1 or end > len(self) or start > end + 1:
            raise IndexError((start, end))
        out: list[IndexRun] = []
        skip = start - 1
        left = end - start + 1
        for run in self.runs:
            if left == 0:
                break
            if skip >= run.count:
                skip -= run.count
                continue
            first = run.value_at(skip)
            take = min(run.count - skip, left)
            out.append(IndexRun(first, run.step, take))
            left -= take
            skip = 0
        return tuple(out)

    def extends(self, base: "_RunStem") -> bool:
        """True if `base` is an initial segment of this stem."""
        if len(base) > len(self):
            return False
        mine = self.to_numpy(len(base))
        return np.array_equal(mine, base.to_numpy())

    def cover_position(self, targets: Iterable[int]) -> int | None:
        """Smallest 1-based position p with targets contained in the first
        p values, or None if the stem never covers them."""
        remaining = set(targets)
        if not remaining:
            return 0
        position = 0
        for chunk in self.iter_chunks():
            for value in chunk:
                position += 1
                remaining.discard(int(value))
                if not remaining:
                    return position
        return None


class SubseqStem(_RunStem):
    """Finite prefix of a strictly increasing index sequence."""

    def _validate(self) -> None:
        previous = 0
        for run in self.runs:
            if run.step <= 0:
                raise ValueError("subsequence stems must increase")
            if run.start <= previous:
                raise ValueError("subsequence stems must increase")
            previous = run.last

    @classmethod
    def from_values(cls, values: Sequence[int] | np.ndarray) -> "SubseqStem":
        return cls(compress_values(values))

    @classmethod
    def identity(cls, length: int) -> "SubseqStem":
        if length == 0:
            return cls(())
        return cls((IndexRun(1, 1, length),))

    @classmethod
    def arithmetic(cls, start: int, step: int, count: int) -> "SubseqStem":
        if count == 0:
            return cls(())
        return cls((IndexRun(start, step, count),))

    def prefix(self, length: int) -> "SubseqStem":
        return SubseqStem(self._prefix_runs(length))

    def concat_values(self, values: Sequence[int] | np.ndarray) -> "SubseqStem":
        return SubseqStem(self.runs + compress_values(values))

    def concat_runs(self, runs: Iterable[IndexRun]) -> "SubseqStem":
        return SubseqStem(self.runs + tuple(runs))

    def first_position_above(self, bound: int) -> int | None:
        """Smallest 1-based position whose value exceeds `bound`."""
        position = 1
        for run in self.runs:
            if run.last > bound:
                if run.start > bound:
                    return position
                skip = (bound - run.start) // run.step + 1
                return position + skip
            position += run.count
        return None


class RearrStem(_RunStem):
    """Finite injective index sequence (a rearrangement prefix)."""

    def _validate(self) -> None:
        runs = self.runs
        for i in range(len(runs)):
            for j in range(i + 1, len(runs)):
                if runs_intersect(runs[i], runs[j]):
                    raise ValueError("rearrangement stems must be injective")

    @classmethod
    def from_values(cls, values: Sequence[int] | np.ndarray) -> "RearrStem":
        return cls(compress_values(values))

    @classmethod
    def identity(cls, length: int) -> "RearrStem":
        if length == 0:
            return cls(())
        return cls((IndexRun(1, 1, length),))

    def prefix(self, length: int) -> "RearrStem":
        return RearrStem(self._prefix_runs(length))

    def concat_values(self, values: Sequence[int] | np.ndarray) -> "RearrStem":
        return RearrStem(self.runs + compress_values(values))

    def concat_runs(self, runs: Iterable[IndexRun]) -> "RearrStem":
        return RearrStem(self.runs + tuple(runs))

    def is_prefix_bijection(self, length: int | None = None) -> bool:
        """True if the first `length` values are exactly {1, ..., length}."""
        length = len(self) if length is None else length
        if length > len(self):
            return False
        values = self.to_numpy(length)
        if values.size == 0:
            return True
        if values.max(initial=0) != length:
            return False
        seen = np.zeros(length + 1, dtype=bool)
        seen[values] = True
        return bool(seen[1:].all())


@dataclass(frozen=True)
class SelectionStem:
    """Finite 0-1 word; position i selects (or drops) the i-th series term."""

    bits: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("selection stems are words over {0, 1}")

    @classmethod
    def from_word(cls, word: str) -> "SelectionStem":
        return cls(tuple(int(c) for c in word))

    @classmethod
    def ones(cls, length: int) -> "SelectionStem":
        return cls((1,) * length)

    def __len__(self) -> int:
        return len(self.bits)

    def word(self) -> str:
        return "".join(str(b) for b in self.bits)

    def prefix(self, length: int) -> "SelectionStem":
        if length > len(self.bits):
            raise IndexError(length)
        return SelectionStem(self.bits[:length])

    def ones_positions(self) -> tuple[int, ...]:
        return tuple(i + 1 for i, b in enumerate(self.bits) if b)

    def to_numpy(self) -> np.ndarray:
        return np.asarray(self.bits, dtype=np.int64)


IndexerStem = SelectionStem | SubseqStem | RearrStem


def missing_below(stem: _RunStem, bound: int) -> tuple[IndexRun, ...]:
    """Runs listing {1..bound} minus the stem's values, in increasing order."""
    mask = np.ones(bound + 1, dtype=bool)
    mask[0] = False
    for chunk in stem.iter_chunks():
        inside = chunk[chunk <= bound]
        mask[inside] = False
    absent = np.flatnonzero(mask).astype(np.int64)
    return compress_values(absent)


def extend_to_prefix_bijection(stem: RearrStem) -> RearrStem:
    """Shortest extension of an injective stem to a permutation of {1..k}.

    k is the larger of the stem's length and its maximum value; missing
    values are appended in increasing order and the input is kept as a
    prefix.
    """
    k = max(stem.max_value, len(stem))
    if len(stem) == k:
        return stem
    return stem.concat_runs(missing_below(stem, k))
