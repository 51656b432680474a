"""Series term oracles, the three index codings, and partial-sum evaluation.

A series is consumed through finite stems only: a 0-1 word selects terms,
an increasing stem picks a subseries, an injective stem is the prefix of
a rearrangement.  The catalog is the only source of series so that every
term rule stays deterministic and cheap to re-evaluate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .spaces import (
    FiniteSupportVector,
    SpaceSpec,
    basis,
    norm,
    real_line,
    scalar,
    sequence_space,
)
from .stems import (
    IndexerStem,
    RearrStem,
    SelectionStem,
    SubseqStem,
    extend_to_prefix_bijection,
)

__all__ = [
    "SeriesOracle",
    "PartialSumTrace",
    "UnknownSeries",
    "HorizonExceedsStem",
    "catalog_series",
    "catalog_names",
    "partial_sums",
    "prefix_norms",
    "norms_at",
    "extend_to_prefix_bijection",
    "stem_kind",
]

_CHUNK = 1 << 20


class UnknownSeries(ValueError):
    """Requested catalog entry does not exist."""


class HorizonExceedsStem(ValueError):
    """A partial-sum horizon reaches past the end of the supplied stem."""


@dataclass(frozen=True)
class SeriesOracle:
    """Deterministic term rule n -> x_n plus declared growth metadata.

    The metadata flags are claims made by the catalog entry, consumed as
    preconditions by the witness constructions: liminf_norm_zero says the
    term norms dip arbitrarily low, limsup_norm_infinite says they spike
    arbitrarily high.
    """

    name: str
    space: SpaceSpec
    description: str
    liminf_norm_zero: bool
    limsup_norm_infinite: bool
    term_rule: Callable[[int], FiniteSupportVector] = field(repr=False)
    scalar_rule: Callable[[np.ndarray], np.ndarray] | None = field(
        default=None, repr=False
    )
    term_norm_rule: Callable[[np.ndarray], np.ndarray] | None = field(
        default=None, repr=False
    )

    @property
    def is_scalar(self) -> bool:
        return self.space.is_scalar

    def term(self, n: int) -> FiniteSupportVector:
        if n < 1:
            raise ValueError("series terms are indexed from 1")
        return self.term_rule(n)

    def scalar_terms(self, indices: np.ndarray) -> np.ndarray:
        """Vectorized terms for real-line series."""
        if self.scalar_rule is None:
            raise ValueError(f"{self.name} is not a scalar series")
        return self.scalar_rule(indices.astype(np.float64))

    def term_norms(self, indices: np.ndarray) -> np.ndarray:
        if self.term_norm_rule is not None:
            return self.term_norm_rule(indices.astype(np.float64))
        return np.array(
            [norm(self.space, self.term(int(n))) for n in indices], dtype=np.float64
        )


def _alt_harmonic_term(n: int) -> FiniteSupportVector:
    return scalar((1.0 if n % 2 == 0 else -1.0) / n)


def _unit_basis_term(n: int) -> FiniteSupportVector:
    return basis(n)


def _decaying_signed_term(n: int) -> FiniteSupportVector:
    m = (n + 1) // 2
    return basis(m, (1.0 if n % 2 == 0 else -1.0) / m)


def _growing_real_term(n: int) -> FiniteSupportVector:
    return scalar(float(n) if n % 2 == 0 else -float(n))


def _signs(values: np.ndarray) -> np.ndarray:
    return np.where(values % 2 == 0, 1.0, -1.0)


_CATALOG: dict[str, SeriesOracle] = {
    "alt-harmonic": SeriesOracle(
        name="alt-harmonic",
        space=real_line(),
        description="x_n = (-1)^n / n, the canonical conditionally convergent real series",
        liminf_norm_zero=True,
        limsup_norm_infinite=False,
        term_rule=_alt_harmonic_term,
        scalar_rule=lambda v: _signs(v) / v,
        term_norm_rule=lambda v: 1.0 / v,
    ),
    "unit-basis-c0": SeriesOracle(
        name="unit-basis-c0",
        space=sequence_space(math.inf),
        description=(
            "x_n = e_n under the sup norm; the standard realization of a series "
            "whose subseries and rearrangement partial sums all share one bound"
        ),
        liminf_norm_zero=False,
        limsup_norm_infinite=False,
        term_rule=_unit_basis_term,
        term_norm_rule=lambda v: np.ones_like(v),
    ),
    "decaying-signed-c0": SeriesOracle(
        name="decaying-signed-c0",
        space=sequence_space(math.inf),
        description="x_n = (-1)^n e_ceil(n/2) / ceil(n/2) under the sup norm",
        liminf_norm_zero=True,
        limsup_norm_infinite=False,
        term_rule=_decaying_signed_term,
        term_norm_rule=lambda v: 1.0 / np.ceil(v / 2.0),
    ),
    "growing-real": SeriesOracle(
        name="growing-real",
        space=real_line(),
        description="x_n = (-1)^n * n, term norms blow up",
        liminf_norm_zero=False,
        limsup_norm_infinite=True,
        term_rule=_growing_real_term,
        scalar_rule=lambda v: _signs(v) * v,
        term_norm_rule=lambda v: v.astype(np.float64),
    ),
}


def catalog_names() -> tuple[str, ...]:
    return tuple(_CATALOG)


def catalog_series(name: str) -> SeriesOracle:
    try:
        return _CATALOG[name]
    except KeyError:
        known = ", ".join(_CATALOG)
        raise UnknownSeries(f"unknown series {name!r}; catalog has: {known}") from None


def stem_kind(indexer: IndexerStem) -> str:
    if isinstance(indexer, SelectionStem):
        return "selection"
    if isinstance(indexer, SubseqStem):
        return "subseq"
    if isinstance(indexer, RearrStem):
        return "rearr"
    raise TypeError(f"not an indexer stem: {indexer!r}")


@dataclass(frozen=True)
class PartialSumTrace:
    """Norms of the running partial sums read off a stem.

    positions is strictly increasing; every recorded norm is recomputable
    from the stem and the catalog.
    """

    series_name: str
    kind: str
    stem: IndexerStem
    positions: np.ndarray
    norms: np.ndarray

    def __post_init__(self) -> None:
        if self.positions.shape != self.norms.shape:
            raise ValueError("positions and norms must align")
        if self.positions.size and np.any(np.diff(self.positions) <= 0):
            raise ValueError("trace positions must strictly increase")

    @property
    def horizon(self) -> int:
        return int(self.positions[-1]) if self.positions.size else 0

    @property
    def checkpoints(self) -> tuple[tuple[int, float], ...]:
        return tuple(
            (int(l), float(v)) for l, v in zip(self.positions, self.norms)
        )

    def is_contiguous(self) -> bool:
        if not self.positions.size:
            return True
        return bool(
            self.positions[0] == 1
            and np.all(np.diff(self.positions) == 1)
        )


def _stem_term_stream(
    series: SeriesOracle, indexer: IndexerStem, horizon: int
) -> Iterable[tuple[np.ndarray, np.ndarray | None]]:
    """Yield (series index chunk, weight chunk or None) covering 1..horizon."""
    if isinstance(indexer, SelectionStem):
        bits = indexer.to_numpy()[:horizon]
        for lo in range(0, horizon, _CHUNK):
            hi = min(horizon, lo + _CHUNK)
            idx = np.arange(lo + 1, hi + 1, dtype=np.int64)
            yield idx, bits[lo:hi].astype(np.float64)
    else:
        produced = 0
        for chunk in indexer.iter_chunks(_CHUNK):
            if produced >= horizon:
                break
            take = min(chunk.size, horizon - produced)
            yield chunk[:take], None
            produced += take


def _scalar_norm_engine(
    series: SeriesOracle,
    indexer: IndexerStem,
    positions: np.ndarray,
) -> np.ndarray:
    horizon = int(positions[-1])
    out = np.empty(positions.size, dtype=np.float64)
    running = 0.0
    covered = 0
    writer = 0
    for idx, weights in _stem_term_stream(series, indexer, horizon):
        terms = series.scalar_terms(idx)
        if weights is not None:
            terms = terms * weights
        csum = running + np.cumsum(terms)
        running = float(csum[-1])
        lo, hi = covered + 1, covered + idx.size
        while writer < positions.size and lo <= positions[writer] <= hi:
            out[writer] = abs(csum[positions[writer] - 1 - covered])
            writer += 1
        covered = hi
    if writer != positions.size:
        raise HorizonExceedsStem(
            f"stem of length {covered} cannot reach position {int(positions[writer])}"
        )
    return out


class _SparseAccumulator:
    """Running sparse sum with norm tracking for sequence-space series."""

    def __init__(self, space: SpaceSpec) -> None:
        self.space = space
        self.coeffs: dict[int, float] = {}
        self._max = 0.0
        self._powsum = 0.0

    def add(self, vector: FiniteSupportVector) -> None:
        sup = self.space.exponent == math.inf
        p = self.space.exponent
        for index, coeff in vector.entries:
            old = self.coeffs.get(index, 0.0)
            new = old + coeff
            if new == 0.0:
                self.coeffs.pop(index, None)
            else:
                self.coeffs[index] = new
            if sup:
                if abs(new) >= self._max:
                    self._max = abs(new)
                elif abs(old) == self._max:
                    self._max = max(
                        (abs(c) for c in self.coeffs.values()), default=0.0
                    )
            else:
                self._powsum += abs(new) ** p - abs(old) ** p

    def norm(self) -> float:
        if self.space.exponent == math.inf:
            return self._max
        return max(self._powsum, 0.0) ** (1.0 / self.space.exponent)


def _vector_norm_engine(
    series: SeriesOracle,
    indexer: IndexerStem,
    positions: np.ndarray,
) -> np.ndarray:
    horizon = int(positions[-1])
    acc = _SparseAccumulator(series.space)
    out = np.empty(positions.size, dtype=np.float64)
    writer = 0
    position = 0
    for idx, weights in _stem_term_stream(series, indexer, horizon):
        for offset, n in enumerate(idx):
            position += 1
            if weights is None or weights[offset]:
                acc.add(series.term(int(n)))
            if writer < positions.size and positions[writer] == position:
                out[writer] = acc.norm()
                writer += 1
    if writer != positions.size:
        raise HorizonExceedsStem(
            f"stem of length {position} cannot reach position {int(positions[writer])}"
        )
    return out


def norms_at(
    series: SeriesOracle,
    indexer: IndexerStem,
    positions: Sequence[int] | np.ndarray,
) -> np.ndarray:
    """Norms of the partial sums at the given 1-based stem positions.

    This is the single evaluation engine: constructions record values
    computed here and verification recomputes through the same path, so
    certificates round-trip bit for bit.
    """
    pos = np.asarray(positions, dtype=np.int64)
    if pos.size == 0:
        return np.empty(0, dtype=np.float64)
    if pos.min() < 1:
        raise ValueError("positions are 1-based")
    unique, inverse = np.unique(pos, return_inverse=True)
    if series.is_scalar:
        values = _scalar_norm_engine(series, indexer, unique)
    else:
        values = _vector_norm_engine(series, indexer, unique)
    return values[inverse]


def prefix_norms(
    series: SeriesOracle, indexer: IndexerStem, horizon: int
) -> np.ndarray:
    """Norms at every position 1..horizon."""
    if horizon == 0:
        return np.empty(0, dtype=np.float64)
    return norms_at(series, indexer, np.arange(1, horizon + 1, dtype=np.int64))


def partial_sums(
    series: SeriesOracle, indexer: IndexerStem, horizon: int
) -> PartialSumTrace:
    """Trace of running partial-sum norms along a stem, up to `horizon`.

    For a selection stem the i-th summand is bits(i) * x_i; for the other
    stems position i contributes x at the stem's i-th index.
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    if horizon > len(indexer):
        raise HorizonExceedsStem(
            f"horizon {horizon} exceeds stem length {len(indexer)}"
        )
    return PartialSumTrace(
        series_name=series.name,
        kind=stem_kind(indexer),
        stem=indexer,
        positions=np.arange(1, horizon + 1, dtype=np.int64),
        norms=prefix_norms(series, indexer, horizon),
    )
