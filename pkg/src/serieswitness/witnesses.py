"""Witness constructions with re-verifiable certificates.

Every constructor either returns a WitnessCertificate, whose checkpoints
can be recomputed independently from the stem and the catalog, or raises
ScanExhausted.  Exhaustion is an informative verdict, not a failure: on a
series whose selections and rearrangements share one bound it is the
expected outcome, and the error records how far the scan looked.

All "smallest index" choices are first-match linear scans, so identical
inputs always produce identical certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .ideals import TalagrandSequence, interval
from .series import SeriesOracle, norms_at
from .spaces import DELTA, SpaceSpec
from .stems import (
    IndexerStem,
    RearrStem,
    SelectionStem,
    SubseqStem,
    extend_to_prefix_bijection,
)

__all__ = [
    "ScanExhausted",
    "PreconditionViolation",
    "InconsistentGrowthWitness",
    "PatternTooLarge",
    "Checkpoint",
    "WitnessCertificate",
    "GrowthOracle",
    "growth_oracle",
    "default_growth_oracle",
    "default_scan_horizon",
    "uniform_bound_bruteforce",
    "grow_unbounded_subseries",
    "derive_depth_checkpoints",
    "subseries_to_rearrangement",
    "nowhere_dense_witness_subseq",
    "nowhere_dense_witness_rearr",
    "small_norm_block",
    "dense_open_witness_Bm",
    "dense_open_witness_Cm",
    "dense_open_witness_Am",
    "limsup_subseries",
    "verify_certificate",
    "relation_holds",
]

_CHUNK = 1 << 18

DEFAULT_SCALAR_HORIZON = 10**6
DEFAULT_SEQUENCE_HORIZON = 10**4

GREEDY_POSITIVE = "greedy-positive"
GREEDY_NEGATIVE = "greedy-negative"
PER_COORDINATE = "per-coordinate"
EXHAUSTIVE = "exhaustive"

_STRATEGIES = (GREEDY_POSITIVE, GREEDY_NEGATIVE, PER_COORDINATE, EXHAUSTIVE)

_MAX_INTERVAL_ATTEMPTS = 8
_MAX_PATTERN_WIDTH = 14


class ScanExhausted(Exception):
    """A bounded search ended without reaching its target.

    This is the finite stand-in for "the series may be uniformly
    bounded": the scan looked as far as `horizon` and reports the best
    norm it saw.
    """

    def __init__(
        self,
        construction: str,
        reason: str,
        horizon: int,
        best: float | None = None,
    ) -> None:
        detail = f"{construction}: {reason} within horizon {horizon}"
        if best is not None:
            detail += f" (best norm reached: {best:.6g})"
        super().__init__(detail)
        self.construction = construction
        self.reason = reason
        self.horizon = horizon
        self.best = best


class PreconditionViolation(ValueError):
    """An input violates the construction's stated requirements."""


class InconsistentGrowthWitness(ValueError):
    """Supplied growth checkpoints do not recompute from the stem."""


class PatternTooLarge(ValueError):
    """Exhaustive pattern sweep refused; word length exceeds the bound."""


def relation_holds(value: float, bound: float, relation: str) -> bool:
    """Certified comparisons: strict ones demand clearance above DELTA,
    non-strict ones tolerate DELTA of slack."""
    if relation == ">":
        return value > bound + DELTA
    if relation == ">=":
        return value >= bound - DELTA
    raise ValueError(f"unknown relation {relation!r}")


@dataclass(frozen=True)
class Checkpoint:
    """One checked inequality: the norm at a stem position versus a bound."""

    position: int
    value: float
    bound: float
    relation: str
    kind: str = "partial-sum"  # or "term-norm"

    def holds(self) -> bool:
        return relation_holds(self.value, self.bound, self.relation)


@dataclass(frozen=True)
class WitnessCertificate:
    """A stem plus the inequalities it was built to achieve.

    base is the open-set stem the witness must extend; interval, when
    present, is the half-open block of positions every one of which is
    covered by a checkpoint; stage_boundaries are the prefix lengths at
    which a rearrangement stem is a permutation of an initial segment.
    """

    construction: str
    series_name: str
    stem: IndexerStem
    checkpoints: tuple[Checkpoint, ...]
    base: IndexerStem | None = None
    interval_index: int | None = None
    interval: tuple[int, int] | None = None
    talagrand: TalagrandSequence | None = None
    stage_boundaries: tuple[int, ...] = ()
    details: tuple[tuple[str, float | int | str], ...] = ()

    def detail(self, name: str):
        for key, value in self.details:
            if key == name:
                return value
        return None

    def final_norm(self) -> float | None:
        sums = [c for c in self.checkpoints if c.kind == "partial-sum"]
        return sums[-1].value if sums else None


@dataclass(frozen=True)
class GrowthOracle:
    """Search strategy for index blocks with large partial sums.

    greedy-positive / greedy-negative collect all same-signed terms of a
    real series; per-coordinate collects the terms feeding one coordinate
    of a sequence-space series positively; exhaustive enumerates every
    selection inside a sliding window of `window` indices.
    """

    strategy: str
    coordinate: int = 1
    window: int = 20

    def __post_init__(self) -> None:
        if self.strategy not in _STRATEGIES:
            raise ValueError(f"unknown growth strategy {self.strategy!r}")
        if self.coordinate < 1:
            raise ValueError("coordinate must be >= 1")
        if not 1 <= self.window <= 20:
            raise ValueError("exhaustive window must stay within 20 indices")


def growth_oracle(strategy: str, coordinate: int = 1, window: int = 20) -> GrowthOracle:
    return GrowthOracle(strategy, coordinate, window)


def default_growth_oracle(series: SeriesOracle) -> GrowthOracle:
    if series.is_scalar:
        return GrowthOracle(GREEDY_POSITIVE)
    return GrowthOracle(PER_COORDINATE)


def default_scan_horizon(series: SeriesOracle) -> int:
    return DEFAULT_SCALAR_HORIZON if series.is_scalar else DEFAULT_SEQUENCE_HORIZON


def _check_strategy(series: SeriesOracle, oracle: GrowthOracle) -> None:
    if oracle.strategy in (GREEDY_POSITIVE, GREEDY_NEGATIVE) and not series.is_scalar:
        raise PreconditionViolation(
            f"{oracle.strategy} applies to real-line series only"
        )
    if oracle.strategy == PER_COORDINATE and series.is_scalar:
        raise PreconditionViolation(
            "per-coordinate applies to sequence-space series only"
        )


# ---------------------------------------------------------------------------
# shared scanning helpers


def _first_crossing(
    series: SeriesOracle,
    stem: IndexerStem,
    threshold: float,
    *,
    strict: bool,
    start_pos: int = 1,
    end_pos: int | None = None,
) -> tuple[int, float] | None:
    """First position in [start_pos, end_pos] where the running partial-sum
    norm passes the threshold, or None."""
    total = len(stem)
    end_pos = total if end_pos is None else min(end_pos, total)
    if start_pos > end_pos:
        return None
    if series.is_scalar and not isinstance(stem, SelectionStem):
        running = 0.0
        pos = 0
        for chunk in stem.iter_chunks(_CHUNK):
            if pos >= end_pos:
                break
            terms = series.scalar_terms(chunk)
            if pos + chunk.size < start_pos:
                running += float(np.sum(terms))
                pos += chunk.size
                continue
            cs = running + np.cumsum(terms)
            lo = max(start_pos - pos - 1, 0)
            hi = min(chunk.size, end_pos - pos)
            region = np.abs(cs[lo:hi])
            mask = region > threshold + DELTA if strict else region >= threshold
            if mask.any():
                i = int(np.argmax(mask))
                return pos + lo + i + 1, float(region[i])
            running = float(cs[-1])
            pos += chunk.size
        return None

    from .series import _SparseAccumulator, _stem_term_stream  # shared engine

    acc = _SparseAccumulator(series.space)
    position = 0
    for idx, weights in _stem_term_stream(series, stem, end_pos):
        for offset, n in enumerate(idx):
            position += 1
            if weights is None or weights[offset]:
                acc.add(series.term(int(n)))
            if position >= start_pos:
                value = acc.norm()
                ok = value > threshold + DELTA if strict else value >= threshold
                if ok:
                    return position, value
    return None


def _max_norm_along(
    series: SeriesOracle, stem: IndexerStem, end_pos: int | None = None
) -> float:
    """Largest running partial-sum norm over a stem prefix (for exhaustion
    reports)."""
    total = len(stem)
    end_pos = total if end_pos is None else min(end_pos, total)
    if end_pos == 0:
        return 0.0
    if series.is_scalar and not isinstance(stem, SelectionStem):
        best = 0.0
        running = 0.0
        pos = 0
        for chunk in stem.iter_chunks(_CHUNK):
            if pos >= end_pos:
                break
            take = min(chunk.size, end_pos - pos)
            cs = running + np.cumsum(series.scalar_terms(chunk[:take]))
            best = max(best, float(np.abs(cs).max()))
            running = float(cs[-1])
            pos += take
        return best
    from .series import prefix_norms

    return float(prefix_norms(series, stem, end_pos).max())


def _first_index_with_norm_below(
    series: SeriesOracle, after: int, threshold: float, horizon: int
) -> int | None:
    lo = after + 1
    span = 1 << 10
    while lo <= horizon:
        hi = min(horizon, lo + span - 1)
        idx = np.arange(lo, hi + 1, dtype=np.int64)
        mask = series.term_norms(idx) < threshold
        if mask.any():
            return int(idx[int(np.argmax(mask))])
        lo = hi + 1
        span = min(span * 8, _CHUNK)
    return None


def _row_norms(space: SpaceSpec, sums: np.ndarray) -> np.ndarray:
    if space.exponent == math.inf or space.is_scalar:
        return np.abs(sums).max(axis=1)
    p = space.exponent
    return (np.abs(sums) ** p).sum(axis=1) ** (1.0 / p)


def _canonical_checkpoints(
    series: SeriesOracle,
    stem: IndexerStem,
    raw: Sequence[tuple[int, float, str]],
) -> tuple[Checkpoint, ...]:
    """Recompute checkpoint values through the canonical engine so that
    construction and verification agree bit for bit."""
    positions = [p for p, _, _ in raw]
    values = norms_at(series, stem, positions)
    out = []
    for (position, bound, relation), value in zip(raw, values):
        cp = Checkpoint(position, float(value), float(bound), relation)
        if not cp.holds():
            raise ScanExhausted(
                "checkpoint-recompute",
                f"recomputed norm {value!r} at position {position} misses "
                f"{relation} {bound}",
                position,
                best=float(value),
            )
        out.append(cp)
    return tuple(out)


def _validate_prior_checkpoints(
    series: SeriesOracle,
    stem: IndexerStem,
    checkpoints: Sequence[tuple[int, float]],
    what: str,
) -> None:
    if not checkpoints:
        return
    positions = [int(p) for p, _ in checkpoints]
    if any(p < 1 or p > len(stem) for p in positions):
        raise InconsistentGrowthWitness(
            f"{what}: checkpoint position outside the stem"
        )
    values = norms_at(series, stem, positions)
    for (position, bound), value in zip(checkpoints, values):
        if value < bound - DELTA:
            raise InconsistentGrowthWitness(
                f"{what}: norm at position {position} recomputes to {value!r}, "
                f"below the certified bound {bound!r}"
            )


# ---------------------------------------------------------------------------
# brute-force pattern oracle


def uniform_bound_bruteforce(
    series: SeriesOracle, n: int, alphabet: Iterable[int]
) -> float:
    """Max of || sum t(i) x_i || over every word t in alphabet^n.

    The alphabet is {0,1} (selections) or {-1,0,1} (sign patterns); n is
    capped at 14 to keep the sweep exact and finite.
    """
    alpha = tuple(sorted(set(int(a) for a in alphabet)))
    if alpha not in ((0, 1), (-1, 0, 1)):
        raise ValueError("alphabet must be {0,1} or {-1,0,1}")
    if n < 1:
        raise ValueError("word length must be >= 1")
    if n > _MAX_PATTERN_WIDTH:
        raise PatternTooLarge(
            f"word length {n} exceeds the enumeration bound {_MAX_PATTERN_WIDTH}"
        )
    terms = [series.term(i) for i in range(1, n + 1)]
    coords = sorted({i for t in terms for i in t.support})
    col = {c: j for j, c in enumerate(coords)}
    matrix = np.zeros((n, len(coords)), dtype=np.float64)
    for row, t in enumerate(terms):
        for index, coeff in t.entries:
            matrix[row, col[index]] = coeff
    base = len(alpha)
    total = base**n
    powers = base ** np.arange(n, dtype=np.int64)
    best = 0.0
    chunk = 1 << 16
    for lo in range(0, total, chunk):
        ids = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        digits = (ids[:, None] // powers[None, :]) % base
        weights = digits.astype(np.float64)
        if alpha[0] == -1:
            weights -= 1.0
        norms = _row_norms(series.space, weights @ matrix)
        best = max(best, float(norms.max()))
    return best


# ---------------------------------------------------------------------------
# growing an unbounded subseries


def _threshold_chain(b: float, target: float) -> list[float]:
    """b, 2b, 4b, ... capped so the last threshold is exactly the target."""
    chain: list[float] = []
    t = b
    while t < target:
        t = t * 2 if t * 2 < target else target
        chain.append(t)
    if not chain:
        chain.append(target)
    return chain


def _greedy_candidates(
    series: SeriesOracle, positive: bool, after: int, horizon: int
):
    lo = after + 1
    while lo <= horizon:
        hi = min(horizon, lo + _CHUNK - 1)
        idx = np.arange(lo, hi + 1, dtype=np.int64)
        terms = series.scalar_terms(idx)
        mask = terms > 0 if positive else terms < 0
        if mask.any():
            yield idx[mask], terms[mask]
        lo = hi + 1


def _grow_streaming(
    series: SeriesOracle,
    oracle: GrowthOracle,
    target: float,
    horizon: int,
) -> WitnessCertificate:
    if oracle.strategy in (GREEDY_POSITIVE, GREEDY_NEGATIVE):
        chunks = _greedy_candidates(
            series, oracle.strategy == GREEDY_POSITIVE, 0, horizon
        )

        def consume():
            for idx, terms in chunks:
                yield idx, np.cumsum(terms)

        stream = consume()
        collected: list[np.ndarray] = []
        raw: list[tuple[int, float, str]] = []
        running = 0.0
        count = 0
        pending: list[float] | None = None
        for idx, csum in stream:
            values = np.abs(running + csum)
            if pending is None:
                b = float(values[0])
                if b <= DELTA:
                    raise ScanExhausted(
                        "grow-subseries", "no term with positive norm", horizon
                    )
                raw.append((count + 1, b, ">="))
                pending = _threshold_chain(b, target)
            done_at = None
            while pending:
                t = pending[0]
                final = t == pending[-1] and t >= target
                if final:
                    i = int(np.searchsorted(values, target + DELTA, side="right"))
                else:
                    i = int(np.searchsorted(values, t, side="left"))
                if i >= values.size:
                    break
                raw.append((count + i + 1, t, ">" if final else ">="))
                pending.pop(0)
                if not pending:
                    done_at = i
            if done_at is not None:
                collected.append(idx[: done_at + 1])
                stem = SubseqStem.from_values(np.concatenate(collected))
                checkpoints = _canonical_checkpoints(series, stem, raw)
                return WitnessCertificate(
                    construction="grow-subseries",
                    series_name=series.name,
                    stem=stem,
                    checkpoints=checkpoints,
                    details=(
                        ("target", float(target)),
                        ("strategy", oracle.strategy),
                    ),
                )
            collected.append(idx)
            running = float(running + csum[-1])
            count += idx.size
        raise ScanExhausted(
            "grow-subseries",
            f"target {target:g} not reached",
            horizon,
            best=abs(running),
        )

    # per-coordinate: walk the indices feeding one coordinate positively
    picks: list[int] = []
    raw = []
    from .series import _SparseAccumulator

    acc = _SparseAccumulator(series.space)
    pending = None
    best = 0.0
    for n in range(1, horizon + 1):
        coeff = series.term(n).coefficient(oracle.coordinate)
        if coeff <= 0:
            continue
        picks.append(n)
        acc.add(series.term(n))
        value = acc.norm()
        best = max(best, value)
        if pending is None:
            if value <= DELTA:
                continue
            raw.append((len(picks), value, ">="))
            pending = _threshold_chain(value, target)
        while pending:
            t = pending[0]
            final = t == pending[-1] and t >= target
            ok = value > target + DELTA if final else value >= t
            if not ok:
                break
            raw.append((len(picks), t, ">" if final else ">="))
            pending.pop(0)
        if pending == []:
            stem = SubseqStem.from_values(picks)
            return WitnessCertificate(
                construction="grow-subseries",
                series_name=series.name,
                stem=stem,
                checkpoints=_canonical_checkpoints(series, stem, raw),
                details=(
                    ("target", float(target)),
                    ("strategy", oracle.strategy),
                    ("coordinate", oracle.coordinate),
                ),
            )
    raise ScanExhausted(
        "grow-subseries", f"target {target:g} not reached", horizon, best=best
    )


def _window_terms(
    series: SeriesOracle, acc_coeffs: dict[int, float], lo: int, hi: int
) -> tuple[np.ndarray, np.ndarray, list[int]]:
    window = list(range(lo, hi + 1))
    terms = [series.term(i) for i in window]
    coords = sorted(
        set(acc_coeffs) | {i for t in terms for i in t.support}
    )
    col = {c: j for j, c in enumerate(coords)}
    matrix = np.zeros((len(window), len(coords)), dtype=np.float64)
    for row, t in enumerate(terms):
        for index, coeff in t.entries:
            matrix[row, col[index]] = coeff
    base_row = np.zeros(len(coords), dtype=np.float64)
    for index, coeff in acc_coeffs.items():
        base_row[col[index]] = coeff
    return matrix, base_row, window


def _window_search(
    series: SeriesOracle,
    acc_coeffs: dict[int, float],
    lo: int,
    hi: int,
    threshold: float | None,
    strict: bool,
) -> tuple[list[int] | None, float]:
    """First selection (by enumeration order) inside [lo, hi] whose sum,
    on top of the accumulated vector, passes the threshold.  With no
    threshold, returns the best selection found.  Also reports the best
    norm seen."""
    matrix, base_row, window = _window_terms(series, acc_coeffs, lo, hi)
    w = len(window)
    total = 1 << w
    shifts = np.arange(w, dtype=np.int64)
    best = -1.0
    best_subset: list[int] | None = None
    chunk = 1 << 16
    for start in range(0, total, chunk):
        masks = np.arange(start, min(total, start + chunk), dtype=np.int64)
        bits = ((masks[:, None] >> shifts[None, :]) & 1).astype(np.float64)
        norms = _row_norms(series.space, base_row + bits @ matrix)
        if threshold is not None:
            ok = norms > threshold + DELTA if strict else norms >= threshold
            if ok.any():
                mask = int(masks[int(np.argmax(ok))])
                subset = [window[j] for j in range(w) if mask >> j & 1]
                return subset, float(norms.max())
        top = float(norms.max())
        if top > best:
            best = top
            mask = int(masks[int(np.argmax(norms))])
            best_subset = [window[j] for j in range(w) if mask >> j & 1]
    if threshold is not None:
        return None, best
    return best_subset, best


def _grow_exhaustive(
    series: SeriesOracle,
    oracle: GrowthOracle,
    target: float,
    horizon: int,
) -> WitnessCertificate:
    picks: list[int] = []
    acc: dict[int, float] = {}
    raw: list[tuple[int, float, str]] = []
    best_seen = 0.0

    def absorb(subset: list[int]) -> float:
        for n in subset:
            for index, coeff in series.term(n).entries:
                new = acc.get(index, 0.0) + coeff
                if new == 0.0:
                    acc.pop(index, None)
                else:
                    acc[index] = new
        picks.extend(subset)
        sums = np.array([list(acc.values())]) if acc else np.zeros((1, 1))
        return float(_row_norms(series.space, sums)[0])

    last = 0
    lo, hi = 1, min(oracle.window, horizon)
    subset, _ = _window_search(series, acc, lo, hi, None, False)
    if not subset:
        raise ScanExhausted(
            "grow-subseries", "first window holds no mass", horizon
        )
    value = absorb(subset)
    if value <= DELTA:
        raise ScanExhausted(
            "grow-subseries", "no selection with positive norm", horizon
        )
    raw.append((len(picks), value, ">="))
    pending = _threshold_chain(value, target)
    last = hi
    while pending:
        t = pending[0]
        final = t == pending[-1] and t >= target
        ok = value > target + DELTA if final else value >= t
        if ok:
            raw.append((len(picks), t, ">" if final else ">="))
            pending.pop(0)
            continue
        lo = last + 1
        hi = min(last + oracle.window, horizon)
        if lo > hi:
            raise ScanExhausted(
                "grow-subseries",
                f"target {target:g} not reached",
                horizon,
                best=max(best_seen, value),
            )
        subset, window_best = _window_search(series, acc, lo, hi, t, final)
        best_seen = max(best_seen, window_best)
        if subset is None:
            raise ScanExhausted(
                "grow-subseries",
                f"no selection in window [{lo}, {hi}] reaches {t:g}",
                horizon,
                best=best_seen,
            )
        value = absorb(subset)
        last = hi
    stem = SubseqStem.from_values(picks)
    return WitnessCertificate(
        construction="grow-subseries",
        series_name=series.name,
        stem=stem,
        checkpoints=_canonical_checkpoints(series, stem, raw),
        details=(("target", float(target)), ("strategy", EXHAUSTIVE)),
    )


def grow_unbounded_subseries(
    series: SeriesOracle,
    oracle: GrowthOracle | None = None,
    target: float = 1.0,
    search_horizon: int | None = None,
) -> WitnessCertificate:
    """Strictly increasing stem whose partial-sum norms climb past the
    target, with a doubling chain of certified thresholds along the way.

    Starting from the first block with positive norm b, checkpoints are
    recorded as the running norm first reaches b, 2b, 4b, ... with the
    final threshold capped at the target (strict crossing).  Exhaustion
    of the strategy's candidates before the target signals that the
    series may admit one bound for all selections.
    """
    if target <= 0:
        raise PreconditionViolation("target must be positive")
    oracle = oracle or default_growth_oracle(series)
    _check_strategy(series, oracle)
    horizon = search_horizon or default_scan_horizon(series)
    if oracle.strategy == EXHAUSTIVE:
        return _grow_exhaustive(series, oracle, target, horizon)
    return _grow_streaming(series, oracle, target, horizon)


# ---------------------------------------------------------------------------
# rearrangement construction


def derive_depth_checkpoints(
    series: SeriesOracle,
    stem: SubseqStem,
    depth: int,
    scan_horizon: int | None = None,
) -> tuple[tuple[int, float], ...]:
    """First positions where the stem's partial-sum norms reach 1..depth."""
    horizon = scan_horizon or default_scan_horizon(series)
    limit = min(len(stem), horizon)
    out: list[tuple[int, float]] = []
    position = 0
    for level in range(1, depth + 1):
        found = _first_crossing(
            series, stem, float(level), strict=False, start_pos=position + 1,
            end_pos=limit,
        )
        if found is None:
            raise ScanExhausted(
                "depth-checkpoints",
                f"stem never reaches partial-sum norm {level}",
                limit,
            )
        position = found[0]
        out.append((position, float(level)))
    return tuple(out)


def subseries_to_rearrangement(
    series: SeriesOracle,
    stem: SubseqStem,
    checkpoints: Sequence[tuple[int, float]],
    depth: int,
    scan_horizon: int | None = None,
) -> WitnessCertificate:
    """Turn a certified unbounded subseries into a rearrangement whose
    partial sums pass 1, 2, ..., depth.

    Stage j appends a block of the input stem (starting past everything
    already placed) until the running sum of the current permutation
    prefix crosses j, then closes the prefix into a bijection of an
    initial segment.  The certificate records one crossing per stage and
    the bijection boundaries.
    """
    if depth < 0:
        raise PreconditionViolation("depth must be >= 0")
    horizon = scan_horizon or default_scan_horizon(series)
    if depth == 0:
        return WitnessCertificate(
            construction="rearrangement",
            series_name=series.name,
            stem=RearrStem(()),
            checkpoints=(),
            details=(("depth", 0),),
        )
    _validate_prior_checkpoints(series, stem, checkpoints, "growth witness")
    if not checkpoints or max(level for _, level in checkpoints) < depth:
        raise InconsistentGrowthWitness(
            f"growth witness certifies less than depth {depth}"
        )
    q = RearrStem(())
    raw: list[tuple[int, float, str]] = []
    boundaries: list[int] = []
    for level in range(1, depth + 1):
        k_prev = len(q)
        tail_start = stem.first_position_above(k_prev)
        if tail_start is None:
            raise ScanExhausted(
                "rearrangement",
                f"input stem exhausted before stage {level}",
                min(len(stem), horizon),
            )
        scan_end = min(len(stem), horizon)
        if tail_start > scan_end:
            raise ScanExhausted(
                "rearrangement",
                f"stage {level} tail starts past the scan horizon",
                scan_end,
            )
        candidate = q.concat_runs(stem.slice_runs(tail_start, scan_end))
        found = _first_crossing(
            series,
            candidate,
            float(level),
            strict=False,
            start_pos=k_prev + 1,
        )
        if found is None:
            raise ScanExhausted(
                "rearrangement",
                f"stage {level} never crossed {level}",
                scan_end,
                best=_max_norm_along(series, candidate),
            )
        position, _ = found
        raw.append((position, float(level), ">="))
        q = extend_to_prefix_bijection(candidate.prefix(position))
        boundaries.append(len(q))
    return WitnessCertificate(
        construction="rearrangement",
        series_name=series.name,
        stem=q,
        checkpoints=_canonical_checkpoints(series, q, raw),
        stage_boundaries=tuple(boundaries),
        details=(("depth", depth),),
    )


# ---------------------------------------------------------------------------
# nowhere-dense escapes


def nowhere_dense_witness_subseq(
    series: SeriesOracle,
    s_prime: SubseqStem,
    m: float,
    base: SubseqStem,
    scan_horizon: int | None = None,
    s_prime_checkpoints: Sequence[tuple[int, float]] = (),
) -> WitnessCertificate:
    """Escape witness: extend the open set's stem with the tail of an
    unbounded subseries until one partial sum passes m.

    The continuation starts at the first s' position whose value clears
    the base stem's last entry, so the result is again increasing."""
    if m < 0:
        raise PreconditionViolation("m must be >= 0")
    horizon = scan_horizon or default_scan_horizon(series)
    _validate_prior_checkpoints(
        series, s_prime, s_prime_checkpoints, "unboundedness witness"
    )
    k = len(base)
    last = base.value_at(k) if k else 0
    tail_start = s_prime.first_position_above(last)
    if tail_start is None:
        raise ScanExhausted(
            "nowhere-dense-subseq",
            "the unbounded stem never passes the base stem",
            len(s_prime),
        )
    scan_end = min(len(s_prime), tail_start + horizon - 1)
    candidate = base.concat_runs(s_prime.slice_runs(tail_start, scan_end))
    found = _first_crossing(series, candidate, float(m), strict=True)
    if found is None:
        raise ScanExhausted(
            "nowhere-dense-subseq",
            f"no partial sum above {m:g}",
            scan_end,
            best=_max_norm_along(series, candidate),
        )
    position, _ = found
    keep = max(position, k + 1)
    witness = candidate.prefix(keep)
    return WitnessCertificate(
        construction="nowhere-dense-subseq",
        series_name=series.name,
        stem=witness,
        checkpoints=_canonical_checkpoints(
            series, witness, [(position, float(m), ">")]
        ),
        base=base,
        details=(("m", float(m)), ("tail-start", tail_start)),
    )


def nowhere_dense_witness_rearr(
    series: SeriesOracle,
    p_prime: RearrStem,
    m: float,
    base: RearrStem,
    scan_horizon: int | None = None,
    p_prime_checkpoints: Sequence[tuple[int, float]] = (),
) -> WitnessCertificate:
    """Escape witness for rearrangements: continue the base stem with a
    tail of an unbounded rearrangement, then close into a bijection.

    The tail starts at the first position after which p' has already
    emitted every value of the base stem, which keeps the result
    injective."""
    if m < 0:
        raise PreconditionViolation("m must be >= 0")
    horizon = scan_horizon or default_scan_horizon(series)
    _validate_prior_checkpoints(
        series, p_prime, p_prime_checkpoints, "unboundedness witness"
    )
    cover = p_prime.cover_position(base.values())
    if cover is None:
        raise ScanExhausted(
            "nowhere-dense-rearr",
            "p' never covers the base stem's values",
            len(p_prime),
        )
    tail_start = cover + 1
    if tail_start > len(p_prime):
        raise ScanExhausted(
            "nowhere-dense-rearr", "p' ends at the covering point", len(p_prime)
        )
    scan_end = min(len(p_prime), tail_start + horizon - 1)
    candidate = base.concat_runs(p_prime.slice_runs(tail_start, scan_end))
    found = _first_crossing(series, candidate, float(m), strict=True)
    if found is None:
        raise ScanExhausted(
            "nowhere-dense-rearr",
            f"no partial sum above {m:g}",
            scan_end,
            best=_max_norm_along(series, candidate),
        )
    position, _ = found
    keep = max(position, len(base) + 1)
    witness = extend_to_prefix_bijection(candidate.prefix(keep))
    return WitnessCertificate(
        construction="nowhere-dense-rearr",
        series_name=series.name,
        stem=witness,
        checkpoints=_canonical_checkpoints(
            series, witness, [(position, float(m), ">")]
        ),
        base=base,
        stage_boundaries=(len(witness),),
        details=(("m", float(m)), ("tail-start", tail_start)),
    )


# ---------------------------------------------------------------------------
# dense-open interval witnesses


def small_norm_block(
    series: SeriesOracle,
    after_index: int,
    length: int,
    budget: float,
    scan_horizon: int | None = None,
) -> SubseqStem:
    """Strictly increasing indices past after_index whose term norms sum
    below the budget, of exactly the requested length.

    Each slot scans for the first term cheaper than half the remaining
    budget spread over the remaining slots, which keeps the total under
    budget for every length.  Exhaustion refutes a declared norm decay
    up to the horizon, so the liminf claim is not gated up front."""
    if length < 1:
        raise PreconditionViolation("block length must be >= 1")
    if budget <= 0:
        raise PreconditionViolation("budget must be positive")
    horizon = scan_horizon or default_scan_horizon(series)

    picks: list[np.ndarray] = []
    taken = 0
    remaining = budget
    prev = after_index
    while taken < length:
        slots_left = length - taken
        # Commit the longest consecutive prefix whose slot thresholds all
        # pass; the per-slot scan below only handles the first refusal.
        if prev + slots_left <= horizon:
            idx = np.arange(prev + 1, prev + slots_left + 1, dtype=np.int64)
            norms = series.term_norms(idx)
            consumed = np.concatenate(([0.0], np.cumsum(norms)[:-1]))
            counts = np.arange(slots_left, 0, -1, dtype=np.float64)
            ok = norms < (remaining - consumed) / (2.0 * counts)
            good = int(np.argmin(ok)) if not ok.all() else slots_left
            if good:
                picks.append(idx[:good])
                taken += good
                remaining -= float(np.sum(norms[:good]))
                prev = int(idx[good - 1])
                if taken == length:
                    break
                continue
        threshold = remaining / (2.0 * (length - taken))
        found = _first_index_with_norm_below(series, prev, threshold, horizon)
        if found is None:
            claim = (
                "refutes the declared norm decay"
                if series.liminf_norm_zero
                else "the term norms never decay"
            )
            raise ScanExhausted(
                "small-norm-block",
                f"no term norm below {threshold:g} after index {prev}; {claim}",
                horizon,
            )
        picks.append(np.array([found], dtype=np.int64))
        taken += 1
        remaining -= float(series.term_norms(np.array([found]))[0])
        prev = found
    return SubseqStem.from_values(np.concatenate(picks))


def _interval_start(seq: TalagrandSequence, m: float, above: int) -> int:
    """Smallest interval index k with k > m and n_k > above."""
    k = max(1, int(math.floor(m)) + 1)
    while seq.n(k) <= above:
        k += 1
    return k


def _interval_certificate(
    series: SeriesOracle,
    stem: IndexerStem,
    seq: TalagrandSequence,
    k: int,
    m: float,
) -> tuple[tuple[Checkpoint, ...], tuple[int, int]]:
    window = interval(seq, k)
    raw = [(j, float(m), ">") for j in window]
    return (
        _canonical_checkpoints(series, stem, raw),
        (window.start, window.stop),
    )


def dense_open_witness_Bm(
    series: SeriesOracle,
    seq: TalagrandSequence,
    u: SubseqStem,
    m: int,
    base: SubseqStem,
    scan_horizon: int | None = None,
    u_checkpoints: Sequence[tuple[int, float]] = (),
) -> WitnessCertificate:
    """Dense-open containment witness for subseries.

    The base stem (length r > m) is continued along the unbounded stem u
    until the partial sum passes m+1, then padded with a block of terms
    whose norms total under 1, reaching exactly the end of an interval
    [n_k, n_{k+1}).  Every position of that interval is checked > m
    individually."""
    r = len(base)
    if r <= m:
        raise PreconditionViolation(
            f"base stem length {r} must exceed m = {m}"
        )
    horizon = scan_horizon or default_scan_horizon(series)
    _validate_prior_checkpoints(series, u, u_checkpoints, "unboundedness witness")
    if len(u) <= r:
        raise PreconditionViolation("u must continue past the base stem's length")
    if u.value_at(r + 1) <= base.value_at(r):
        raise PreconditionViolation(
            "u must pass the base stem: u(r+1) <= base's last entry"
        )
    scan_end = min(len(u), horizon)
    candidate = base.concat_runs(u.slice_runs(r + 1, scan_end))
    found = _first_crossing(
        series, candidate, float(m + 1), strict=True, start_pos=r + 1
    )
    if found is None:
        raise ScanExhausted(
            "dense-open-Bm",
            f"no partial sum above {m + 1}",
            scan_end,
            best=_max_norm_along(series, candidate),
        )
    l_r, _ = found
    after = candidate.value_at(l_r)
    k = _interval_start(seq, m, l_r)
    block: SubseqStem | None = None
    for attempt in range(_MAX_INTERVAL_ATTEMPTS):
        length = seq.n(k + attempt + 1) - 1 - l_r
        try:
            block = small_norm_block(series, after, length, 1.0, horizon)
        except ScanExhausted:
            continue
        k = k + attempt
        break
    if block is None:
        raise ScanExhausted(
            "dense-open-Bm",
            "no interval admits a small-norm padding block",
            horizon,
        )
    stem = candidate.prefix(l_r).concat_runs(block.runs)
    checkpoints, window = _interval_certificate(series, stem, seq, k, float(m))
    return WitnessCertificate(
        construction="dense-open-Bm",
        series_name=series.name,
        stem=stem,
        checkpoints=checkpoints,
        base=base,
        interval_index=k,
        interval=window,
        talagrand=seq,
        details=(("m", m), ("l_r", l_r)),
    )


def dense_open_witness_Cm(
    series: SeriesOracle,
    seq: TalagrandSequence,
    t: RearrStem,
    m: int,
    base: RearrStem,
    scan_horizon: int | None = None,
    t_checkpoints: Sequence[tuple[int, float]] = (),
) -> WitnessCertificate:
    """Dense-open containment witness for rearrangements.

    Bookkeeping follows the subseries case with two twists: the tail of
    the unbounded rearrangement t may only start once t has emitted every
    value of the base stem and everything up to z = max(r, max base), and
    the final stem is injective rather than increasing."""
    r = len(base)
    if r <= m:
        raise PreconditionViolation(f"base stem length {r} must exceed m = {m}")
    horizon = scan_horizon or default_scan_horizon(series)
    _validate_prior_checkpoints(series, t, t_checkpoints, "unboundedness witness")
    z = max(r, base.max_value)
    cover = t.cover_position(base.values())
    if cover is None:
        raise ScanExhausted(
            "dense-open-Cm", "t never covers the base stem's values", len(t)
        )
    tail_start = max(z + 1, cover + 1)
    if tail_start > len(t):
        raise ScanExhausted(
            "dense-open-Cm", "t ends before the tail may start", len(t)
        )
    scan_end = min(len(t), horizon)
    candidate = base.concat_runs(t.slice_runs(tail_start, scan_end))
    found = _first_crossing(
        series, candidate, float(m + 1), strict=True, start_pos=r + 1
    )
    if found is None:
        raise ScanExhausted(
            "dense-open-Cm",
            f"no partial sum above {m + 1}",
            scan_end,
            best=_max_norm_along(series, candidate),
        )
    pos_mr, _ = found
    m_r = tail_start + (pos_mr - r) - 1
    tail_values_max = max(
        run.max_value for run in candidate.slice_runs(r + 1, pos_mr)
    )
    after = max(z, m_r, tail_values_max)
    k = _interval_start(seq, m, pos_mr)
    block: SubseqStem | None = None
    for attempt in range(_MAX_INTERVAL_ATTEMPTS):
        length = seq.n(k + attempt + 1) - 1 - pos_mr
        try:
            block = small_norm_block(series, after, length, 1.0, horizon)
        except ScanExhausted:
            continue
        k = k + attempt
        break
    if block is None:
        raise ScanExhausted(
            "dense-open-Cm",
            "no interval admits a small-norm padding block",
            horizon,
        )
    stem = candidate.prefix(pos_mr).concat_runs(block.runs)
    checkpoints, window = _interval_certificate(series, stem, seq, k, float(m))
    return WitnessCertificate(
        construction="dense-open-Cm",
        series_name=series.name,
        stem=stem,
        checkpoints=checkpoints,
        base=base,
        interval_index=k,
        interval=window,
        talagrand=seq,
        details=(
            ("m", m),
            ("z", z),
            ("tail-start", tail_start),
            ("m_r", m_r),
        ),
    )


def dense_open_witness_Am(
    series: SeriesOracle,
    seq: TalagrandSequence,
    u: SubseqStem,
    m: int,
    base: SelectionStem = SelectionStem(),
    scan_horizon: int | None = None,
    u_checkpoints: Sequence[tuple[int, float]] = (),
) -> WitnessCertificate:
    """Dense-open containment witness for 0-1 selections.

    No decay assumption is needed: the word places 1s along u until the
    running sum passes m, then pads with 0s, which leave the sum frozen,
    through the end of an interval [n_k, n_{k+1})."""
    if m < 0:
        raise PreconditionViolation("m must be >= 0")
    horizon = scan_horizon or default_scan_horizon(series)
    _validate_prior_checkpoints(series, u, u_checkpoints, "unboundedness witness")
    from .series import _SparseAccumulator

    # 0-padding freezes the running sum, so only the value after the whole
    # base word matters; interior crossings cannot be kept without
    # truncating the word the witness must extend.
    bits = list(base.bits)
    acc = _SparseAccumulator(series.space)
    for i, bit in enumerate(bits):
        if bit:
            acc.add(series.term(i + 1))
    value = acc.norm()
    best = value
    crossing = len(bits) if bits and value > m + DELTA else None
    if crossing is None:
        tail_start = u.first_position_above(len(bits))
        if tail_start is None:
            raise ScanExhausted(
                "dense-open-Am", "u never passes the initial word", len(u)
            )
        for position in range(tail_start, len(u) + 1):
            index = u.value_at(position)
            if index > horizon:
                break
            bits.extend([0] * (index - 1 - len(bits)))
            bits.append(1)
            acc.add(series.term(index))
            value = acc.norm()
            best = max(best, value)
            if value > m + DELTA:
                crossing = index
                break
    if crossing is None:
        raise ScanExhausted(
            "dense-open-Am",
            f"no selection partial sum above {m:g}",
            horizon,
            best=best,
        )
    cross_pos = crossing
    bits = bits[:cross_pos]
    k = _interval_start(seq, m, cross_pos)
    end = seq.n(k + 1) - 1
    bits.extend([0] * (end - len(bits)))
    stem = SelectionStem(tuple(bits))
    checkpoints, window = _interval_certificate(series, stem, seq, k, float(m))
    return WitnessCertificate(
        construction="dense-open-Am",
        series_name=series.name,
        stem=stem,
        checkpoints=checkpoints,
        base=base,
        interval_index=k,
        interval=window,
        talagrand=seq,
        details=(("m", m), ("crossing", cross_pos)),
    )


# ---------------------------------------------------------------------------
# blowing-up term norms


def limsup_subseries(
    series: SeriesOracle,
    depth: int,
    scan_horizon: int | None = None,
) -> WitnessCertificate:
    """Subseries along which both the term norms and the partial-sum
    norms strictly climb, certified step by step.

    Each new index must beat the previous term norm and twice the current
    partial-sum norm, so the partial sums increase as well.  depth counts
    growth steps; the stem has depth + 1 entries.  Exhaustion refutes a
    declared norm blowup up to the horizon, so the limsup claim is not
    gated up front."""
    if depth < 0:
        raise PreconditionViolation("depth must be >= 0")
    if depth == 0:
        return WitnessCertificate(
            construction="limsup-subseries",
            series_name=series.name,
            stem=SubseqStem(()),
            checkpoints=(),
            details=(("depth", 0),),
        )
    horizon = scan_horizon or default_scan_horizon(series)
    picks = [1]
    term_norm = float(series.term_norms(np.array([1]))[0])
    sum_norms = norms_at(series, SubseqStem.from_values(picks), [1])
    sum_norm = float(sum_norms[0])
    checkpoints: list[Checkpoint] = []
    for step in range(1, depth + 1):
        needed = max(term_norm, 2.0 * sum_norm)
        lo = picks[-1] + 1
        found = None
        while lo <= horizon:
            hi = min(horizon, lo + _CHUNK - 1)
            idx = np.arange(lo, hi + 1, dtype=np.int64)
            mask = series.term_norms(idx) > needed + DELTA
            if mask.any():
                found = int(idx[int(np.argmax(mask))])
                break
            lo = hi + 1
        if found is None:
            raise ScanExhausted(
                "limsup-subseries",
                f"no term norm above {needed:g} for step {step}",
                horizon,
                best=term_norm,
            )
        picks.append(found)
        stem = SubseqStem.from_values(picks)
        new_term = float(series.term_norms(np.array([found]))[0])
        new_sum = float(norms_at(series, stem, [len(picks)])[0])
        checkpoints.append(
            Checkpoint(len(picks), new_term, term_norm, ">", kind="term-norm")
        )
        checkpoints.append(
            Checkpoint(len(picks), new_term, 2.0 * sum_norm, ">", kind="term-norm")
        )
        checkpoints.append(
            Checkpoint(len(picks), new_sum, sum_norm, ">", kind="partial-sum")
        )
        term_norm = new_term
        sum_norm = new_sum
    stem = SubseqStem.from_values(picks)
    for cp in checkpoints:
        if not cp.holds():
            raise ScanExhausted(
                "limsup-subseries", "chain inequality failed on recompute", horizon
            )
    return WitnessCertificate(
        construction="limsup-subseries",
        series_name=series.name,
        stem=stem,
        checkpoints=tuple(checkpoints),
        details=(("depth", depth),),
    )


# ---------------------------------------------------------------------------
# pipeline helpers


def provision_candidate_stream(
    series: SeriesOracle,
    horizon: int | None = None,
    oracle: GrowthOracle | None = None,
) -> SubseqStem:
    """All candidate indices of a streaming growth strategy up to the
    horizon, as an increasing stem.  This is the raw material handed to
    the constructions that consume an unbounded subseries."""
    oracle = oracle or default_growth_oracle(series)
    _check_strategy(series, oracle)
    horizon = horizon or default_scan_horizon(series)
    if oracle.strategy in (GREEDY_POSITIVE, GREEDY_NEGATIVE):
        parts = [
            idx
            for idx, _ in _greedy_candidates(
                series, oracle.strategy == GREEDY_POSITIVE, 0, horizon
            )
        ]
        if not parts:
            return SubseqStem(())
        return SubseqStem.from_values(np.concatenate(parts))
    if oracle.strategy == PER_COORDINATE:
        picks = [
            n
            for n in range(1, horizon + 1)
            if series.term(n).coefficient(oracle.coordinate) > 0
        ]
        return SubseqStem.from_values(picks)
    raise PreconditionViolation("the exhaustive strategy provides no index stream")


def rearrangement_pipeline(
    series: SeriesOracle,
    depth: int,
    scan_horizon: int | None = None,
    oracle: GrowthOracle | None = None,
) -> WitnessCertificate:
    """Provision an unbounded-subseries stream, certify its growth levels,
    and run the rearrangement construction on it."""
    horizon = scan_horizon or default_scan_horizon(series)
    stream = provision_candidate_stream(series, horizon, oracle)
    if depth == 0:
        return subseries_to_rearrangement(series, stream, (), 0, horizon)
    checkpoints = derive_depth_checkpoints(series, stream, depth, horizon)
    return subseries_to_rearrangement(series, stream, checkpoints, depth, horizon)


# ---------------------------------------------------------------------------
# certificate verification


def verify_certificate(
    cert: WitnessCertificate, series: SeriesOracle | None = None
) -> list[str]:
    """Recompute every checkpoint and structural claim; returns the list
    of discrepancies (empty means the certificate is sound)."""
    from .series import catalog_series

    issues: list[str] = []
    if series is None:
        series = catalog_series(cert.series_name)
    stem = cert.stem

    if cert.base is not None:
        if isinstance(stem, SelectionStem):
            if stem.bits[: len(cert.base.bits)] != cert.base.bits:
                issues.append("stem does not extend its base word")
        elif not stem.extends(cert.base):
            issues.append("stem does not extend its base stem")

    for boundary in cert.stage_boundaries:
        if not isinstance(stem, RearrStem) or not stem.is_prefix_bijection(boundary):
            issues.append(
                f"prefix of length {boundary} is not a bijection of an initial segment"
            )

    if cert.interval is not None:
        lo, hi = cert.interval
        covered = {
            c.position for c in cert.checkpoints if c.kind == "partial-sum"
        }
        missing = [j for j in range(lo, hi) if j not in covered]
        if missing:
            issues.append(
                f"interval [{lo}, {hi}) misses checkpoints at {missing[:5]}"
            )
        if cert.talagrand is not None and cert.interval_index is not None:
            window = interval(cert.talagrand, cert.interval_index)
            if (window.start, window.stop) != (lo, hi):
                issues.append("recorded interval does not match its index")

    sum_cps = [c for c in cert.checkpoints if c.kind == "partial-sum"]
    if sum_cps:
        order = sorted(range(len(sum_cps)), key=lambda i: sum_cps[i].position)
        positions = [sum_cps[i].position for i in order]
        try:
            values = norms_at(series, stem, positions)
        except Exception as exc:  # noqa: BLE001  - report, never crash
            issues.append(f"cannot recompute partial sums: {exc}")
            values = None
        if values is not None:
            for rank, i in enumerate(order):
                cp = sum_cps[i]
                recomputed = float(values[rank])
                if abs(recomputed - cp.value) > DELTA:
                    issues.append(
                        f"checkpoint at position {cp.position}: recorded norm "
                        f"{cp.value!r} but recomputed {recomputed!r}"
                    )
                elif not relation_holds(recomputed, cp.bound, cp.relation):
                    issues.append(
                        f"checkpoint at position {cp.position}: norm {recomputed!r} "
                        f"fails {cp.relation} {cp.bound!r}"
                    )

    for cp in cert.checkpoints:
        if cp.kind != "term-norm":
            continue
        try:
            index = stem.value_at(cp.position)
        except (IndexError, AttributeError):
            issues.append(f"term checkpoint at position {cp.position} is off-stem")
            continue
        recomputed = float(series.term_norms(np.array([index]))[0])
        if abs(recomputed - cp.value) > DELTA:
            issues.append(
                f"term checkpoint at position {cp.position}: recorded "
                f"{cp.value!r} but recomputed {recomputed!r}"
            )
        elif not relation_holds(recomputed, cp.bound, cp.relation):
            issues.append(
                f"term checkpoint at position {cp.position}: {recomputed!r} "
                f"fails {cp.relation} {cp.bound!r}"
            )
    return issues
